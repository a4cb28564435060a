#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "projequiv/metric.hpp"

namespace projequiv {

// A g0-self-adjoint (1,1)-tensor field together with the metric it is
// self-adjoint for. Self-adjointness means g0 L = L^T g0 pointwise.
struct LTensor {
  Tensor11Field field;
  std::shared_ptr<const Metric> base;

  int dim() const { return base->dim(); }
};

LTensor make_ltensor(Tensor11Field field, const Metric& base);

// Max over a sampled grid of |g0 L - L^T g0|; validates the self-adjointness
// invariant of LTensor values.
double selfadjointness_defect(const LTensor& L, int per_axis = 7, double margin = 0.0);

// Transfer tensor T(g, g0) = g0^{-1} g, self-adjoint for g0 (and for g).
LTensor transfer_tensor(const Metric& g, const Metric& g0);

// Real m-th root with the branch that exists: x > 0 always, x < 0 only for
// odd m (NegativeDetRoot otherwise), |x| <= 1e-300 is SingularTensor.
double real_root(double x, int m);

// F(L) = L^{-1} / det L and its inverse F^{-1}(T) = (det T)^{1/(1+d)} T^{-1}.
Eigen::MatrixXd f_transform_at(const Eigen::MatrixXd& L);
Eigen::MatrixXd f_inverse_transform_at(const Eigen::MatrixXd& T);
Tensor11Field f_transform(const Tensor11Field& L);
Tensor11Field f_inverse_transform(const Tensor11Field& T);

// The metric represented by L over its base: g(.,.) = (1/det L) g0(L^{-1}., .),
// i.e. the coordinate matrix g0 * F(L). Carries analytic partials when both
// g0 and L do; the signature is inferred at the domain center.
Metric metric_from_L(const LTensor& L);

// Pushforward of a (1,1)-tensor field: (f_* T)(x) = J T(f^{-1} x) J^{-1}
// with J = Df at f^{-1}(x).
Tensor11Field push_forward(const DiffeoOnChart& f, const Tensor11Field& T);

// Pushforward of a metric: (f_* g)(x) = J^{-T} g(f^{-1} x) J^{-1}.
SymBilinearField push_forward_metric(const DiffeoOnChart& f, const SymBilinearField& g);

// Strength data of a diffeomorphism: S_f = g0^{-1} (f_* g0), K_f = F^{-1}(S_f).
// f is an isometry iff K_f = I; a similarity f_* g0 = b g0 gives K_f = b^{-1/ (1+d)} ...
// (see tests for the pinned scaling example).
struct StrengthPair {
  Tensor11Field S;
  Tensor11Field K;
};

StrengthPair strength_of(const DiffeoOnChart& f, const Metric& g0);

// rho(f) L = (f_* L) K_f — the projective action on L-tensors.
LTensor rho_apply(const DiffeoOnChart& f, const LTensor& L, const Metric& g0);

// rho^GE(f) T = S_f (f_* T) — the companion action on transfer tensors.
Tensor11Field rho_ge_apply(const DiffeoOnChart& f, const Tensor11Field& T, const Metric& g0);

enum class FunctionalKind { Q, N };

// Q(T) = integral of sqrt|det T| dv_{g0};
// N(L) = integral of |det L|^{-(1+d)/2} dv_{g0}.
// Both are invariant under the corresponding rho-action. N raises
// NearDegenerate when |det L| <= 1e-8 at a quadrature sample.
double functionals(const Tensor11Field& T, const Metric& g0, FunctionalKind kind,
                   QuadScheme scheme = QuadScheme::Simpson, int per_axis = 0,
                   int threads = 1);

// Max over a sampled grid of |K_{f^n}(x) - (f_*^{n-1} K_f) ... (f_* K_f) K_f (x)|.
double chain_rule_check(const DiffeoOnChart& f, const Metric& g0, int n,
                        int per_axis = 6, double margin = 0.0);

// Max over grid points and coordinate triples (i, j, l) of the defect of
//   g((nabla_i L) e_j, e_l) = 1/2 g_{ji} d_l tr L + 1/2 g_{li} d_j tr L.
double sinjukov_residual(const LTensor& L, const FDConfig& cfg = {}, int per_axis = 0);

struct MobilityResult {
  int kernel_dim = 0;
  std::vector<double> singular_values;  // descending
  double sigma_max = 0.0;
  double threshold = 0.0;
  double gap = 0.0;  // smallest kept / largest dropped (capped at 1e300)
};

// Collocation of the Sinjukov equation on the span of `basis`: each basis
// element contributes one column of pointwise equation defects; the kernel
// dimension is the number of singular values below tol * max(sigma_max, 1)
// after scaling every basis element to unit RMS on the sample set.
MobilityResult mobility_in_span(const Metric& g, const std::vector<LTensor>& basis,
                                double tol = 1e-7, int n_points = 120,
                                std::uint64_t seed = 0xB0B1u, const FDConfig& cfg = {});

// Max over grid and indices of Delta^k_{ij} - delta^k_i phi_j - delta^k_j phi_i
// where Delta = Gamma(g2) - Gamma(g), phi_j = Delta^k_{kj} / (d+1). Zero iff
// the metrics share unparameterized geodesics.
double projective_connection_check(const Metric& g, const Metric& g2,
                                   const FDConfig& cfg = {}, int per_axis = 6);

// Max over sampled points of |L Ric^# - Ric^# L|_F with Ric^# = g^{-1} Ric.
double ricci_commutator(const LTensor& L, const CurvatureData& curv,
                        int per_axis = 5, double margin = 0.0);

}  // namespace projequiv
