#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "projequiv/chart.hpp"

namespace projequiv {

// A (pseudo-)Riemannian metric on a chart. `p` / `q` count positive and
// negative eigenvalues of g at every point of the chart.
struct Metric {
  SymBilinearField g;
  int p = 0;
  int q = 0;
  ChartDomain domain;

  int dim() const { return domain.dim(); }

  Eigen::MatrixXd eval(const Point& x) const;
  // Analytic partial when the field carries one, else central difference.
  Eigen::MatrixXd partial(const Point& x, int axis, const FDConfig& cfg) const;
  // Inverse with a singularity guard (|det| < 1e-10 relative scale).
  Eigen::MatrixXd inverse_at(const Point& x) const;
};

// Checks that the eigenvalue signs of g match the declared signature on a
// seeded random sample of the chart; throws SingularMetric on mismatch.
void validate_signature(const Metric& m, int n_samples = 25,
                        std::uint64_t seed = 0x5161u);

// Symmetric rank-3 coefficient array: gamma(k, i, j) = Gamma^k_{ij}.
class Christoffels {
 public:
  explicit Christoffels(int d) : d_(d), v_(static_cast<std::size_t>(d) * d * d, 0.0) {}
  int dim() const { return d_; }
  double& operator()(int k, int i, int j) { return v_[idx(k, i, j)]; }
  double operator()(int k, int i, int j) const { return v_[idx(k, i, j)]; }
  // Gamma^k_{ij} u^i v^j for all k.
  Eigen::VectorXd contract(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

 private:
  std::size_t idx(int k, int i, int j) const {
    return (static_cast<std::size_t>(k) * d_ + i) * d_ + j;
  }
  int d_;
  std::vector<double> v_;
};

struct ChristoffelField {
  std::function<Christoffels(const Point&)> eval;
};

// Levi-Civita connection coefficients:
//   Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
ChristoffelField christoffel(const Metric& m, const FDConfig& cfg = {});

// Rank-4 coordinate array R^i_{jkl}.
class Tensor4 {
 public:
  explicit Tensor4(int d) : d_(d), v_(static_cast<std::size_t>(d) * d * d * d, 0.0) {}
  int dim() const { return d_; }
  double& operator()(int i, int j, int k, int l) { return v_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return v_[idx(i, j, k, l)]; }
  double max_abs() const;

 private:
  std::size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * d_ + j) * d_ + k) * d_ + l;
  }
  int d_;
  std::vector<double> v_;
};

// Curvature of the connection:
//   R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
//             + Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}
//   Ric_{jl}  = R^i_{jil}
// The Christoffel field is differenced with cfg.step2.
struct CurvatureData {
  std::function<Tensor4(const Point&)> riemann;
  std::function<Eigen::MatrixXd(const Point&)> ricci;
};

CurvatureData curvature(const Metric& m, const FDConfig& cfg = {});

// K(u, v) = g(R(u,v)v, u) / (g(u,u) g(v,v) - g(u,v)^2); throws
// DegeneratePlane when the Gram determinant is below 1e-10.
double sectional_curvature(const CurvatureData& curv, const Metric& m,
                           const Point& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v);

struct GeodesicSample {
  double t = 0.0;
  Point x;
  Eigen::VectorXd v;
  Eigen::VectorXd a;  // -Gamma(v, v), recorded from the integrator
};

struct GeodesicPath {
  std::vector<GeodesicSample> samples;
  double step = 0.0;
  bool left_domain = false;

  // CSV columns: t, x_1..x_d, v_1..v_d with 17 significant digits.
  void to_csv(std::ostream& os) const;
  // Max |g(v,v)(t) - g(v,v)(0)| along the path.
  double energy_drift(const Metric& m) const;
};

// Fixed-step RK4 integration of x'' + Gamma(x', x') = 0. The path is
// truncated (left_domain = true) as soon as a step or RK stage would leave
// the chart; an energy drift above 1e-3 * max(1, |E0|) raises StepTooLarge.
GeodesicPath geodesic_integrate(const Metric& m, const Point& start,
                                const Eigen::VectorXd& velocity, double t_end,
                                double step, const FDConfig& cfg = {});

struct UnparamResidual {
  double value = 0.0;     // max over usable samples of |A_perp| / scale
  int samples_used = 0;
  int near_null_excluded = 0;  // |g(v,v)| < 1e-8 |v|^2, reported not scored
};

// Tests whether a sampled curve is an unparameterized geodesic of `other`:
// with A = c'' + Gamma_other(c', c'), the curve is one iff A stays parallel
// to c'. Per sample the score is |A_perp|_2 / max(|A|, |c''|, |Gamma(c',c')|,
// 1e-12), where A_perp is the g_other-orthogonal part of A relative to c'.
// Stored accelerations are used when present; otherwise c'' is recovered by
// differencing the velocity samples in t.
UnparamResidual unparam_geodesic_residual(const GeodesicPath& path, const Metric& other,
                                          const FDConfig& cfg = {});

// dr^2 + delta(r) * fiber on the product chart [r_range] x fiber.domain.
// `delta` is a scalar field of the 1-point (r); it must be positive on the
// sampled range (NonPositiveWarp otherwise).
Metric warped_product_metric(const ScalarField& delta, const Interval& r_range,
                             const Metric& fiber);

}  // namespace projequiv
