#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "projequiv/projective.hpp"

namespace projequiv {

// Real 2x2 coefficient matrix of the homography z -> (a z + b) / (c z + d).
struct Mobius {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  static Mobius identity() { return {}; }
  Mobius operator*(const Mobius& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mobius inverse() const;      // SingularMobius when det = 0
  Mobius pow(int n) const;     // n may be negative
  Mobius normalized() const;   // divided by sqrt|det|
};

enum class MobiusTag { Identity, Elliptic, Parabolic, Hyperbolic };

const char* mobius_tag_name(MobiusTag tag);

// For det < 0 the map is orientation-reversing; it is classified through its
// square and flagged. `fixed_points` lists real fixed points on the extended
// line, with infinity encoded as +inf (elliptic maps have none).
struct MobiusClass {
  MobiusTag tag = MobiusTag::Identity;
  bool orientation_reversing = false;
  std::vector<double> fixed_points;
};

// Floating classification: normalize to |det| = 1, band the trace with
// eps = 1e-9 around 2 (|tr| < 2 - eps elliptic, within eps parabolic,
// > 2 + eps hyperbolic).
MobiusClass classify(const Mobius& m, double eps = 1e-9);

// Exact trichotomy for integer matrices: compares tr^2 with 4 det in integer
// arithmetic, no epsilon band. Fixed points are still reported as doubles.
MobiusClass classify_exact(long long a, long long b, long long c, long long d);

// Homographic action on the extended real line; infinity is encoded as the
// IEEE infinity (sign irrelevant on the projective line).
double act(const Mobius& m, double z);

// Action on the extended complex plane; poles map to complex infinity
// (encoded with an infinite real part).
std::complex<double> act(const Mobius& m, std::complex<double> z);

// Fiberwise matrix action (a X + b I)(c X + d I)^{-1}; SingularTensor when
// the denominator is not invertible.
Eigen::MatrixXd act(const Mobius& m, const Eigen::MatrixXd& X);

// Least-squares fits of the strength action of f on span{K, I} over sampled
// points. Three relations are fitted:
//   (f_* K) K   = alpha K + beta I     (so f_* K = A . K, A = (alpha, beta; 1, 0))
//   (f_* K) K_f = rho_k_alpha K + rho_k_beta I      (first column of rho(f))
//   K_f         = gamma K + delta I                 (second column of rho(f))
// When K = K_f all three coincide with the chain-rule relation for K_{f^2}.
// `residual` is the largest relative RMS misfit of the three fits; BadFit is
// raised above 0.05, and ScalarK when K is within 1e-6 of a constant
// multiple of I on the grid (the fit basis degenerates there).
struct HomographyCoeffs {
  double alpha = 0.0;
  double beta = 0.0;
  double rho_k_alpha = 0.0;
  double rho_k_beta = 0.0;
  double gamma = 1.0;
  double delta = 0.0;
  double residual = 0.0;

  // Mobius matrix with f_* K = A . K fiberwise.
  Mobius A() const { return {alpha, beta, 1.0, 0.0}; }
  // Matrix of rho(f) restricted to span{K, I} in the basis (K, I); its
  // columns are the fitted coordinates of rho(f) K and rho(f) I = K_f.
  Mobius rho_matrix() const { return {rho_k_alpha, gamma, rho_k_beta, delta}; }
};

HomographyCoeffs solve_alpha_beta(const DiffeoOnChart& f, const LTensor& K,
                                  const Metric& g0, int per_axis = 8,
                                  double margin = 0.05);

// Max over sampled points of |f_*^n K - A^n . K| (fiberwise Mobius action).
double iterate_check(const DiffeoOnChart& f, const LTensor& K, const Metric& g0,
                     const Mobius& A, int n, int per_axis = 6, double margin = 0.05);

// Partial products P_n = [prod_{k=0}^{n} C^k . z] / lambda_minus^n for
// n = 1..n_max. Requires C hyperbolic with finite real fixed points
// lambda_minus < lambda_plus, lambda_minus attracting and nonzero, and the
// seed z in [lambda_minus, lambda_plus).
std::vector<double> product_limit(const Mobius& C, double z, int n_max);

// Derivative of the homography at a (finite) fixed point: det / (c z + d)^2.
double multiplier_at(const Mobius& m, double fixed_point);

struct CorollaryReport {
  double product_minus = 0.0;  // (lm^dm * lp^dp) * lm
  double product_plus = 0.0;   // (lm^dm * lp^dp) * lp
  bool minus_leq_one = false;
  bool plus_geq_one = false;
  bool bracket = false;        // lm < 1 < lp
  bool all() const { return minus_leq_one && plus_geq_one && bracket; }
};

// Volume-based constraints on a hyperbolic spectrum with multiplicities:
// (lm^dm lp^dp) lm <= 1 <= (lm^dm lp^dp) lp and lm < 1 < lp.
CorollaryReport corollary_inequalities(double lambda_minus, double lambda_plus,
                                       int d_minus, int d_plus);

struct SectorDecomposition {
  std::vector<Interval> sectors;  // disjoint, ascending
};

// Merges closed eigenvalue ranges into maximal disjoint sectors.
SectorDecomposition degenerate_sectors(const std::vector<Interval>& ranges);

struct SpectrumSample {
  std::complex<double> value;
  Point source;
};

struct SpectrumCloud {
  std::vector<SpectrumSample> samples;

  // CSV columns: re, im, x_1..x_d with 17 significant digits.
  void to_csv(std::ostream& os) const;
  // Max distance from any sample to the conjugate of a sample at the same
  // source point (0 for clouds of real matrices).
  double conjugation_defect() const;
};

// Eigenvalues of K over a tensor grid of the chart.
SpectrumCloud spectrum_cloud(const Tensor11Field& K, const ChartDomain& domain,
                             int per_axis, double margin = 0.0);

// Max over sampled points of the multiset distance between Sp(K at f(x)) and
// A^{-1} . Sp(K at x). The multiset distance is the optimal-assignment
// bottleneck for d <= 4 and greedy matching above.
double spectral_equivariance(const DiffeoOnChart& f, const LTensor& K, const Mobius& A,
                             int n_points = 200, std::uint64_t seed = 0x51E0u,
                             double margin = 0.05);

struct DistortionFactors {
  double zeta_minus_sq = 0.0;
  double zeta_lambda_sq = 0.0;
  double zeta_plus_sq = 0.0;
  double jac_sq = 0.0;
};

// Fiberwise distortion data of a hyperbolic spectrum {lm (x dm), lam, lp
// (x dp)} evaluated with the transported eigenvalue lam_fx = lambda(f(x)):
//   zeta_-^2 = P lm,  zeta_lam^2 = P lam_fx,  zeta_+^2 = P lp,
//   Jac^2    = P^{1+d},   with P = lm^dm lp^dp lam_fx, d = dm + dp + 1.
// The exponent-carrying identity zeta_-^{2 dm} zeta_lam^2 zeta_+^{2 dp} =
// Jac^2 holds by construction.
DistortionFactors distortion_factors(double lambda_minus, double lambda_plus,
                                     double lambda_fx, int d_minus, int d_plus);

}  // namespace projequiv
