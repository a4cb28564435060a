#pragma once

#include <string>
#include <vector>

#include "projequiv/projective.hpp"

namespace projequiv {

// ---------------------------------------------------------------------------
// Surface pairs
// ---------------------------------------------------------------------------

// The Dini family on a 2-chart:
//   g    = (X(x) - Y(y)) (dx^2 + dy^2)
//   gbar = (1/Y - 1/X) (dx^2 / X + dy^2 / Y)
// The two metrics share unparameterized geodesics; the associated L-tensor
// over g is diag(X(x), Y(y)).
struct DiniPair {
  Metric g;
  Metric g_bar;
  LTensor L;
  ScalarField X;  // function of the 1-point (x)
  ScalarField Y;  // function of the 1-point (y)
};

// Requires 0 < Y < X with a strict gap (sup Y < inf X) on the sampled
// domain; RangeOverlap / PositivityFailure otherwise.
DiniPair dini_pair(const ScalarField& X, const ScalarField& Y, const ChartDomain& domain);

// A surface with a projective involution:
//   g = (a(x) - 1/a(y)) (sqrt(a(x)) dx^2 + dy^2 / sqrt(a(y)))
// The coordinate swap sigma(x, y) = (y, x) maps geodesics to geodesics but is
// not an isometry; its strength is K_sigma = diag(a(x), 1/a(y)).
struct MatveevExample {
  Metric g;
  DiffeoOnChart sigma;
  ScalarField a;            // function of the 1-point (t)
  LTensor K_closed_form;    // diag(a(x), 1/a(y)), for cross-checks
};

// Requires a > 1 with a strict margin on the sampled (square) domain.
MatveevExample matveev_example(const ScalarField& a, const ChartDomain& domain);

// ---------------------------------------------------------------------------
// Constant curvature and warped charts
// ---------------------------------------------------------------------------

// kappa = 0: identity metric on [-1, 1]^d;
// kappa = +1: stereographic 4 / (1 + |x|^2)^2 Id on [-0.8, 0.8]^d;
// kappa = -1: half-space Id / x_d^2 with x_d in [0.6, 1.8].
Metric constant_curvature_chart(int d, int kappa);

// ---------------------------------------------------------------------------
// Complex projective models (realified affine charts)
// ---------------------------------------------------------------------------
// A chart of CP^n is realified as R^{2n} with block layout
// (Re z_1..Re z_n, Im z_1..Im z_n). Product charts concatenate the factors'
// real coordinate blocks.

// Fubini-Study metric from the potential ln(1 + |z|^2):
//   h_{ab} = [(1 + |z|^2) delta_ab - conj(z_a) z_b] / (1 + |z|^2)^2,
//   g = 2 Re(h dz dzbar) realified.
// With this normalization CP^1 is the round 2-sphere of curvature 2, and the
// degree-k Veronese embedding pulls g_FS back to exactly k g_FS.
Metric fubini_study(int n, int chart = 0, double half_width = 0.7, int grid_res = 17);

// Smooth map between realified charts; `differential` falls back to central
// differences when absent.
struct ChartMap {
  int dim_in = 0;
  int dim_out = 0;
  std::function<Point(const Point&)> eval;
  std::function<Eigen::MatrixXd(const Point&)> differential;

  Eigen::MatrixXd jacobian(const Point& x, const FDConfig& cfg = {}) const;
};

ChartMap compose(const ChartMap& outer, const ChartMap& inner);
// Acts block-wise on concatenated inputs; differential is block diagonal.
ChartMap product_map(const ChartMap& f, const ChartMap& g);

// (phi^* g)(u, v) = g(Dphi u, Dphi v); throws OutOfDomain when phi leaves the
// target chart. The signature is inferred at the source chart center.
Metric pullback_metric(const ChartMap& phi, const Metric& target,
                       const ChartDomain& source_domain);

// Block-diagonal product metric on the concatenation of the factors' charts.
Metric direct_sum_metric(const Metric& g1, const Metric& g2);

// Degree-k Veronese embedding CP^d -> CP^N, N = binom(d + k, k) - 1, written
// in affine charts with multinomial square-root weights so that homogeneous
// norms satisfy |v_k(Z)|^2 = |Z|^{2k}.
struct VeroneseMap {
  int d = 0;
  int k = 0;
  int N = 0;
  ChartMap map;  // R^{2d} -> R^{2N}
};

VeroneseMap veronese(int d, int k);

// Segre embedding CP^m x CP^n -> CP^{(m+1)(n+1)-1} on affine charts.
struct SegreMap {
  int m = 0;
  int n = 0;
  int N = 0;
  ChartMap map;  // R^{2(m+n)} -> R^{2N}
};

SegreMap segre(int m, int n);

// ---------------------------------------------------------------------------
// Named model registry (CLI surface)
// ---------------------------------------------------------------------------

DiniPair dini_default();       // X = 4 + sin x, Y = 1.5 + 0.4 sin y on [0, 2pi]^2
DiniPair dini_constant();      // X = 4, Y = 1.5 (affinely equivalent pair)
MatveevExample matveev_default();  // a = 3 + sin t on [0, 2pi]^2

// Known ids: flat:2 flat:3 sphere:2 sphere:3 hyperbolic:2 dini:default
// dini:bar dini:constant matveev:default fs:1 fs:2 warped:default perturbed:3
Metric model_metric(const std::string& id);
std::vector<std::string> model_ids();

}  // namespace projequiv
