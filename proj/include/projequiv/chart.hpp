#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "projequiv/errors.hpp"
#include "projequiv/rng.hpp"

namespace projequiv {

// A point in chart coordinates.
using Point = Eigen::VectorXd;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(double x, double margin = 0.0) const {
    return x >= lo + margin && x <= hi - margin;
  }
};

// Axis-aligned coordinate box with a default sampling resolution. All grid
// sweeps in the library enumerate points in row-major axis order so repeated
// runs visit samples identically.
class ChartDomain {
 public:
  ChartDomain(std::vector<Interval> bounds, int grid_res);

  int dim() const { return static_cast<int>(bounds_.size()); }
  int grid_res() const { return grid_res_; }
  const Interval& bounds(int axis) const { return bounds_.at(axis); }

  bool contains(const Point& p, double margin = 0.0) const;
  void require_inside(const Point& p, double margin = 0.0) const;

  Point center() const;
  double box_volume() const;

  // n evenly spaced samples on one axis, inset by margin at both ends.
  std::vector<double> axis_grid(int axis, int n, double margin = 0.0) const;

  // Row-major sweep over the tensor grid with per_axis samples on each axis.
  void for_each_grid_point(int per_axis, double margin,
                           const std::function<void(const Point&)>& fn) const;

  Point random_interior(Rng& rng, double margin = 0.0) const;

 private:
  std::vector<Interval> bounds_;
  int grid_res_;
};

// Finite-difference configuration. `step` drives first derivatives, `step2`
// the differencing of derived fields (Christoffel symbols inside curvature).
struct FDConfig {
  double step = 1e-3;
  double step2 = 5e-3;
  int order = 4;  // 2 or 4

  void validate() const;
};

// Sampling inset that keeps nested difference stencils inside the chart
// (outer differencing of derived fields at +-2 step2, inner metric stencils
// at +-2 step), with a small cushion against roundoff at the box faces.
double fd_margin(const FDConfig& cfg);

enum class DerivProvenance { Analytic, FiniteDifference };

// Scalar function of chart coordinates with an optional analytic partial.
// When `partial` is absent, consumers fall back to central differences.
struct ScalarField {
  std::function<double(const Point&)> eval;
  std::function<double(const Point&, int)> partial;  // d/dx_axis, optional

  DerivProvenance provenance() const {
    return partial ? DerivProvenance::Analytic : DerivProvenance::FiniteDifference;
  }
};

// Field of (1,1)-tensors, stored as the coordinate matrix T^i_j.
struct Tensor11Field {
  std::function<Eigen::MatrixXd(const Point&)> eval;
  std::function<Eigen::MatrixXd(const Point&, int)> partial;  // optional

  DerivProvenance provenance() const {
    return partial ? DerivProvenance::Analytic : DerivProvenance::FiniteDifference;
  }
};

// Field of symmetric bilinear forms g_ij.
struct SymBilinearField {
  std::function<Eigen::MatrixXd(const Point&)> eval;
  std::function<Eigen::MatrixXd(const Point&, int)> partial;  // optional

  DerivProvenance provenance() const {
    return partial ? DerivProvenance::Analytic : DerivProvenance::FiniteDifference;
  }
};

// Smooth invertible self-map of a chart. `differential` is the Jacobian of
// `forward`; when omitted it is recovered by finite differences.
struct DiffeoOnChart {
  std::function<Point(const Point&)> forward;
  std::function<Point(const Point&)> inverse;
  std::function<Eigen::MatrixXd(const Point&)> differential;

  static DiffeoOnChart identity(int d);
  // Composition a(b(x)) with chain-rule differential.
  static DiffeoOnChart compose(const DiffeoOnChart& a, const DiffeoOnChart& b);
  DiffeoOnChart inverted() const;
  // n-fold power; n may be negative (uses the inverse), n = 0 is identity.
  DiffeoOnChart power(int n, int dim) const;
};

// Max over a test grid of |inverse(forward(x)) - x|; used to validate the
// round-trip invariant of DiffeoOnChart instances.
double diffeo_roundtrip_error(const DiffeoOnChart& f, const ChartDomain& domain,
                              int per_axis = 7, double margin = 0.0);

namespace detail {

// Central-difference first derivative for any Eigen-like or scalar value
// type supporting a*x + b*y. Stencil legality has been checked by callers.
template <typename Fn>
auto central_difference(const Fn& fn, const Point& p, int axis, double h, int order)
    -> decltype(fn(p)) {
  Point q = p;
  if (order == 2) {
    q[axis] = p[axis] + h;
    auto fp = fn(q);
    q[axis] = p[axis] - h;
    auto fm = fn(q);
    return (fp - fm) / (2.0 * h);
  }
  q[axis] = p[axis] + 2.0 * h;
  auto fp2 = fn(q);
  q[axis] = p[axis] + h;
  auto fp1 = fn(q);
  q[axis] = p[axis] - h;
  auto fm1 = fn(q);
  q[axis] = p[axis] - 2.0 * h;
  auto fm2 = fn(q);
  return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
}

void require_stencil_inside(const ChartDomain& domain, const Point& p, int axis,
                            double h, int order);

}  // namespace detail

// Partial derivative of a field along one axis. Uses the analytic partial
// when the field carries one, otherwise a central difference whose stencil
// must stay inside the domain.
double fd_partial(const ScalarField& f, const ChartDomain& domain, const Point& p,
                  int axis, const FDConfig& cfg);
Eigen::MatrixXd fd_partial(const Tensor11Field& f, const ChartDomain& domain,
                           const Point& p, int axis, const FDConfig& cfg);
Eigen::MatrixXd fd_partial(const SymBilinearField& f, const ChartDomain& domain,
                           const Point& p, int axis, const FDConfig& cfg);

enum class QuadScheme { Trapezoid, Simpson };

// Tensor-product quadrature of f (optionally times a weight field) over the
// whole box. `per_axis` <= 0 uses the domain's grid_res; Simpson rounds the
// sample count up to the next odd value so each axis has an even interval
// count. Accumulation order is fixed (row-major, pairwise within chunks), so
// results are identical for every thread count.
double integrate_quadrature(const std::function<double(const Point&)>& f,
                            const ChartDomain& domain,
                            const std::function<double(const Point&)>& weight = nullptr,
                            QuadScheme scheme = QuadScheme::Trapezoid,
                            int per_axis = 0, int threads = 1);

}  // namespace projequiv
