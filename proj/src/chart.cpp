#include "projequiv/chart.hpp"

#include <cmath>
#include <sstream>

#include "projequiv/parallel.hpp"

namespace projequiv {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ProjError(ErrorCode::NonFiniteSample, std::string(what) + " produced a non-finite value");
  }
}

std::string point_str(const Point& p) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

}  // namespace

void FDConfig::validate() const {
  if (!(step >= 1e-8 && step <= 1e-1) || !(step2 >= 1e-8 && step2 <= 1e-1)) {
    throw ProjError(ErrorCode::BadArgument, "FD step must lie in [1e-8, 1e-1]");
  }
  if (order != 2 && order != 4) {
    throw ProjError(ErrorCode::BadArgument, "FD order must be 2 or 4");
  }
}

double fd_margin(const FDConfig& cfg) {
  return 2.0 * (cfg.step + cfg.step2) * 1.000001;
}

ChartDomain::ChartDomain(std::vector<Interval> bounds, int grid_res)
    : bounds_(std::move(bounds)), grid_res_(grid_res) {
  if (bounds_.empty()) throw ProjError(ErrorCode::BadArgument, "chart needs at least one axis");
  for (const Interval& b : bounds_) {
    if (!(b.lo < b.hi)) throw ProjError(ErrorCode::BadArgument, "chart interval must have lo < hi");
  }
  if (grid_res_ < 2) throw ProjError(ErrorCode::BadArgument, "grid_res must be at least 2");
}

bool ChartDomain::contains(const Point& p, double margin) const {
  if (p.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (!bounds_[i].contains(p[i], margin)) return false;
  }
  return true;
}

void ChartDomain::require_inside(const Point& p, double margin) const {
  if (!contains(p, margin)) {
    throw ProjError(ErrorCode::OutOfDomain, "point " + point_str(p) + " outside chart box");
  }
}

Point ChartDomain::center() const {
  Point c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = 0.5 * (bounds_[i].lo + bounds_[i].hi);
  return c;
}

double ChartDomain::box_volume() const {
  double v = 1.0;
  for (const Interval& b : bounds_) v *= b.length();
  return v;
}

std::vector<double> ChartDomain::axis_grid(int axis, int n, double margin) const {
  const Interval& b = bounds_.at(axis);
  const double lo = b.lo + margin;
  const double hi = b.hi - margin;
  if (n < 1 || !(lo <= hi)) {
    throw ProjError(ErrorCode::BadArgument, "axis grid needs n >= 1 and margin < half-width");
  }
  std::vector<double> xs(n);
  if (n == 1) {
    xs[0] = 0.5 * (lo + hi);
    return xs;
  }
  const double dx = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) xs[i] = lo + i * dx;
  return xs;
}

void ChartDomain::for_each_grid_point(
    int per_axis, double margin, const std::function<void(const Point&)>& fn) const {
  const int d = dim();
  std::vector<std::vector<double>> axes(d);
  for (int i = 0; i < d; ++i) axes[i] = axis_grid(i, per_axis, margin);
  std::vector<int> idx(d, 0);
  Point p(d);
  for (;;) {
    for (int i = 0; i < d; ++i) p[i] = axes[i][idx[i]];
    fn(p);
    int axis = d - 1;
    while (axis >= 0 && ++idx[axis] == per_axis) idx[axis--] = 0;
    if (axis < 0) break;
  }
}

Point ChartDomain::random_interior(Rng& rng, double margin) const {
  Point p(dim());
  for (int i = 0; i < dim(); ++i) {
    p[i] = rng.uniform(bounds_[i].lo + margin, bounds_[i].hi - margin);
  }
  return p;
}

DiffeoOnChart DiffeoOnChart::identity(int d) {
  DiffeoOnChart f;
  f.forward = [](const Point& p) { return p; };
  f.inverse = [](const Point& p) { return p; };
  f.differential = [d](const Point&) { return Eigen::MatrixXd::Identity(d, d).eval(); };
  return f;
}

DiffeoOnChart DiffeoOnChart::compose(const DiffeoOnChart& a, const DiffeoOnChart& b) {
  DiffeoOnChart f;
  f.forward = [a, b](const Point& p) { return a.forward(b.forward(p)); };
  f.inverse = [a, b](const Point& p) { return b.inverse(a.inverse(p)); };
  if (a.differential && b.differential) {
    f.differential = [a, b](const Point& p) {
      const Point mid = b.forward(p);
      return (a.differential(mid) * b.differential(p)).eval();
    };
  }
  return f;
}

DiffeoOnChart DiffeoOnChart::inverted() const {
  DiffeoOnChart f;
  f.forward = inverse;
  f.inverse = forward;
  if (differential) {
    const auto fwd_diff = differential;
    const auto inv = inverse;
    f.differential = [fwd_diff, inv](const Point& p) {
      const Eigen::MatrixXd J = fwd_diff(inv(p));
      return J.inverse().eval();
    };
  }
  return f;
}

DiffeoOnChart DiffeoOnChart::power(int n, int dim) const {
  if (n == 0) return identity(dim);
  const DiffeoOnChart base = (n > 0) ? *this : this->inverted();
  DiffeoOnChart acc = base;
  for (int i = 1; i < std::abs(n); ++i) acc = compose(base, acc);
  return acc;
}

double diffeo_roundtrip_error(const DiffeoOnChart& f, const ChartDomain& domain,
                              int per_axis, double margin) {
  double worst = 0.0;
  domain.for_each_grid_point(per_axis, margin, [&](const Point& p) {
    const Point q = f.inverse(f.forward(p));
    worst = std::max(worst, (q - p).cwiseAbs().maxCoeff());
  });
  return worst;
}

namespace detail {

void require_stencil_inside(const ChartDomain& domain, const Point& p, int axis,
                            double h, int order) {
  const double reach = (order == 4 ? 2.0 : 1.0) * h;
  Point q = p;
  q[axis] = p[axis] + reach;
  if (!domain.contains(q)) throw ProjError(ErrorCode::OutOfDomain, "FD stencil leaves chart box");
  q[axis] = p[axis] - reach;
  if (!domain.contains(q)) throw ProjError(ErrorCode::OutOfDomain, "FD stencil leaves chart box");
}

}  // namespace detail

double fd_partial(const ScalarField& f, const ChartDomain& domain, const Point& p,
                  int axis, const FDConfig& cfg) {
  cfg.validate();
  domain.require_inside(p);
  if (f.partial) {
    const double v = f.partial(p, axis);
    require_finite(v, "analytic partial");
    return v;
  }
  detail::require_stencil_inside(domain, p, axis, cfg.step, cfg.order);
  const double v = detail::central_difference(f.eval, p, axis, cfg.step, cfg.order);
  require_finite(v, "finite-difference partial");
  return v;
}

namespace {

Eigen::MatrixXd matrix_partial(const std::function<Eigen::MatrixXd(const Point&)>& eval,
                               const std::function<Eigen::MatrixXd(const Point&, int)>& partial,
                               const ChartDomain& domain, const Point& p, int axis,
                               const FDConfig& cfg) {
  cfg.validate();
  domain.require_inside(p);
  Eigen::MatrixXd v;
  if (partial) {
    v = partial(p, axis);
  } else {
    detail::require_stencil_inside(domain, p, axis, cfg.step, cfg.order);
    v = detail::central_difference(eval, p, axis, cfg.step, cfg.order);
  }
  if (!v.allFinite()) {
    throw ProjError(ErrorCode::NonFiniteSample, "matrix partial produced a non-finite value");
  }
  return v;
}

}  // namespace

Eigen::MatrixXd fd_partial(const Tensor11Field& f, const ChartDomain& domain,
                           const Point& p, int axis, const FDConfig& cfg) {
  return matrix_partial(f.eval, f.partial, domain, p, axis, cfg);
}

Eigen::MatrixXd fd_partial(const SymBilinearField& f, const ChartDomain& domain,
                           const Point& p, int axis, const FDConfig& cfg) {
  return matrix_partial(f.eval, f.partial, domain, p, axis, cfg);
}

namespace {

// Composite 1-d quadrature weights on n evenly spaced samples.
std::vector<double> quad_weights(QuadScheme scheme, int n, double dx) {
  std::vector<double> w(n, dx);
  if (scheme == QuadScheme::Trapezoid) {
    w.front() = 0.5 * dx;
    w.back() = 0.5 * dx;
    return w;
  }
  // Simpson: n is odd, interval count even.
  for (int i = 0; i < n; ++i) {
    double c = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] = c * dx / 3.0;
  }
  return w;
}

}  // namespace

double integrate_quadrature(const std::function<double(const Point&)>& f,
                            const ChartDomain& domain,
                            const std::function<double(const Point&)>& weight,
                            QuadScheme scheme, int per_axis, int threads) {
  int n = per_axis > 0 ? per_axis : domain.grid_res();
  if (scheme == QuadScheme::Simpson && n % 2 == 0) ++n;  // need an even interval count
  if (n < 2) throw ProjError(ErrorCode::BadArgument, "quadrature needs at least 2 samples per axis");

  const int d = domain.dim();
  std::vector<std::vector<double>> axes(d), axw(d);
  for (int i = 0; i < d; ++i) {
    axes[i] = domain.axis_grid(i, n, 0.0);
    axw[i] = quad_weights(scheme, n, domain.bounds(i).length() / (n - 1));
  }

  // Flatten the outermost axis so chunks can run in parallel; each slice
  // accumulates pairwise in fixed order and slices combine sequentially.
  const std::size_t outer = static_cast<std::size_t>(n);
  std::vector<double> slice_sum(outer, 0.0);
  parallel_for(outer, threads, [&](std::size_t i0) {
    std::vector<int> idx(d, 0);
    idx[0] = static_cast<int>(i0);
    Point p(d);
    std::vector<double> terms;
    if (d == 1) {
      p[0] = axes[0][idx[0]];
      double v = f(p);
      require_finite(v, "quadrature integrand");
      if (weight) {
        const double w = weight(p);
        require_finite(w, "quadrature weight");
        v *= w;
      }
      slice_sum[i0] = v * axw[0][idx[0]];
      return;
    }
    terms.reserve(static_cast<std::size_t>(std::pow(static_cast<double>(n), d - 1)));
    for (;;) {
      double wprod = 1.0;
      for (int a = 0; a < d; ++a) {
        p[a] = axes[a][idx[a]];
        wprod *= axw[a][idx[a]];
      }
      double v = f(p);
      require_finite(v, "quadrature integrand");
      if (weight) {
        const double w = weight(p);
        require_finite(w, "quadrature weight");
        v *= w;
      }
      terms.push_back(v * wprod);
      int axis = d - 1;
      while (axis >= 1 && ++idx[axis] == n) idx[axis--] = 0;
      if (axis < 1) break;
    }
    slice_sum[i0] = pairwise_sum(terms);
  });
  return pairwise_sum(slice_sum);
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::SingularTensor: return "SingularTensor";
    case ErrorCode::SingularMobius: return "SingularMobius";
    case ErrorCode::NegativeDetRoot: return "NegativeDetRoot";
    case ErrorCode::DegeneratePlane: return "DegeneratePlane";
    case ErrorCode::DegenerateVelocity: return "DegenerateVelocity";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NonPositiveWarp: return "NonPositiveWarp";
    case ErrorCode::NearDegenerate: return "NearDegenerate";
    case ErrorCode::ScalarK: return "ScalarK";
    case ErrorCode::BadFit: return "BadFit";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::ZeroFixedPoint: return "ZeroFixedPoint";
    case ErrorCode::OutOfBasin: return "OutOfBasin";
    case ErrorCode::BadOrder: return "BadOrder";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::RangeOverlap: return "RangeOverlap";
    case ErrorCode::PositivityFailure: return "PositivityFailure";
    case ErrorCode::NonPositiveEigen: return "NonPositiveEigen";
    case ErrorCode::DimensionTooLow: return "DimensionTooLow";
    case ErrorCode::BadArgument: return "BadArgument";
  }
  return "UnknownError";
}

}  // namespace projequiv
