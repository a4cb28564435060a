#include "projequiv/models.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace projequiv {

namespace {

Point point1(double t) {
  Point p(1);
  p[0] = t;
  return p;
}

// Sampled min/max of a 1-variable field over an interval.
std::pair<double, double> sample_range(const ScalarField& f, const Interval& iv, int n) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    double t = iv.lo + iv.length() * static_cast<double>(i) / (n - 1);
    double v = f.eval(point1(t));
    if (!std::isfinite(v)) {
      throw ProjError(ErrorCode::NonFiniteSample,
                      "profile sample is not finite at t = " + std::to_string(t));
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::complex<double> cpow_int(std::complex<double> z, int n) {
  std::complex<double> out(1.0, 0.0);
  for (int i = 0; i < n; ++i) out *= z;
  return out;
}

Eigen::VectorXcd complex_block(const Point& p, int offset, int n) {
  Eigen::VectorXcd z(n);
  for (int a = 0; a < n; ++a) z[a] = std::complex<double>(p[offset + a], p[offset + n + a]);
  return z;
}

// Real coordinates (Re w, Im w) of a complex vector.
Point realify_vector(const Eigen::VectorXcd& w) {
  const int n = static_cast<int>(w.size());
  Point out(2 * n);
  out.head(n) = w.real();
  out.tail(n) = w.imag();
  return out;
}

// Real Jacobian block of a holomorphic map with respect to one complex input
// block: columns (u, v) of that block, rows (Re w, Im w).
Eigen::MatrixXd realify_jacobian_block(const Eigen::MatrixXcd& J) {
  const int rows = static_cast<int>(J.rows());
  const int cols = static_cast<int>(J.cols());
  Eigen::MatrixXd D(2 * rows, 2 * cols);
  D.topLeftCorner(rows, cols) = J.real();
  D.topRightCorner(rows, cols) = -J.imag();
  D.bottomLeftCorner(rows, cols) = J.imag();
  D.bottomRightCorner(rows, cols) = J.real();
  return D;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dini pair
// ---------------------------------------------------------------------------

DiniPair dini_pair(const ScalarField& X, const ScalarField& Y, const ChartDomain& domain) {
  if (domain.dim() != 2) {
    throw ProjError(ErrorCode::BadArgument, "dini_pair needs a 2-dimensional chart");
  }
  const int n = std::max(64, 4 * domain.grid_res());
  auto [xmin, xmax] = sample_range(X, domain.bounds(0), n);
  auto [ymin, ymax] = sample_range(Y, domain.bounds(1), n);
  (void)xmax;
  if (ymin <= 1e-9) {
    throw ProjError(ErrorCode::PositivityFailure,
                    "dini_pair: Y must stay positive, sampled min = " + std::to_string(ymin));
  }
  if (ymax >= xmin - 1e-9) {
    throw ProjError(ErrorCode::RangeOverlap,
                    "dini_pair: need sup Y < inf X, got sup Y = " + std::to_string(ymax) +
                        ", inf X = " + std::to_string(xmin));
  }

  const bool analytic = static_cast<bool>(X.partial) && static_cast<bool>(Y.partial);

  // g = (X - Y)(dx^2 + dy^2)
  SymBilinearField gf;
  gf.eval = [X, Y](const Point& p) -> Eigen::MatrixXd {
    double u = X.eval(point1(p[0])) - Y.eval(point1(p[1]));
    return u * Eigen::MatrixXd::Identity(2, 2);
  };
  if (analytic) {
    gf.partial = [X, Y](const Point& p, int axis) -> Eigen::MatrixXd {
      double du = axis == 0 ? X.partial(point1(p[0]), 0) : -Y.partial(point1(p[1]), 0);
      return du * Eigen::MatrixXd::Identity(2, 2);
    };
  }
  Metric g{gf, 2, 0, domain};

  // gbar = (1/Y - 1/X)(dx^2/X + dy^2/Y)
  SymBilinearField gbf;
  gbf.eval = [X, Y](const Point& p) -> Eigen::MatrixXd {
    double x = X.eval(point1(p[0]));
    double y = Y.eval(point1(p[1]));
    double A = 1.0 / y - 1.0 / x;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 2);
    G(0, 0) = A / x;
    G(1, 1) = A / y;
    return G;
  };
  if (analytic) {
    gbf.partial = [X, Y](const Point& p, int axis) -> Eigen::MatrixXd {
      double x = X.eval(point1(p[0]));
      double y = Y.eval(point1(p[1]));
      double A = 1.0 / y - 1.0 / x;
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 2);
      if (axis == 0) {
        double dx = X.partial(point1(p[0]), 0);
        G(0, 0) = (dx / (x * x)) * (1.0 / x - A);  // d/dx (A/X), dA/dx = X'/X^2
        G(1, 1) = (dx / (x * x)) / y;
      } else {
        double dy = Y.partial(point1(p[1]), 0);
        G(0, 0) = (-dy / (y * y)) / x;  // dA/dy = -Y'/Y^2
        G(1, 1) = (-dy / (y * y)) * (1.0 / y + A);
      }
      return G;
    };
  }
  Metric gbar{gbf, 2, 0, domain};

  // L = diag(X(x), Y(y)); g . F(L) recovers gbar.
  Tensor11Field Lf;
  Lf.eval = [X, Y](const Point& p) -> Eigen::MatrixXd {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2, 2);
    L(0, 0) = X.eval(point1(p[0]));
    L(1, 1) = Y.eval(point1(p[1]));
    return L;
  };
  if (analytic) {
    Lf.partial = [X, Y](const Point& p, int axis) -> Eigen::MatrixXd {
      Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
      if (axis == 0) {
        D(0, 0) = X.partial(point1(p[0]), 0);
      } else {
        D(1, 1) = Y.partial(point1(p[1]), 0);
      }
      return D;
    };
  }
  LTensor L = make_ltensor(Lf, g);

  return DiniPair{std::move(g), std::move(gbar), std::move(L), X, Y};
}

// ---------------------------------------------------------------------------
// Matveev involution example
// ---------------------------------------------------------------------------

MatveevExample matveev_example(const ScalarField& a, const ChartDomain& domain) {
  if (domain.dim() != 2) {
    throw ProjError(ErrorCode::BadArgument, "matveev_example needs a 2-dimensional chart");
  }
  if (domain.bounds(0).lo != domain.bounds(1).lo || domain.bounds(0).hi != domain.bounds(1).hi) {
    throw ProjError(ErrorCode::BadArgument,
                    "matveev_example: the coordinate swap needs a square chart");
  }
  const int n = std::max(64, 4 * domain.grid_res());
  auto [amin, amax] = sample_range(a, domain.bounds(0), n);
  (void)amax;
  if (amin <= 1.0 + 1e-9) {
    throw ProjError(ErrorCode::PositivityFailure,
                    "matveev_example: need a > 1 on the chart, sampled min = " +
                        std::to_string(amin));
  }

  const bool analytic = static_cast<bool>(a.partial);

  // g11 = (a(x) - 1/a(y)) sqrt(a(x)),  g22 = (a(x) - 1/a(y)) / sqrt(a(y))
  SymBilinearField gf;
  gf.eval = [a](const Point& p) -> Eigen::MatrixXd {
    double ax = a.eval(point1(p[0]));
    double ay = a.eval(point1(p[1]));
    double u = ax - 1.0 / ay;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 2);
    G(0, 0) = u * std::sqrt(ax);
    G(1, 1) = u / std::sqrt(ay);
    return G;
  };
  if (analytic) {
    gf.partial = [a](const Point& p, int axis) -> Eigen::MatrixXd {
      double ax = a.eval(point1(p[0]));
      double ay = a.eval(point1(p[1]));
      double u = ax - 1.0 / ay;
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 2);
      if (axis == 0) {
        double dax = a.partial(point1(p[0]), 0);
        G(0, 0) = dax * std::sqrt(ax) + u * dax / (2.0 * std::sqrt(ax));
        G(1, 1) = dax / std::sqrt(ay);
      } else {
        double day = a.partial(point1(p[1]), 0);
        double du = day / (ay * ay);  // d/dy (-1/a(y))
        G(0, 0) = du * std::sqrt(ax);
        G(1, 1) = du / std::sqrt(ay) - u * day / (2.0 * ay * std::sqrt(ay));
      }
      return G;
    };
  }
  Metric g{gf, 2, 0, domain};

  DiffeoOnChart sigma;
  sigma.forward = [](const Point& p) -> Point {
    Point q(2);
    q[0] = p[1];
    q[1] = p[0];
    return q;
  };
  sigma.inverse = sigma.forward;
  sigma.differential = [](const Point&) -> Eigen::MatrixXd {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 2);
    J(0, 1) = 1.0;
    J(1, 0) = 1.0;
    return J;
  };

  // K_sigma = diag(a(x), 1/a(y))
  Tensor11Field Kf;
  Kf.eval = [a](const Point& p) -> Eigen::MatrixXd {
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2, 2);
    K(0, 0) = a.eval(point1(p[0]));
    K(1, 1) = 1.0 / a.eval(point1(p[1]));
    return K;
  };
  if (analytic) {
    Kf.partial = [a](const Point& p, int axis) -> Eigen::MatrixXd {
      Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
      if (axis == 0) {
        D(0, 0) = a.partial(point1(p[0]), 0);
      } else {
        double ay = a.eval(point1(p[1]));
        D(1, 1) = -a.partial(point1(p[1]), 0) / (ay * ay);
      }
      return D;
    };
  }
  LTensor K = make_ltensor(Kf, g);

  return MatveevExample{std::move(g), std::move(sigma), a, std::move(K)};
}

// ---------------------------------------------------------------------------
// Constant curvature charts
// ---------------------------------------------------------------------------

Metric constant_curvature_chart(int d, int kappa) {
  if (d < 1 || (kappa != 0 && d < 2)) {
    throw ProjError(ErrorCode::BadArgument,
                    "constant_curvature_chart: need d >= 1 (d >= 2 for curved charts)");
  }
  if (kappa == 0) {
    ChartDomain dom(std::vector<Interval>(d, Interval{-1.0, 1.0}), 33);
    SymBilinearField f;
    f.eval = [d](const Point&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(d, d); };
    f.partial = [d](const Point&, int) -> Eigen::MatrixXd {
      return Eigen::MatrixXd::Zero(d, d);
    };
    return Metric{f, d, 0, dom};
  }
  if (kappa == 1) {
    // Stereographic chart: g = 4 / (1 + |x|^2)^2 Id, curvature +1.
    ChartDomain dom(std::vector<Interval>(d, Interval{-0.8, 0.8}), 33);
    SymBilinearField f;
    f.eval = [d](const Point& x) -> Eigen::MatrixXd {
      double s = 1.0 + x.squaredNorm();
      return (4.0 / (s * s)) * Eigen::MatrixXd::Identity(d, d);
    };
    f.partial = [d](const Point& x, int axis) -> Eigen::MatrixXd {
      double s = 1.0 + x.squaredNorm();
      return (-16.0 * x[axis] / (s * s * s)) * Eigen::MatrixXd::Identity(d, d);
    };
    return Metric{f, d, 0, dom};
  }
  if (kappa == -1) {
    // Half-space chart: g = Id / x_d^2, curvature -1.
    std::vector<Interval> bounds(d, Interval{-0.6, 0.6});
    bounds[d - 1] = Interval{0.6, 1.8};
    ChartDomain dom(std::move(bounds), 33);
    SymBilinearField f;
    f.eval = [d](const Point& x) -> Eigen::MatrixXd {
      double h = x[d - 1];
      return (1.0 / (h * h)) * Eigen::MatrixXd::Identity(d, d);
    };
    f.partial = [d](const Point& x, int axis) -> Eigen::MatrixXd {
      if (axis != d - 1) return Eigen::MatrixXd::Zero(d, d);
      double h = x[d - 1];
      return (-2.0 / (h * h * h)) * Eigen::MatrixXd::Identity(d, d);
    };
    return Metric{f, d, 0, dom};
  }
  throw ProjError(ErrorCode::BadArgument, "constant_curvature_chart: kappa must be -1, 0, or 1");
}

// ---------------------------------------------------------------------------
// Fubini-Study metric
// ---------------------------------------------------------------------------

Metric fubini_study(int n, int chart, double half_width, int grid_res) {
  if (n < 1) throw ProjError(ErrorCode::BadArgument, "fubini_study: need n >= 1");
  if (chart < 0 || chart > n) {
    throw ProjError(ErrorCode::BadArgument, "fubini_study: chart index out of range");
  }
  if (!(half_width > 0.0)) {
    throw ProjError(ErrorCode::BadArgument, "fubini_study: half_width must be positive");
  }
  ChartDomain dom(std::vector<Interval>(2 * n, Interval{-half_width, half_width}), grid_res);

  SymBilinearField f;
  f.eval = [n](const Point& p) -> Eigen::MatrixXd {
    Eigen::VectorXcd z = complex_block(p, 0, n);
    double s = 1.0 + z.squaredNorm();
    // h_{ab} = [s delta_ab - conj(z_a) z_b] / s^2
    Eigen::MatrixXcd H =
        (s * Eigen::MatrixXcd::Identity(n, n) - z.conjugate() * z.transpose()) / (s * s);
    Eigen::MatrixXd A = H.real();
    Eigen::MatrixXd B = H.imag();
    Eigen::MatrixXd G(2 * n, 2 * n);
    G.topLeftCorner(n, n) = 2.0 * A;
    G.topRightCorner(n, n) = 2.0 * B;
    G.bottomLeftCorner(n, n) = -2.0 * B;
    G.bottomRightCorner(n, n) = 2.0 * A;
    return G;
  };
  return Metric{f, 2 * n, 0, dom};
}

// ---------------------------------------------------------------------------
// Chart maps and pullbacks
// ---------------------------------------------------------------------------

Eigen::MatrixXd ChartMap::jacobian(const Point& x, const FDConfig& cfg) const {
  if (differential) return differential(x);
  cfg.validate();
  Eigen::MatrixXd D(dim_out, dim_in);
  for (int a = 0; a < dim_in; ++a) {
    D.col(a) = detail::central_difference(eval, x, a, cfg.step, cfg.order);
  }
  return D;
}

ChartMap compose(const ChartMap& outer, const ChartMap& inner) {
  if (outer.dim_in != inner.dim_out) {
    throw ProjError(ErrorCode::BadArgument, "compose: inner output dim != outer input dim");
  }
  ChartMap out;
  out.dim_in = inner.dim_in;
  out.dim_out = outer.dim_out;
  out.eval = [outer, inner](const Point& x) -> Point { return outer.eval(inner.eval(x)); };
  out.differential = [outer, inner](const Point& x) -> Eigen::MatrixXd {
    Point mid = inner.eval(x);
    return outer.jacobian(mid) * inner.jacobian(x);
  };
  return out;
}

ChartMap product_map(const ChartMap& f, const ChartMap& g) {
  ChartMap out;
  out.dim_in = f.dim_in + g.dim_in;
  out.dim_out = f.dim_out + g.dim_out;
  out.eval = [f, g](const Point& x) -> Point {
    Point y(f.dim_out + g.dim_out);
    y.head(f.dim_out) = f.eval(x.head(f.dim_in));
    y.tail(g.dim_out) = g.eval(x.tail(g.dim_in));
    return y;
  };
  out.differential = [f, g](const Point& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(f.dim_out + g.dim_out, f.dim_in + g.dim_in);
    D.topLeftCorner(f.dim_out, f.dim_in) = f.jacobian(x.head(f.dim_in));
    D.bottomRightCorner(g.dim_out, g.dim_in) = g.jacobian(x.tail(g.dim_in));
    return D;
  };
  return out;
}

Metric pullback_metric(const ChartMap& phi, const Metric& target,
                       const ChartDomain& source_domain) {
  if (phi.dim_in != source_domain.dim() || phi.dim_out != target.dim()) {
    throw ProjError(ErrorCode::BadArgument, "pullback_metric: dimension mismatch");
  }
  SymBilinearField f;
  f.eval = [phi, target](const Point& x) -> Eigen::MatrixXd {
    Point y = phi.eval(x);
    target.domain.require_inside(y);
    Eigen::MatrixXd D = phi.jacobian(x);
    Eigen::MatrixXd M = D.transpose() * target.eval(y) * D;
    return 0.5 * (M + M.transpose());
  };

  // Infer the signature at the chart center.
  Eigen::MatrixXd G0 = f.eval(source_domain.center());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G0);
  double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  int pos = 0, neg = 0;
  for (int i = 0; i < G0.rows(); ++i) {
    double ev = es.eigenvalues()[i];
    if (std::abs(ev) <= 1e-10 * std::max(1.0, scale)) {
      throw ProjError(ErrorCode::SingularMetric,
                      "pullback_metric: degenerate pullback at the chart center");
    }
    (ev > 0.0 ? pos : neg) += 1;
  }
  return Metric{f, pos, neg, source_domain};
}

Metric direct_sum_metric(const Metric& g1, const Metric& g2) {
  const int d1 = g1.dim();
  const int d2 = g2.dim();
  std::vector<Interval> bounds;
  bounds.reserve(d1 + d2);
  for (int i = 0; i < d1; ++i) bounds.push_back(g1.domain.bounds(i));
  for (int i = 0; i < d2; ++i) bounds.push_back(g2.domain.bounds(i));
  ChartDomain dom(std::move(bounds), std::max(g1.domain.grid_res(), g2.domain.grid_res()));

  SymBilinearField f;
  f.eval = [g1, g2, d1, d2](const Point& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d1 + d2, d1 + d2);
    G.topLeftCorner(d1, d1) = g1.eval(x.head(d1));
    G.bottomRightCorner(d2, d2) = g2.eval(x.tail(d2));
    return G;
  };
  if (g1.g.partial && g2.g.partial) {
    f.partial = [g1, g2, d1, d2](const Point& x, int axis) -> Eigen::MatrixXd {
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d1 + d2, d1 + d2);
      if (axis < d1) {
        G.topLeftCorner(d1, d1) = g1.g.partial(x.head(d1), axis);
      } else {
        G.bottomRightCorner(d2, d2) = g2.g.partial(x.tail(d2), axis - d1);
      }
      return G;
    };
  }
  return Metric{f, g1.p + g2.p, g1.q + g2.q, dom};
}

// ---------------------------------------------------------------------------
// Veronese and Segre embeddings
// ---------------------------------------------------------------------------

namespace {

// Multi-indices (i_0, ..., i_slots-1) with sum `total`, first entry
// descending; the leading index is (total, 0, ..., 0).
void enumerate_indices(int slots, int total, std::vector<int>& prefix,
                       std::vector<std::vector<int>>& out) {
  if (slots == 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    prefix.push_back(first);
    enumerate_indices(slots - 1, total - first, prefix, out);
    prefix.pop_back();
  }
}

double multinomial_sqrt(int k, const std::vector<int>& I) {
  double v = 1.0;
  for (int i = 2; i <= k; ++i) v *= i;
  for (int ij : I) {
    for (int i = 2; i <= ij; ++i) v /= i;
  }
  return std::sqrt(v);
}

}  // namespace

VeroneseMap veronese(int d, int k) {
  if (d < 1 || k < 1) throw ProjError(ErrorCode::BadArgument, "veronese: need d >= 1, k >= 1");

  std::vector<std::vector<int>> indices;
  std::vector<int> prefix;
  enumerate_indices(d + 1, k, prefix, indices);
  const int N = static_cast<int>(indices.size()) - 1;  // binom(d + k, k) - 1

  std::vector<double> coeff(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) coeff[i] = multinomial_sqrt(k, indices[i]);

  ChartMap map;
  map.dim_in = 2 * d;
  map.dim_out = 2 * N;
  map.eval = [d, N, indices, coeff](const Point& p) -> Point {
    Eigen::VectorXcd z = complex_block(p, 0, d);
    Eigen::VectorXcd w(N);
    for (int i = 1; i <= N; ++i) {
      const std::vector<int>& I = indices[static_cast<std::size_t>(i)];
      std::complex<double> v(coeff[static_cast<std::size_t>(i)], 0.0);
      for (int a = 1; a <= d; ++a) v *= cpow_int(z[a - 1], I[static_cast<std::size_t>(a)]);
      w[i - 1] = v;  // z_0 = 1 in the affine chart
    }
    return realify_vector(w);
  };
  map.differential = [d, N, indices, coeff](const Point& p) -> Eigen::MatrixXd {
    Eigen::VectorXcd z = complex_block(p, 0, d);
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(N, d);
    for (int i = 1; i <= N; ++i) {
      const std::vector<int>& I = indices[static_cast<std::size_t>(i)];
      for (int a = 1; a <= d; ++a) {
        int ia = I[static_cast<std::size_t>(a)];
        if (ia == 0) continue;
        std::complex<double> v(coeff[static_cast<std::size_t>(i)] * ia, 0.0);
        for (int b = 1; b <= d; ++b) {
          int e = I[static_cast<std::size_t>(b)] - (b == a ? 1 : 0);
          v *= cpow_int(z[b - 1], e);
        }
        J(i - 1, a - 1) = v;
      }
    }
    return realify_jacobian_block(J);
  };

  return VeroneseMap{d, k, N, std::move(map)};
}

SegreMap segre(int m, int n) {
  if (m < 1 || n < 1) throw ProjError(ErrorCode::BadArgument, "segre: need m >= 1, n >= 1");
  const int N = (m + 1) * (n + 1) - 1;

  ChartMap map;
  map.dim_in = 2 * (m + n);
  map.dim_out = 2 * N;
  map.eval = [m, n, N](const Point& p) -> Point {
    Eigen::VectorXcd z = complex_block(p, 0, m);
    Eigen::VectorXcd zeta = complex_block(p, 2 * m, n);
    Eigen::VectorXcd Z(m + 1), W(n + 1);
    Z[0] = 1.0;
    Z.tail(m) = z;
    W[0] = 1.0;
    W.tail(n) = zeta;
    Eigen::VectorXcd w(N);
    int idx = 0;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= n; ++j) {
        if (i == 0 && j == 0) continue;
        w[idx++] = Z[i] * W[j];
      }
    }
    return realify_vector(w);
  };
  map.differential = [m, n, N](const Point& p) -> Eigen::MatrixXd {
    Eigen::VectorXcd z = complex_block(p, 0, m);
    Eigen::VectorXcd zeta = complex_block(p, 2 * m, n);
    Eigen::VectorXcd Z(m + 1), W(n + 1);
    Z[0] = 1.0;
    Z.tail(m) = z;
    W[0] = 1.0;
    W.tail(n) = zeta;
    Eigen::MatrixXcd Jz = Eigen::MatrixXcd::Zero(N, m);
    Eigen::MatrixXcd Jzeta = Eigen::MatrixXcd::Zero(N, n);
    int idx = 0;
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= n; ++j) {
        if (i == 0 && j == 0) continue;
        if (i >= 1) Jz(idx, i - 1) = W[j];
        if (j >= 1) Jzeta(idx, j - 1) = Z[i];
        ++idx;
      }
    }
    Eigen::MatrixXd Dz = realify_jacobian_block(Jz);
    Eigen::MatrixXd Dzeta = realify_jacobian_block(Jzeta);
    Eigen::MatrixXd D(2 * N, 2 * (m + n));
    D.leftCols(2 * m) = Dz;
    D.rightCols(2 * n) = Dzeta;
    return D;
  };

  return SegreMap{m, n, N, std::move(map)};
}

// ---------------------------------------------------------------------------
// Named models
// ---------------------------------------------------------------------------

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ScalarField profile_sin(double c0, double amp) {
  ScalarField f;
  f.eval = [c0, amp](const Point& p) { return c0 + amp * std::sin(p[0]); };
  f.partial = [amp](const Point& p, int) { return amp * std::cos(p[0]); };
  return f;
}

ScalarField profile_const(double c0) {
  ScalarField f;
  f.eval = [c0](const Point&) { return c0; };
  f.partial = [](const Point&, int) { return 0.0; };
  return f;
}

Metric warped_default() {
  // dr^2 + sin^2(r) g_sphere: a polar chart of the round 3-sphere.
  ScalarField delta;
  delta.eval = [](const Point& p) {
    double s = std::sin(p[0]);
    return s * s;
  };
  delta.partial = [](const Point& p, int) { return std::sin(2.0 * p[0]); };
  return warped_product_metric(delta, Interval{0.4, 2.7}, constant_curvature_chart(2, 1));
}

Metric perturbed3() {
  // (1 + 0.1 x_1^2) times the spherical chart metric: not projectively flat.
  Metric base = constant_curvature_chart(3, 1);
  SymBilinearField f;
  f.eval = [base](const Point& x) -> Eigen::MatrixXd {
    return (1.0 + 0.1 * x[0] * x[0]) * base.eval(x);
  };
  f.partial = [base](const Point& x, int axis) -> Eigen::MatrixXd {
    double c = 1.0 + 0.1 * x[0] * x[0];
    Eigen::MatrixXd D = c * base.g.partial(x, axis);
    if (axis == 0) D += 0.2 * x[0] * base.eval(x);
    return D;
  };
  return Metric{f, 3, 0, base.domain};
}

}  // namespace

DiniPair dini_default() {
  ChartDomain dom(std::vector<Interval>(2, Interval{0.0, kTwoPi}), 33);
  return dini_pair(profile_sin(4.0, 1.0), profile_sin(1.5, 0.4), dom);
}

DiniPair dini_constant() {
  ChartDomain dom(std::vector<Interval>(2, Interval{0.0, kTwoPi}), 33);
  return dini_pair(profile_const(4.0), profile_const(1.5), dom);
}

MatveevExample matveev_default() {
  ChartDomain dom(std::vector<Interval>(2, Interval{0.0, kTwoPi}), 33);
  return matveev_example(profile_sin(3.0, 1.0), dom);
}

Metric model_metric(const std::string& id) {
  static const std::map<std::string, std::function<Metric()>> registry = {
      {"flat:2", [] { return constant_curvature_chart(2, 0); }},
      {"flat:3", [] { return constant_curvature_chart(3, 0); }},
      {"sphere:2", [] { return constant_curvature_chart(2, 1); }},
      {"sphere:3", [] { return constant_curvature_chart(3, 1); }},
      {"hyperbolic:2", [] { return constant_curvature_chart(2, -1); }},
      {"dini:default", [] { return dini_default().g; }},
      {"dini:bar", [] { return dini_default().g_bar; }},
      {"dini:constant", [] { return dini_constant().g; }},
      {"matveev:default", [] { return matveev_default().g; }},
      {"fs:1", [] { return fubini_study(1); }},
      {"fs:2", [] { return fubini_study(2); }},
      {"warped:default", [] { return warped_default(); }},
      {"perturbed:3", [] { return perturbed3(); }},
  };
  auto it = registry.find(id);
  if (it == registry.end()) {
    std::ostringstream os;
    os << "unknown model id '" << id << "'; known ids:";
    for (const auto& [name, fn] : registry) os << ' ' << name;
    throw ProjError(ErrorCode::BadArgument, os.str());
  }
  return it->second();
}

std::vector<std::string> model_ids() {
  std::vector<std::string> ids = {"flat:2",       "flat:3",         "sphere:2",
                                  "sphere:3",     "hyperbolic:2",   "dini:default",
                                  "dini:bar",     "dini:constant",  "matveev:default",
                                  "fs:1",         "fs:2",           "warped:default",
                                  "perturbed:3"};
  return ids;
}

}  // namespace projequiv
