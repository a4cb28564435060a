#include "projequiv/homography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace projequiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_projective_inf(double z) { return std::isinf(z); }

}  // namespace

const char* mobius_tag_name(MobiusTag tag) {
  switch (tag) {
    case MobiusTag::Identity: return "Identity";
    case MobiusTag::Elliptic: return "Elliptic";
    case MobiusTag::Parabolic: return "Parabolic";
    case MobiusTag::Hyperbolic: return "Hyperbolic";
  }
  return "Unknown";
}

Mobius Mobius::inverse() const {
  const double dt = det();
  if (dt == 0.0) throw ProjError(ErrorCode::SingularMobius, "cannot invert det = 0 matrix");
  return {d / dt, -b / dt, -c / dt, a / dt};
}

Mobius Mobius::pow(int n) const {
  if (n == 0) return identity();
  Mobius base = n > 0 ? *this : inverse();
  Mobius acc = base;
  for (int i = 1; i < std::abs(n); ++i) acc = acc * base;
  return acc;
}

Mobius Mobius::normalized() const {
  const double dt = det();
  if (dt == 0.0) throw ProjError(ErrorCode::SingularMobius, "cannot normalize det = 0 matrix");
  const double s = std::sqrt(std::abs(dt));
  return {a / s, b / s, c / s, d / s};
}

namespace {

// Real fixed points of z -> (az+b)/(cz+d) on the extended line. Scale
// invariant, so computed on the raw coefficients.
std::vector<double> fixed_points_of(const Mobius& m) {
  std::vector<double> out;
  if (m.c == 0.0) {
    out.push_back(kInf);  // infinity is fixed whenever c = 0
    if (m.a != m.d) out.push_back(m.b / (m.d - m.a));
    std::sort(out.begin(), out.end());
    return out;
  }
  // c z^2 + (d - a) z - b = 0
  const double disc = (m.d - m.a) * (m.d - m.a) + 4.0 * m.c * m.b;
  if (disc < 0.0) return out;  // complex pair, no real fixed points
  const double sq = std::sqrt(disc);
  if (disc == 0.0) {
    out.push_back((m.a - m.d) / (2.0 * m.c));
  } else {
    out.push_back(((m.a - m.d) - sq) / (2.0 * m.c));
    out.push_back(((m.a - m.d) + sq) / (2.0 * m.c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

MobiusTag tag_from_normalized_trace(double tr, double eps) {
  const double t = std::abs(tr);
  if (t < 2.0 - eps) return MobiusTag::Elliptic;
  if (t <= 2.0 + eps) return MobiusTag::Parabolic;
  return MobiusTag::Hyperbolic;
}

}  // namespace

MobiusClass classify(const Mobius& m, double eps) {
  const double dt = m.det();
  const double scale = std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d), 1e-300});
  if (std::abs(dt) < 1e-14 * scale * scale) {
    throw ProjError(ErrorCode::SingularMobius, "classification needs det != 0");
  }
  MobiusClass out;
  out.fixed_points = fixed_points_of(m);
  if (dt < 0.0) {
    out.orientation_reversing = true;
    out.tag = classify(m * m, eps).tag;  // square has positive determinant
    return out;
  }
  const Mobius n = m.normalized();
  if (std::abs(n.b) <= eps && std::abs(n.c) <= eps && std::abs(n.a - n.d) <= eps) {
    out.tag = MobiusTag::Identity;
    return out;
  }
  out.tag = tag_from_normalized_trace(n.trace(), eps);
  return out;
}

MobiusClass classify_exact(long long a, long long b, long long c, long long d) {
  const long long det = a * d - b * c;
  if (det == 0) throw ProjError(ErrorCode::SingularMobius, "classification needs det != 0");
  const Mobius m{static_cast<double>(a), static_cast<double>(b),
                 static_cast<double>(c), static_cast<double>(d)};
  MobiusClass out;
  out.fixed_points = fixed_points_of(m);
  if (det < 0) {
    out.orientation_reversing = true;
    // Square in exact integers; its determinant det^2 is positive.
    out.tag = classify_exact(a * a + b * c, b * (a + d), c * (a + d), d * d + b * c).tag;
    return out;
  }
  if (b == 0 && c == 0 && a == d) {
    out.tag = MobiusTag::Identity;
    return out;
  }
  // |tr|^2 vs 4 det of the unnormalized matrix is the exact trichotomy.
  const long long tr2 = (a + d) * (a + d);
  if (tr2 < 4 * det) out.tag = MobiusTag::Elliptic;
  else if (tr2 == 4 * det) out.tag = MobiusTag::Parabolic;
  else out.tag = MobiusTag::Hyperbolic;
  return out;
}

double act(const Mobius& m, double z) {
  if (is_projective_inf(z)) {
    return m.c == 0.0 ? kInf : m.a / m.c;
  }
  const double den = m.c * z + m.d;
  if (den == 0.0) return kInf;
  return (m.a * z + m.b) / den;
}

std::complex<double> act(const Mobius& m, std::complex<double> z) {
  if (std::isinf(z.real()) || std::isinf(z.imag())) {
    return m.c == 0.0 ? std::complex<double>(kInf, 0.0)
                      : std::complex<double>(m.a / m.c, 0.0);
  }
  const std::complex<double> den = m.c * z + m.d;
  if (std::abs(den) == 0.0) return {kInf, 0.0};
  return (m.a * z + m.b) / den;
}

Eigen::MatrixXd act(const Mobius& m, const Eigen::MatrixXd& X) {
  const int d = static_cast<int>(X.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd den = m.c * X + m.d * I;
  const double detden = den.determinant();
  if (std::abs(detden) < 1e-12 * std::max(1.0, std::pow(den.cwiseAbs().maxCoeff(), d))) {
    throw ProjError(ErrorCode::SingularTensor, "fiberwise Mobius action hit a pole");
  }
  return ((m.a * X + m.b * I) * den.inverse()).eval();
}

namespace {

struct PairFit {
  double u = 0.0, v = 0.0, residual = 0.0;
};

// Least squares for M(x) = u K(x) + v I over all samples.
PairFit fit_in_basis(const std::vector<Eigen::MatrixXd>& Ks,
                     const std::vector<Eigen::MatrixXd>& Ms) {
  const int d = static_cast<int>(Ks.front().rows());
  const Eigen::Index rows = static_cast<Eigen::Index>(Ks.size()) * d * d;
  Eigen::MatrixXd A(rows, 2);
  Eigen::VectorXd b(rows);
  Eigen::Index r = 0;
  for (std::size_t s = 0; s < Ks.size(); ++s) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        A(r, 0) = Ks[s](i, j);
        A(r, 1) = (i == j) ? 1.0 : 0.0;
        b(r) = Ms[s](i, j);
        ++r;
      }
    }
  }
  const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
  PairFit out;
  out.u = sol[0];
  out.v = sol[1];
  out.residual = (A * sol - b).norm() / std::max(b.norm(), 1e-12);
  return out;
}

}  // namespace

HomographyCoeffs solve_alpha_beta(const DiffeoOnChart& f, const LTensor& K,
                                  const Metric& g0, int per_axis, double margin) {
  const int d = g0.dim();
  const Tensor11Field Kf_field = strength_of(f, g0).K;
  const Tensor11Field pushed = push_forward(f, K.field);

  std::vector<Eigen::MatrixXd> Ks, Ms, Rhos, Kfs;
  double scalar_gap = 0.0, k_scale = 0.0;
  g0.domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    const Eigen::MatrixXd Kx = K.field.eval(x);
    const Eigen::MatrixXd Px = pushed.eval(x);
    const Eigen::MatrixXd Kfx = Kf_field.eval(x);
    scalar_gap = std::max(scalar_gap,
                          (Kx - (Kx.trace() / d) * Eigen::MatrixXd::Identity(d, d)).norm());
    k_scale = std::max(k_scale, Kx.norm());
    Ks.push_back(Kx);
    Ms.push_back((Px * Kx).eval());
    Rhos.push_back((Px * Kfx).eval());
    Kfs.push_back(Kfx);
  });
  if (scalar_gap < 1e-6 * std::max(1.0, k_scale)) {
    throw ProjError(ErrorCode::ScalarK, "K is (numerically) a scalar multiple of I on the grid");
  }

  const PairFit main_fit = fit_in_basis(Ks, Ms);
  const PairFit rho_fit = fit_in_basis(Ks, Rhos);
  const PairFit basis_fit = fit_in_basis(Ks, Kfs);
  HomographyCoeffs out;
  out.alpha = main_fit.u;
  out.beta = main_fit.v;
  out.rho_k_alpha = rho_fit.u;
  out.rho_k_beta = rho_fit.v;
  out.gamma = basis_fit.u;
  out.delta = basis_fit.v;
  out.residual = std::max({main_fit.residual, rho_fit.residual, basis_fit.residual});
  if (out.residual > 0.05) {
    throw ProjError(ErrorCode::BadFit,
                    "homography fit residual " + std::to_string(out.residual) +
                        " too large; the action does not close on span{K, I}");
  }
  return out;
}

double iterate_check(const DiffeoOnChart& f, const LTensor& K, const Metric& g0,
                     const Mobius& A, int n, int per_axis, double margin) {
  if (n < 0) throw ProjError(ErrorCode::BadArgument, "iterate check needs n >= 0");
  Tensor11Field pushed = K.field;
  for (int i = 0; i < n; ++i) pushed = push_forward(f, pushed);
  const Mobius An = n == 0 ? Mobius::identity() : A.pow(n);
  double worst = 0.0;
  g0.domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    const Eigen::MatrixXd lhs = pushed.eval(x);
    const Eigen::MatrixXd rhs = act(An, K.field.eval(x));
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  });
  return worst;
}

double multiplier_at(const Mobius& m, double fixed_point) {
  const double den = m.c * fixed_point + m.d;
  if (den == 0.0) throw ProjError(ErrorCode::BadArgument, "multiplier undefined at a pole");
  return m.det() / (den * den);
}

std::vector<double> product_limit(const Mobius& C, double z, int n_max) {
  if (n_max < 1) throw ProjError(ErrorCode::BadArgument, "product limit needs n_max >= 1");
  const MobiusClass cls = classify(C);
  if (cls.tag != MobiusTag::Hyperbolic || cls.orientation_reversing) {
    throw ProjError(ErrorCode::NotHyperbolic, "product limit needs a hyperbolic matrix");
  }
  if (cls.fixed_points.size() != 2 || is_projective_inf(cls.fixed_points[0]) ||
      is_projective_inf(cls.fixed_points[1])) {
    throw ProjError(ErrorCode::NotHyperbolic, "product limit needs two finite fixed points");
  }
  const double lm = cls.fixed_points[0];
  const double lp = cls.fixed_points[1];
  if (std::abs(lm) < 1e-15) {
    throw ProjError(ErrorCode::ZeroFixedPoint, "attracting fixed point at 0 cannot normalize");
  }
  if (std::abs(multiplier_at(C, lm)) >= 1.0) {
    throw ProjError(ErrorCode::NotHyperbolic, "smaller fixed point is not attracting");
  }
  if (z < lm - 1e-12 || z >= lp) {
    throw ProjError(ErrorCode::OutOfBasin, "seed z must lie in [lambda_minus, lambda_plus)");
  }

  std::vector<double> P;
  P.reserve(n_max);
  double running = z;  // k = 0 factor
  double zk = z;
  for (int n = 1; n <= n_max; ++n) {
    zk = act(C, zk);
    running *= zk / lm;
    P.push_back(running);
  }
  return P;
}

CorollaryReport corollary_inequalities(double lambda_minus, double lambda_plus,
                                       int d_minus, int d_plus) {
  if (!(lambda_minus > 0.0) || !(lambda_plus > 0.0)) {
    throw ProjError(ErrorCode::NonPositiveEigen, "corollary needs positive eigenvalues");
  }
  if (!(lambda_minus < lambda_plus)) {
    throw ProjError(ErrorCode::BadOrder, "corollary needs lambda_minus < lambda_plus");
  }
  if (d_minus < 0 || d_plus < 0) {
    throw ProjError(ErrorCode::BadArgument, "multiplicities must be nonnegative");
  }
  const double core = std::pow(lambda_minus, d_minus) * std::pow(lambda_plus, d_plus);
  CorollaryReport out;
  out.product_minus = core * lambda_minus;
  out.product_plus = core * lambda_plus;
  out.minus_leq_one = out.product_minus <= 1.0 + 1e-12;
  out.plus_geq_one = out.product_plus >= 1.0 - 1e-12;
  out.bracket = lambda_minus < 1.0 && 1.0 < lambda_plus;
  return out;
}

SectorDecomposition degenerate_sectors(const std::vector<Interval>& ranges) {
  if (ranges.empty()) throw ProjError(ErrorCode::EmptyInput, "sector merge needs at least one range");
  std::vector<Interval> sorted = ranges;
  for (const Interval& r : sorted) {
    if (!(r.lo <= r.hi)) throw ProjError(ErrorCode::BadArgument, "range with lo > hi");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  SectorDecomposition out;
  Interval cur = sorted.front();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lo <= cur.hi) {
      cur.hi = std::max(cur.hi, sorted[i].hi);  // overlap or touch: merge
    } else {
      out.sectors.push_back(cur);
      cur = sorted[i];
    }
  }
  out.sectors.push_back(cur);
  return out;
}

void SpectrumCloud::to_csv(std::ostream& os) const {
  if (samples.empty()) return;
  const int d = static_cast<int>(samples.front().source.size());
  os << "re,im";
  for (int i = 1; i <= d; ++i) os << ",x_" << i;
  os << "\n";
  char buf[64];
  auto put = [&](double v, bool lead_comma) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (lead_comma) os << ",";
    os << buf;
  };
  for (const SpectrumSample& s : samples) {
    put(s.value.real(), false);
    put(s.value.imag(), true);
    for (int i = 0; i < d; ++i) put(s.source[i], true);
    os << "\n";
  }
}

double SpectrumCloud::conjugation_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::complex<double> want = std::conj(samples[i].value);
    double best = kInf;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (samples[j].source != samples[i].source) continue;
      best = std::min(best, std::abs(samples[j].value - want));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

SpectrumCloud spectrum_cloud(const Tensor11Field& K, const ChartDomain& domain,
                             int per_axis, double margin) {
  SpectrumCloud cloud;
  domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(K.eval(x));
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      cloud.samples.push_back({es.eigenvalues()[i], x});
    }
  });
  return cloud;
}

namespace {

double multiset_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b) {
  const std::size_t n = a.size();
  if (n != b.size()) return kInf;
  auto dist = [](std::complex<double> u, std::complex<double> v) {
    const bool ui = std::isinf(u.real()), vi = std::isinf(v.real());
    if (ui || vi) return (ui && vi) ? 0.0 : kInf;
    return std::abs(u - v);
  };
  if (n <= 4) {
    // Optimal assignment: minimize the worst pairwise distance over all
    // permutations (n! <= 24).
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInf;
    do {
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, dist(a[i], b[perm[i]]));
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  // Greedy matching for higher dimensions.
  double worst = 0.0;
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double best = kInf;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double dd = dist(a[i], b[j]);
      if (dd < best) { best = dd; arg = j; }
    }
    used[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double spectral_equivariance(const DiffeoOnChart& f, const LTensor& K, const Mobius& A,
                             int n_points, std::uint64_t seed, double margin) {
  const Mobius Ainv = A.inverse();
  const ChartDomain& domain = K.base->domain;
  Rng rng(seed);
  double worst = 0.0;
  int used = 0;
  int draws = 0;
  while (used < n_points) {
    if (++draws > 50 * n_points) {
      throw ProjError(ErrorCode::OutOfDomain, "could not draw enough points with f(x) on-chart");
    }
    const Point x = domain.random_interior(rng, margin);
    const Point fx = f.forward(x);
    if (!domain.contains(fx)) continue;
    Eigen::EigenSolver<Eigen::MatrixXd> ex(K.field.eval(x));
    Eigen::EigenSolver<Eigen::MatrixXd> efx(K.field.eval(fx));
    std::vector<std::complex<double>> lhs, rhs;
    for (int i = 0; i < ex.eigenvalues().size(); ++i) {
      rhs.push_back(act(Ainv, std::complex<double>(ex.eigenvalues()[i])));
      lhs.push_back(efx.eigenvalues()[i]);
    }
    worst = std::max(worst, multiset_distance(lhs, rhs));
    ++used;
  }
  return worst;
}

DistortionFactors distortion_factors(double lambda_minus, double lambda_plus,
                                     double lambda_fx, int d_minus, int d_plus) {
  if (!(lambda_minus > 0.0) || !(lambda_plus > 0.0) || !(lambda_fx > 0.0)) {
    throw ProjError(ErrorCode::NonPositiveEigen, "distortion factors need positive eigen data");
  }
  if (d_minus < 0 || d_plus < 0) {
    throw ProjError(ErrorCode::BadArgument, "multiplicities must be nonnegative");
  }
  const double P = std::pow(lambda_minus, d_minus) * std::pow(lambda_plus, d_plus) * lambda_fx;
  const int d = d_minus + d_plus + 1;
  DistortionFactors out;
  out.zeta_minus_sq = P * lambda_minus;
  out.zeta_lambda_sq = P * lambda_fx;
  out.zeta_plus_sq = P * lambda_plus;
  out.jac_sq = std::pow(P, 1 + d);
  return out;
}

}  // namespace projequiv
