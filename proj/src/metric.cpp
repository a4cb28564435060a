#include "projequiv/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace projequiv {

namespace {

void require_finite_matrix(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw ProjError(ErrorCode::NonFiniteSample, std::string(what) + " produced a non-finite value");
  }
}

}  // namespace

Eigen::MatrixXd Metric::eval(const Point& x) const {
  Eigen::MatrixXd G = g.eval(x);
  require_finite_matrix(G, "metric");
  return G;
}

Eigen::MatrixXd Metric::partial(const Point& x, int axis, const FDConfig& cfg) const {
  return fd_partial(g, domain, x, axis, cfg);
}

Eigen::MatrixXd Metric::inverse_at(const Point& x) const {
  const Eigen::MatrixXd G = eval(x);
  const double det = G.determinant();
  const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if (std::abs(det) < 1e-10 * std::pow(scale, G.rows())) {
    throw ProjError(ErrorCode::SingularMetric, "metric determinant below cutoff");
  }
  return G.inverse();
}

void validate_signature(const Metric& m, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    const Point x = m.domain.random_interior(rng, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.eval(x));
    int pos = 0, neg = 0;
    for (int i = 0; i < m.dim(); ++i) {
      const double ev = es.eigenvalues()[i];
      if (ev > 1e-12) ++pos;
      else if (ev < -1e-12) ++neg;
    }
    if (pos != m.p || neg != m.q) {
      throw ProjError(ErrorCode::SingularMetric,
                      "metric signature mismatch or degeneracy at a sampled point");
    }
  }
}

Eigen::VectorXd Christoffels::contract(const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d_);
  for (int k = 0; k < d_; ++k) {
    double s = 0.0;
    for (int i = 0; i < d_; ++i) {
      for (int j = 0; j < d_; ++j) s += (*this)(k, i, j) * u[i] * v[j];
    }
    out[k] = s;
  }
  return out;
}

ChristoffelField christoffel(const Metric& m, const FDConfig& cfg) {
  cfg.validate();
  const Metric metric = m;  // captured by value; fields share closures
  const FDConfig fd = cfg;
  ChristoffelField out;
  out.eval = [metric, fd](const Point& x) {
    const int d = metric.dim();
    const Eigen::MatrixXd Ginv = metric.inverse_at(x);
    std::vector<Eigen::MatrixXd> dg(d);
    for (int a = 0; a < d; ++a) dg[a] = metric.partial(x, a, fd);
    Christoffels gamma(d);
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          double s = 0.0;
          for (int l = 0; l < d; ++l) {
            s += Ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
          }
          s *= 0.5;
          gamma(k, i, j) = s;
          gamma(k, j, i) = s;
        }
      }
    }
    return gamma;
  };
  return out;
}

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

CurvatureData curvature(const Metric& m, const FDConfig& cfg) {
  cfg.validate();
  const ChristoffelField gamma = christoffel(m, cfg);
  const ChartDomain domain = m.domain;
  const double h2 = cfg.step2;
  const int order = cfg.order;

  auto riemann_eval = [gamma, domain, h2, order](const Point& x) {
    domain.require_inside(x);
    const Christoffels G0 = gamma.eval(x);
    const int d = G0.dim();
    // dG[a](k,i,j) = d_a Gamma^k_{ij}, central differences of the
    // Christoffel field itself.
    std::vector<Christoffels> dG;
    dG.reserve(d);
    for (int a = 0; a < d; ++a) {
      detail::require_stencil_inside(domain, x, a, h2, order);
      Point q = x;
      Christoffels acc(d);
      auto add_scaled = [&](double coeff, double offset) {
        q[a] = x[a] + offset;
        const Christoffels Gs = gamma.eval(q);
        for (int k = 0; k < d; ++k)
          for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) acc(k, i, j) += coeff * Gs(k, i, j);
      };
      if (order == 2) {
        add_scaled(+1.0 / (2.0 * h2), +h2);
        add_scaled(-1.0 / (2.0 * h2), -h2);
      } else {
        add_scaled(-1.0 / (12.0 * h2), +2.0 * h2);
        add_scaled(+8.0 / (12.0 * h2), +h2);
        add_scaled(-8.0 / (12.0 * h2), -h2);
        add_scaled(+1.0 / (12.0 * h2), -2.0 * h2);
      }
      dG.push_back(acc);
    }
    Tensor4 R(d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) {
            double s = dG[k](i, l, j) - dG[l](i, k, j);
            for (int mm = 0; mm < d; ++mm) {
              s += G0(i, k, mm) * G0(mm, l, j) - G0(i, l, mm) * G0(mm, k, j);
            }
            R(i, j, k, l) = s;
          }
        }
      }
    }
    return R;
  };

  CurvatureData out;
  out.riemann = riemann_eval;
  out.ricci = [riemann_eval](const Point& x) {
    const Tensor4 R = riemann_eval(x);
    const int d = R.dim();
    Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      for (int l = 0; l < d; ++l) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += R(i, j, i, l);
        ric(j, l) = s;
      }
    }
    return ric;
  };
  return out;
}

double sectional_curvature(const CurvatureData& curv, const Metric& m,
                           const Point& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
  const Eigen::MatrixXd G = m.eval(x);
  const double guu = u.dot(G * u);
  const double gvv = v.dot(G * v);
  const double guv = u.dot(G * v);
  const double gram = guu * gvv - guv * guv;
  if (std::abs(gram) < 1e-10) {
    throw ProjError(ErrorCode::DegeneratePlane, "plane Gram determinant below cutoff");
  }
  const Tensor4 R = curv.riemann(x);
  const int d = m.dim();
  // (R(u,v)v)^i = R^i_{jkl} v^j u^k v^l
  Eigen::VectorXd Ruvv = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) s += R(i, j, k, l) * v[j] * u[k] * v[l];
    Ruvv[i] = s;
  }
  return u.dot(G * Ruvv) / gram;
}

void GeodesicPath::to_csv(std::ostream& os) const {
  if (samples.empty()) return;
  const int d = static_cast<int>(samples.front().x.size());
  os << "t";
  for (int i = 1; i <= d; ++i) os << ",x_" << i;
  for (int i = 1; i <= d; ++i) os << ",v_" << i;
  os << "\n";
  char buf[64];
  auto put = [&](double v, bool lead_comma) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (lead_comma) os << ",";
    os << buf;
  };
  for (const GeodesicSample& s : samples) {
    put(s.t, false);
    for (int i = 0; i < d; ++i) put(s.x[i], true);
    for (int i = 0; i < d; ++i) put(s.v[i], true);
    os << "\n";
  }
}

double GeodesicPath::energy_drift(const Metric& m) const {
  if (samples.empty()) return 0.0;
  const auto energy = [&](const GeodesicSample& s) { return s.v.dot(m.eval(s.x) * s.v); };
  const double e0 = energy(samples.front());
  double worst = 0.0;
  for (const GeodesicSample& s : samples) worst = std::max(worst, std::abs(energy(s) - e0));
  return worst;
}

GeodesicPath geodesic_integrate(const Metric& m, const Point& start,
                                const Eigen::VectorXd& velocity, double t_end,
                                double step, const FDConfig& cfg) {
  if (!(step > 0.0) || !(t_end > 0.0)) {
    throw ProjError(ErrorCode::BadArgument, "geodesic integration needs step > 0 and t_end > 0");
  }
  // Christoffel evaluation reaches cfg.step beyond the point when the metric
  // has no analytic partials; keep that stencil inside the chart.
  const double margin = m.g.partial ? 0.0 : (cfg.order == 4 ? 2.0 : 1.0) * cfg.step;
  m.domain.require_inside(start, margin);
  const ChristoffelField gamma = christoffel(m, cfg);

  const auto accel = [&](const Point& x, const Eigen::VectorXd& v) {
    return (-gamma.eval(x).contract(v, v)).eval();
  };
  const auto inside = [&](const Point& x) { return m.domain.contains(x, margin); };

  GeodesicPath path;
  path.step = step;
  Point x = start;
  Eigen::VectorXd v = velocity;
  double t = 0.0;
  path.samples.push_back({t, x, v, accel(x, v)});

  const Eigen::MatrixXd G0 = m.eval(start);
  const double e0 = velocity.dot(G0 * velocity);
  const double drift_cap = 1e-3 * std::max(1.0, std::abs(e0));

  while (t < t_end - 1e-15) {
    const double h = std::min(step, t_end - t);
    // Classic RK4 on the first-order system (x, v).
    const Eigen::VectorXd k1x = v;
    const Eigen::VectorXd k1v = accel(x, v);
    const Point x2 = x + 0.5 * h * k1x;
    if (!inside(x2)) { path.left_domain = true; break; }
    const Eigen::VectorXd k2x = v + 0.5 * h * k1v;
    const Eigen::VectorXd k2v = accel(x2, v + 0.5 * h * k1v);
    const Point x3 = x + 0.5 * h * k2x;
    if (!inside(x3)) { path.left_domain = true; break; }
    const Eigen::VectorXd k3x = v + 0.5 * h * k2v;
    const Eigen::VectorXd k3v = accel(x3, v + 0.5 * h * k2v);
    const Point x4 = x + h * k3x;
    if (!inside(x4)) { path.left_domain = true; break; }
    const Eigen::VectorXd k4x = v + h * k3v;
    const Eigen::VectorXd k4v = accel(x4, v + h * k3v);

    const Point xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    if (!inside(xn)) { path.left_domain = true; break; }
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    x = xn;
    t += h;
    path.samples.push_back({t, x, v, accel(x, v)});

    const double e = v.dot(m.eval(x) * v);
    if (std::abs(e - e0) > drift_cap) {
      throw ProjError(ErrorCode::StepTooLarge, "geodesic energy drift exceeded 1e-3 bound");
    }
  }
  return path;
}

UnparamResidual unparam_geodesic_residual(const GeodesicPath& path, const Metric& other,
                                          const FDConfig& cfg) {
  if (path.samples.size() < 5) {
    throw ProjError(ErrorCode::BadArgument, "residual needs at least 5 path samples");
  }
  const ChristoffelField gamma = christoffel(other, cfg);
  const int n = static_cast<int>(path.samples.size());
  const bool has_accel = path.samples.front().a.size() > 0;

  UnparamResidual out;
  for (int s = 0; s < n; ++s) {
    const GeodesicSample& smp = path.samples[s];
    if (!other.domain.contains(smp.x, other.g.partial ? 0.0 : 2.0 * cfg.step)) continue;

    Eigen::VectorXd cdd;
    if (has_accel) {
      cdd = smp.a;
    } else {
      // Order-4 central difference of the velocity samples; requires a
      // uniform time step across the stencil (final shortened steps and the
      // path ends are skipped).
      if (s < 2 || s > n - 3) continue;
      const double dt = path.step;
      bool uniform = true;
      for (int k = -2; k < 2; ++k) {
        if (std::abs((path.samples[s + k + 1].t - path.samples[s + k].t) - dt) > 1e-12) {
          uniform = false;
          break;
        }
      }
      if (!uniform) continue;
      cdd = (-path.samples[s + 2].v + 8.0 * path.samples[s + 1].v -
             8.0 * path.samples[s - 1].v + path.samples[s - 2].v) / (12.0 * dt);
    }

    const Eigen::MatrixXd G = other.eval(smp.x);
    const Eigen::VectorXd gvv_vec = G * smp.v;
    const double gvv = smp.v.dot(gvv_vec);
    if (std::abs(gvv) < 1e-8 * smp.v.squaredNorm()) {
      ++out.near_null_excluded;
      continue;
    }
    const Eigen::VectorXd gam = gamma.eval(smp.x).contract(smp.v, smp.v);
    const Eigen::VectorXd A = cdd + gam;
    const Eigen::VectorXd A_perp = A - (A.dot(gvv_vec) / gvv) * smp.v;
    const double scale = std::max({A.norm(), cdd.norm(), gam.norm(), 1e-12});
    out.value = std::max(out.value, A_perp.norm() / scale);
    ++out.samples_used;
  }
  if (out.samples_used == 0) {
    throw ProjError(ErrorCode::DegenerateVelocity,
                    "no usable samples: velocity is null (or stencil-less) along the path");
  }
  return out;
}

Metric warped_product_metric(const ScalarField& delta, const Interval& r_range,
                             const Metric& fiber) {
  if (!(r_range.lo < r_range.hi)) {
    throw ProjError(ErrorCode::BadArgument, "warped product needs a proper r interval");
  }
  // Positivity sweep of the warp factor on the construction range.
  {
    const int n = std::max(fiber.domain.grid_res(), 16);
    for (int i = 0; i < n; ++i) {
      Point r(1);
      r[0] = r_range.lo + (r_range.hi - r_range.lo) * i / (n - 1);
      if (!(delta.eval(r) > 0.0)) {
        throw ProjError(ErrorCode::NonPositiveWarp, "warp factor not positive on the r range");
      }
    }
  }
  std::vector<Interval> bounds;
  bounds.push_back(r_range);
  for (int i = 0; i < fiber.dim(); ++i) bounds.push_back(fiber.domain.bounds(i));
  ChartDomain domain(bounds, fiber.domain.grid_res());

  const int fd = fiber.dim();
  const ScalarField warp = delta;
  const Metric fib = fiber;

  SymBilinearField g;
  g.eval = [warp, fib, fd](const Point& x) {
    Point r(1);
    r[0] = x[0];
    Point theta = x.tail(fd);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(fd + 1, fd + 1);
    G(0, 0) = 1.0;
    G.bottomRightCorner(fd, fd) = warp.eval(r) * fib.eval(theta);
    return G;
  };
  // Analytic partials exist when both the warp profile and the fiber metric
  // carry them; otherwise leave the FD fallback in place.
  if (warp.partial && fib.g.partial) {
    g.partial = [warp, fib, fd](const Point& x, int axis) {
      Point r(1);
      r[0] = x[0];
      Point theta = x.tail(fd);
      Eigen::MatrixXd dG = Eigen::MatrixXd::Zero(fd + 1, fd + 1);
      if (axis == 0) {
        dG.bottomRightCorner(fd, fd) = warp.partial(r, 0) * fib.g.eval(theta);
      } else {
        dG.bottomRightCorner(fd, fd) = warp.eval(r) * fib.g.partial(theta, axis - 1);
      }
      return dG;
    };
  }
  return Metric{g, 1 + fiber.p, fiber.q, domain};
}

}  // namespace projequiv
