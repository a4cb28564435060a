#include "projequiv/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "projequiv/rng.hpp"

namespace projequiv {

WeylField projective_weyl(const CurvatureData& curv, const Metric& m) {
  const int d = m.dim();
  if (d < 3) {
    throw ProjError(ErrorCode::DimensionTooLow, "projective Weyl tensor needs dimension >= 3");
  }
  WeylField w;
  w.eval = [curv, d](const Point& x) -> Tensor4 {
    const Tensor4 R = curv.riemann(x);
    const Eigen::MatrixXd Ric = curv.ricci(x);
    const double c = 1.0 / (d - 1);
    Tensor4 W(d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
          for (int l = 0; l < d; ++l) {
            double v = R(i, j, k, l);
            if (i == k) v -= c * Ric(j, l);
            if (i == l) v += c * Ric(j, k);
            W(i, j, k, l) = v;
          }
        }
      }
    }
    return W;
  };
  return w;
}

double weyl_trace_defect(const WeylField& w, const ChartDomain& domain, int per_axis,
                         double margin) {
  if (margin <= 0.0) margin = fd_margin(FDConfig{});
  double worst = 0.0;
  domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    const Tensor4 W = w.eval(x);
    const int d = W.dim();
    for (int j = 0; j < d; ++j) {
      for (int l = 0; l < d; ++l) {
        double t1 = 0.0;  // W^i_{jil}
        double t2 = 0.0;  // W^i_{ijl}
        for (int i = 0; i < d; ++i) {
          t1 += W(i, j, i, l);
          t2 += W(i, i, j, l);
        }
        worst = std::max(worst, std::max(std::abs(t1), std::abs(t2)));
      }
    }
  });
  return worst;
}

namespace {

// g-orthonormal frame from seeded gaussian draws (Gram-Schmidt); columns are
// the frame vectors.
Eigen::MatrixXd orthonormal_frame(const Eigen::MatrixXd& G, Rng& rng) {
  const int d = static_cast<int>(G.rows());
  Eigen::MatrixXd E(d, d);
  std::vector<double> signs(d, 1.0);
  for (int a = 0; a < d; ++a) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 20) {
        throw ProjError(ErrorCode::NearDegenerate, "frame construction failed to normalize");
      }
      Eigen::VectorXd v = rng.gaussian_vector(d);
      for (int b = 0; b < a; ++b) {
        const double coef = E.col(b).dot(G * v) / signs[b];
        v -= coef * E.col(b);
      }
      const double n2 = v.dot(G * v);
      if (std::abs(n2) < 1e-8 * v.squaredNorm()) continue;
      signs[a] = n2 > 0.0 ? 1.0 : -1.0;
      E.col(a) = v / std::sqrt(std::abs(n2));
      break;
    }
  }
  return E;
}

}  // namespace

double weyl_frame_agreement(const Metric& m, const FDConfig& cfg, int per_axis,
                            int frames_per_point, std::uint64_t seed) {
  const int d = m.dim();
  const CurvatureData curv = curvature(m, cfg);
  const WeylField w = projective_weyl(curv, m);
  const double c = 1.0 / (d - 1);
  Rng rng(seed);
  double worst = 0.0;
  m.domain.for_each_grid_point(per_axis, fd_margin(cfg), [&](const Point& x) {
    const Tensor4 W = w.eval(x);
    const Tensor4 R = curv.riemann(x);
    const Eigen::MatrixXd Ric = curv.ricci(x);
    const Eigen::MatrixXd G = m.eval(x);
    for (int f = 0; f < frames_per_point; ++f) {
      const Eigen::MatrixXd E = orthonormal_frame(G, rng);
      // All frame 4-tuples (u, v, w, z); path A contracts the assembled
      // tensor, path B uses R and Ric directly.
      for (int ku = 0; ku < d; ++ku) {
        for (int kv = 0; kv < d; ++kv) {
          for (int kw = 0; kw < d; ++kw) {
            for (int kz = 0; kz < d; ++kz) {
              const Eigen::VectorXd u = E.col(ku), v = E.col(kv);
              const Eigen::VectorXd ww = E.col(kw), z = E.col(kz);
              double wa = 0.0, ra = 0.0;
              for (int i = 0; i < d; ++i) {
                double wi = 0.0, ri = 0.0;
                for (int j = 0; j < d; ++j) {
                  for (int k = 0; k < d; ++k) {
                    for (int l = 0; l < d; ++l) {
                      const double coef = ww[j] * u[k] * v[l];
                      wi += W(i, j, k, l) * coef;
                      ri += R(i, j, k, l) * coef;
                    }
                  }
                }
                const double zi = (G * z)[i];
                wa += zi * wi;
                ra += zi * ri;
              }
              const double ricWU = ww.dot(Ric * u);
              const double ricWV = ww.dot(Ric * v);
              const double gzv = z.dot(G * v);
              const double gzu = z.dot(G * u);
              const double frame_value = ra + c * (gzv * ricWU - gzu * ricWV);
              worst = std::max(worst, std::abs(wa - frame_value));
            }
          }
        }
      }
    }
  });
  return worst;
}

FlatnessReport flatness_test(const Metric& m, double tol, const FDConfig& cfg, int per_axis) {
  const int d = m.dim();
  if (per_axis <= 0) per_axis = d == 2 ? 7 : (d == 3 ? 4 : 3);
  const CurvatureData curv = curvature(m, cfg);
  const double margin = fd_margin(cfg);

  FlatnessReport rep;
  rep.dim = d;
  rep.tol = tol;
  rep.var_tol = 1e-6;

  WeylField w;
  if (d >= 3) w = projective_weyl(curv, m);

  std::vector<double> ks;
  m.domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    if (d >= 3) rep.max_weyl = std::max(rep.max_weyl, w.eval(x).max_abs());
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
        u[i] = 1.0;
        v[j] = 1.0;
        ks.push_back(sectional_curvature(curv, m, x, u, v));
      }
    }
  });

  double mean = 0.0;
  for (double k : ks) mean += k;
  mean /= static_cast<double>(ks.size());
  double var = 0.0;
  for (double k : ks) var += (k - mean) * (k - mean);
  var /= static_cast<double>(ks.size());
  rep.curvature_variance = var;

  rep.flat = d >= 3 ? (rep.max_weyl < tol && var < rep.var_tol) : (var < rep.var_tol);
  return rep;
}

}  // namespace projequiv
