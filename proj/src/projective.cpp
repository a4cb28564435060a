#include "projequiv/projective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace projequiv {

namespace {

int auto_per_axis(int d, int target_points) {
  const int m = static_cast<int>(std::ceil(std::pow(static_cast<double>(target_points), 1.0 / d)));
  return std::clamp(m, 3, 12);
}

}  // namespace

LTensor make_ltensor(Tensor11Field field, const Metric& base) {
  return LTensor{std::move(field), std::make_shared<Metric>(base)};
}

double selfadjointness_defect(const LTensor& L, int per_axis, double margin) {
  double worst = 0.0;
  L.base->domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    const Eigen::MatrixXd G = L.base->eval(x);
    const Eigen::MatrixXd M = L.field.eval(x);
    worst = std::max(worst, (G * M - M.transpose() * G).cwiseAbs().maxCoeff());
  });
  return worst;
}

LTensor transfer_tensor(const Metric& g, const Metric& g0) {
  if (g.dim() != g0.dim()) {
    throw ProjError(ErrorCode::BadArgument, "transfer tensor needs metrics of equal dimension");
  }
  const Metric ga = g, gb = g0;
  Tensor11Field T;
  T.eval = [ga, gb](const Point& x) {
    return (gb.inverse_at(x) * ga.eval(x)).eval();
  };
  if (ga.g.partial && gb.g.partial) {
    // d(g0^{-1} g) = -g0^{-1} (d g0) g0^{-1} g + g0^{-1} (d g)
    T.partial = [ga, gb](const Point& x, int axis) {
      const Eigen::MatrixXd inv0 = gb.inverse_at(x);
      const Eigen::MatrixXd G = ga.eval(x);
      return (-inv0 * gb.g.partial(x, axis) * inv0 * G + inv0 * ga.g.partial(x, axis)).eval();
    };
  }
  return LTensor{T, std::make_shared<Metric>(g0)};
}

double real_root(double x, int m) {
  if (!(m >= 1)) throw ProjError(ErrorCode::BadArgument, "root index must be positive");
  if (std::abs(x) <= 1e-300) {
    throw ProjError(ErrorCode::SingularTensor, "determinant vanishes; no usable root");
  }
  if (x > 0.0) return std::pow(x, 1.0 / m);
  if (m % 2 == 1) return -std::pow(-x, 1.0 / m);
  throw ProjError(ErrorCode::NegativeDetRoot,
                  "negative determinant has no real root of even index " + std::to_string(m));
}

Eigen::MatrixXd f_transform_at(const Eigen::MatrixXd& L) {
  const double det = L.determinant();
  const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
  if (std::abs(det) < 1e-12 * std::pow(scale, L.rows())) {
    throw ProjError(ErrorCode::SingularTensor, "F-transform needs an invertible tensor");
  }
  return (L.inverse() / det).eval();
}

Eigen::MatrixXd f_inverse_transform_at(const Eigen::MatrixXd& T) {
  const double det = T.determinant();
  const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  if (std::abs(det) < 1e-12 * std::pow(scale, T.rows())) {
    throw ProjError(ErrorCode::SingularTensor, "inverse F-transform needs an invertible tensor");
  }
  const int d = static_cast<int>(T.rows());
  const double r = real_root(det, 1 + d);
  return (r * T.inverse()).eval();
}

Tensor11Field f_transform(const Tensor11Field& L) {
  const Tensor11Field src = L;
  Tensor11Field out;
  out.eval = [src](const Point& x) { return f_transform_at(src.eval(x)); };
  return out;
}

Tensor11Field f_inverse_transform(const Tensor11Field& T) {
  const Tensor11Field src = T;
  Tensor11Field out;
  out.eval = [src](const Point& x) { return f_inverse_transform_at(src.eval(x)); };
  return out;
}

Metric metric_from_L(const LTensor& L) {
  const Metric base = *L.base;
  const Tensor11Field Lf = L.field;
  SymBilinearField g;
  g.eval = [base, Lf](const Point& x) {
    // Self-adjointness of L makes g0 F(L) symmetric; symmetrize to shed
    // roundoff skew.
    const Eigen::MatrixXd M = base.eval(x) * f_transform_at(Lf.eval(x));
    return ((M + M.transpose()) / 2.0).eval();
  };
  if (base.g.partial && Lf.partial) {
    // d F(L) = -L^{-1} (dL) L^{-1} / det L - tr(L^{-1} dL) F(L)
    g.partial = [base, Lf](const Point& x, int axis) {
      const Eigen::MatrixXd Lx = Lf.eval(x);
      const Eigen::MatrixXd Li = Lx.inverse();
      const Eigen::MatrixXd dL = Lf.partial(x, axis);
      const double det = Lx.determinant();
      const Eigen::MatrixXd F = Li / det;
      const Eigen::MatrixXd dF = (-Li * dL * Li / det - (Li * dL).trace() * F).eval();
      const Eigen::MatrixXd M = base.g.partial(x, axis) * F + base.eval(x) * dF;
      return ((M + M.transpose()) / 2.0).eval();
    };
  }
  // Infer the signature at the chart center.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.eval(base.domain.center()));
  int pos = 0, neg = 0;
  for (int i = 0; i < base.dim(); ++i) {
    if (es.eigenvalues()[i] > 0.0) ++pos;
    else ++neg;
  }
  return Metric{g, pos, neg, base.domain};
}

Tensor11Field push_forward(const DiffeoOnChart& f, const Tensor11Field& T) {
  if (!f.differential) {
    throw ProjError(ErrorCode::BadArgument, "pushforward needs a differential on the diffeo");
  }
  const DiffeoOnChart map = f;
  const Tensor11Field src = T;
  Tensor11Field out;
  out.eval = [map, src](const Point& x) {
    const Point y = map.inverse(x);
    const Eigen::MatrixXd J = map.differential(y);
    return (J * src.eval(y) * J.inverse()).eval();
  };
  return out;
}

SymBilinearField push_forward_metric(const DiffeoOnChart& f, const SymBilinearField& g) {
  if (!f.differential) {
    throw ProjError(ErrorCode::BadArgument, "pushforward needs a differential on the diffeo");
  }
  const DiffeoOnChart map = f;
  const SymBilinearField src = g;
  SymBilinearField out;
  out.eval = [map, src](const Point& x) {
    const Point y = map.inverse(x);
    const Eigen::MatrixXd Jinv = map.differential(y).inverse().eval();
    return (Jinv.transpose() * src.eval(y) * Jinv).eval();
  };
  return out;
}

StrengthPair strength_of(const DiffeoOnChart& f, const Metric& g0) {
  if (!f.differential) {
    throw ProjError(ErrorCode::BadArgument, "strength needs a differential on the diffeo");
  }
  const Metric base = g0;
  const SymBilinearField pushed = push_forward_metric(f, g0.g);
  StrengthPair out;
  out.S.eval = [base, pushed](const Point& x) {
    return (base.inverse_at(x) * pushed.eval(x)).eval();
  };
  const Tensor11Field S = out.S;
  out.K.eval = [S](const Point& x) { return f_inverse_transform_at(S.eval(x)); };
  return out;
}

LTensor rho_apply(const DiffeoOnChart& f, const LTensor& L, const Metric& g0) {
  const Tensor11Field pushed = push_forward(f, L.field);
  const Tensor11Field K = strength_of(f, g0).K;
  Tensor11Field out;
  out.eval = [pushed, K](const Point& x) { return (pushed.eval(x) * K.eval(x)).eval(); };
  return LTensor{out, std::make_shared<Metric>(g0)};
}

Tensor11Field rho_ge_apply(const DiffeoOnChart& f, const Tensor11Field& T, const Metric& g0) {
  const Tensor11Field pushed = push_forward(f, T);
  const Tensor11Field S = strength_of(f, g0).S;
  Tensor11Field out;
  out.eval = [pushed, S](const Point& x) { return (S.eval(x) * pushed.eval(x)).eval(); };
  return out;
}

double functionals(const Tensor11Field& T, const Metric& g0, FunctionalKind kind,
                   QuadScheme scheme, int per_axis, int threads) {
  const int d = g0.dim();
  const Tensor11Field field = T;
  const Metric base = g0;
  const double exponent = -0.5 * (1.0 + d);
  auto integrand = [field, base, kind, exponent](const Point& x) {
    const double detT = field.eval(x).determinant();
    const double volw = std::sqrt(std::abs(base.eval(x).determinant()));
    if (kind == FunctionalKind::Q) return std::sqrt(std::abs(detT)) * volw;
    if (std::abs(detT) <= 1e-8) {
      std::ostringstream os;
      os << "det L = " << detT << " within 1e-8 of zero at a quadrature sample (";
      for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
      os << "); N diverges";
      throw ProjError(ErrorCode::NearDegenerate, os.str());
    }
    return std::pow(std::abs(detT), exponent) * volw;
  };
  return integrate_quadrature(integrand, g0.domain, nullptr, scheme, per_axis, threads);
}

double chain_rule_check(const DiffeoOnChart& f, const Metric& g0, int n,
                        int per_axis, double margin) {
  if (n < 1) throw ProjError(ErrorCode::BadArgument, "chain rule check needs n >= 1");
  const int d = g0.dim();
  const Tensor11Field K1 = strength_of(f, g0).K;
  const Tensor11Field Kn = strength_of(f.power(n, d), g0).K;

  // Factors f_*^k K_f for k = 0 .. n-1.
  std::vector<Tensor11Field> factors;
  factors.push_back(K1);
  for (int k = 1; k < n; ++k) factors.push_back(push_forward(f, factors.back()));

  double worst = 0.0;
  g0.domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(d, d);
    for (int k = n - 1; k >= 0; --k) prod = prod * factors[k].eval(x);
    worst = std::max(worst, (Kn.eval(x) - prod).cwiseAbs().maxCoeff());
  });
  return worst;
}

double sinjukov_residual(const LTensor& L, const FDConfig& cfg, int per_axis) {
  cfg.validate();
  const Metric& g0 = *L.base;
  const int d = g0.dim();
  if (per_axis <= 0) per_axis = auto_per_axis(d, 120);
  const ChristoffelField gamma = christoffel(g0, cfg);
  const double margin = fd_margin(cfg);

  double worst = 0.0;
  g0.domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    const Eigen::MatrixXd G = g0.eval(x);
    const Eigen::MatrixXd Lx = L.field.eval(x);
    const Christoffels Gm = gamma.eval(x);
    std::vector<Eigen::MatrixXd> dL(d);
    Eigen::VectorXd dtr(d);
    for (int a = 0; a < d; ++a) {
      dL[a] = fd_partial(L.field, g0.domain, x, a, cfg);
      dtr[a] = dL[a].trace();
    }
    for (int i = 0; i < d; ++i) {
      // (nabla_i L)^k_j = d_i L^k_j + Gamma^k_{im} L^m_j - Gamma^m_{ij} L^k_m
      Eigen::MatrixXd nabla = dL[i];
      for (int k = 0; k < d; ++k) {
        for (int j = 0; j < d; ++j) {
          double s = 0.0;
          for (int m = 0; m < d; ++m) {
            s += Gm(k, i, m) * Lx(m, j) - Gm(m, i, j) * Lx(k, m);
          }
          nabla(k, j) += s;
        }
      }
      const Eigen::MatrixXd lowered = G * nabla;  // g_{lk} (nabla_i L)^k_j at (l, j)
      for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l) {
          const double lhs = lowered(l, j);
          const double rhs = 0.5 * G(j, i) * dtr[l] + 0.5 * G(l, i) * dtr[j];
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      }
    }
  });
  return worst;
}

MobilityResult mobility_in_span(const Metric& g, const std::vector<LTensor>& basis,
                                double tol, int n_points, std::uint64_t seed,
                                const FDConfig& cfg) {
  if (basis.empty()) throw ProjError(ErrorCode::EmptyInput, "mobility needs a nonempty basis");
  cfg.validate();
  const int d = g.dim();
  const int nb = static_cast<int>(basis.size());
  const double margin = fd_margin(cfg);
  const ChristoffelField gamma = christoffel(g, cfg);

  Rng rng(seed);
  std::vector<Point> pts;
  pts.reserve(n_points);
  for (int i = 0; i < n_points; ++i) pts.push_back(g.domain.random_interior(rng, margin));

  // Scale each basis element to unit RMS over the sample set so the kernel
  // threshold tol * max(sigma_max, 1) keeps meaning when every column is a
  // solution (all-zero defect matrix).
  std::vector<double> col_scale(nb, 1.0);
  for (int b = 0; b < nb; ++b) {
    double ss = 0.0;
    for (const Point& x : pts) ss += basis[b].field.eval(x).squaredNorm();
    const double rms = std::sqrt(ss / (static_cast<double>(n_points) * d * d));
    col_scale[b] = rms > 1e-14 ? 1.0 / rms : 1.0;
  }

  const int rows_per_pt = d * d * d;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(n_points) * rows_per_pt, nb);
  for (int pi = 0; pi < n_points; ++pi) {
    const Point& x = pts[pi];
    const Eigen::MatrixXd G = g.eval(x);
    const Christoffels Gm = gamma.eval(x);
    for (int b = 0; b < nb; ++b) {
      const Eigen::MatrixXd Lx = basis[b].field.eval(x);
      std::vector<Eigen::MatrixXd> dL(d);
      Eigen::VectorXd dtr(d);
      for (int a = 0; a < d; ++a) {
        dL[a] = fd_partial(basis[b].field, g.domain, x, a, cfg);
        dtr[a] = dL[a].trace();
      }
      int r = pi * rows_per_pt;
      for (int i = 0; i < d; ++i) {
        Eigen::MatrixXd nabla = dL[i];
        for (int k = 0; k < d; ++k) {
          for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int m = 0; m < d; ++m) {
              s += Gm(k, i, m) * Lx(m, j) - Gm(m, i, j) * Lx(k, m);
            }
            nabla(k, j) += s;
          }
        }
        const Eigen::MatrixXd lowered = G * nabla;
        for (int j = 0; j < d; ++j) {
          for (int l = 0; l < d; ++l) {
            A(r++, b) = col_scale[b] *
                (lowered(l, j) - 0.5 * G(j, i) * dtr[l] - 0.5 * G(l, i) * dtr[j]);
          }
        }
      }
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  MobilityResult out;
  out.singular_values.assign(svd.singularValues().data(),
                             svd.singularValues().data() + svd.singularValues().size());
  out.sigma_max = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  out.threshold = tol * std::max(out.sigma_max, 1.0);
  double largest_dropped = 0.0, smallest_kept = 1e300;
  for (double s : out.singular_values) {
    if (s < out.threshold) {
      ++out.kernel_dim;
      largest_dropped = std::max(largest_dropped, s);
    } else {
      smallest_kept = std::min(smallest_kept, s);
    }
  }
  out.gap = (out.kernel_dim == 0 || out.kernel_dim == nb)
                ? 1e300
                : std::min(1e300, smallest_kept / std::max(largest_dropped, 1e-300));
  return out;
}

double projective_connection_check(const Metric& g, const Metric& g2,
                                   const FDConfig& cfg, int per_axis) {
  if (g.dim() != g2.dim()) {
    throw ProjError(ErrorCode::BadArgument, "connection check needs metrics of equal dimension");
  }
  const int d = g.dim();
  const ChristoffelField ga = christoffel(g, cfg);
  const ChristoffelField gb = christoffel(g2, cfg);
  const double margin = fd_margin(cfg);

  double worst = 0.0;
  g.domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    const Christoffels A = ga.eval(x);
    const Christoffels B = gb.eval(x);
    // phi_j = Delta^k_{kj} / (d + 1) is the trace part of the difference
    // tensor; projective equivalence means Delta is exactly its trace part.
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += B(k, k, j) - A(k, k, j);
      phi[j] = s / (d + 1);
    }
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          const double delta = B(k, i, j) - A(k, i, j);
          const double model = (k == i ? phi[j] : 0.0) + (k == j ? phi[i] : 0.0);
          worst = std::max(worst, std::abs(delta - model));
        }
      }
    }
  });
  return worst;
}

double ricci_commutator(const LTensor& L, const CurvatureData& curv,
                        int per_axis, double margin) {
  const Metric& g0 = *L.base;
  if (margin <= 0.0) margin = fd_margin(FDConfig{});
  double worst = 0.0;
  g0.domain.for_each_grid_point(per_axis, margin, [&](const Point& x) {
    const Eigen::MatrixXd ric_sharp = (g0.inverse_at(x) * curv.ricci(x)).eval();
    const Eigen::MatrixXd Lx = L.field.eval(x);
    worst = std::max(worst, (Lx * ric_sharp - ric_sharp * Lx).norm());
  });
  return worst;
}

}  // namespace projequiv
