#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "projequiv/homography.hpp"
#include "projequiv/models.hpp"
#include "projequiv/report.hpp"
#include "projequiv/weyl.hpp"

namespace pe = projequiv;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
  std::string model = "flat:2";
  std::string out;
  std::string csv;
  long long seed = 1;
  int grid_res = 0;
  double fd_step = 1e-3;
  int fd_order = 4;
  double tol = 1e-4;
  int n_geodesics = 3;
  int n_points = 0;
  double t_end = 1.0;
  double step = 1e-3;
  std::string basis;
  std::string pairs = "1:1,1:2,1:3,2:2";
  int threads = 1;
};

std::string basename_of(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

void deliver(pe::Report& report, const CommonOpts& opt,
             std::chrono::steady_clock::time_point t0) {
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  report.set_wall_time_ms(ms);
  const std::string json = report.to_json();
  if (!opt.out.empty()) {
    std::ofstream os(opt.out);
    if (!os) throw pe::ProjError(pe::ErrorCode::BadArgument, "cannot open --out " + opt.out);
    os << json;
  } else {
    std::cout << json;
  }
}

bool known_model(const std::string& id) {
  const auto ids = pe::model_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

double random_margin(const pe::ChartDomain& dom) {
  double min_len = dom.bounds(0).length();
  for (int i = 1; i < dom.dim(); ++i) min_len = std::min(min_len, dom.bounds(i).length());
  return 0.05 * min_len;
}

Eigen::VectorXd unit_speed(const pe::Metric& m, const pe::Point& x, const Eigen::VectorXd& v) {
  const double n2 = v.dot(m.eval(x) * v);
  return v / std::sqrt(std::abs(n2));
}

// Per-axis logistic-like reparameterization x -> (1+a) x' - (a/L) x'^2 used
// as an off-the-shelf volume-distorting diffeomorphism with a closed-form
// inverse on each [lo, hi] axis range.
pe::DiffeoOnChart bent_box_diffeo(const pe::ChartDomain& dom, double a) {
  const int d = dom.dim();
  std::vector<double> lo(d), len(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = dom.bounds(i).lo;
    len[i] = dom.bounds(i).length();
  }
  pe::DiffeoOnChart f;
  f.forward = [lo, len, a, d](const pe::Point& p) -> pe::Point {
    pe::Point q(d);
    for (int i = 0; i < d; ++i) {
      const double s = p[i] - lo[i];
      q[i] = lo[i] + (1.0 + a) * s - (a / len[i]) * s * s;
    }
    return q;
  };
  f.inverse = [lo, len, a, d](const pe::Point& p) -> pe::Point {
    pe::Point q(d);
    for (int i = 0; i < d; ++i) {
      const double y = p[i] - lo[i];
      const double disc = (1.0 + a) * (1.0 + a) - 4.0 * (a / len[i]) * y;
      q[i] = lo[i] + len[i] * ((1.0 + a) - std::sqrt(disc)) / (2.0 * a);
    }
    return q;
  };
  f.differential = [lo, len, a, d](const pe::Point& p) -> Eigen::MatrixXd {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      const double s = p[i] - lo[i];
      J(i, i) = (1.0 + a) - 2.0 * (a / len[i]) * s;
    }
    return J;
  };
  return f;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int run_geodesics(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  pe::Metric m = pe::model_metric(opt.model);
  pe::Rng rng(static_cast<std::uint64_t>(opt.seed));
  pe::Report report("projequiv", kVersion, "geodesics");
  report.set_config("model", opt.model);
  report.set_config("seed", opt.seed);
  report.set_config("n_geodesics", opt.n_geodesics);
  report.set_config("t_end", opt.t_end);
  report.set_config("step", opt.step);
  report.set_config("tol", opt.tol);
  if (!opt.csv.empty()) report.set_config("csv", basename_of(opt.csv));

  const double margin = random_margin(m.domain);
  pe::GeodesicPath last;
  for (int i = 0; i < opt.n_geodesics; ++i) {
    const pe::Point x = m.domain.random_interior(rng, margin);
    const Eigen::VectorXd v = unit_speed(m, x, rng.unit_vector(m.dim()));
    pe::GeodesicPath path = pe::geodesic_integrate(m, x, v, opt.t_end, opt.step);
    const double drift = path.energy_drift(m);
    pe::CheckRecord rec;
    rec.name = "energy_drift_" + std::to_string(i);
    rec.value = drift;
    rec.tol = opt.tol;
    rec.pass = drift < opt.tol;
    if (path.left_domain) rec.note = "truncated at the chart boundary";
    report.add_check(rec);
    last = std::move(path);
  }
  if (!opt.csv.empty()) {
    std::ofstream os(opt.csv);
    if (!os) throw pe::ProjError(pe::ErrorCode::BadArgument, "cannot open --csv " + opt.csv);
    last.to_csv(os);
  }
  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

int run_dini(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  pe::DiniPair pair = opt.model == "dini:constant" ? pe::dini_constant() : pe::dini_default();
  pe::Rng rng(static_cast<std::uint64_t>(opt.seed));
  pe::Report report("projequiv", kVersion, "dini");
  report.set_config("model", opt.model == "dini:constant" ? "dini:constant" : "dini:default");
  report.set_config("seed", opt.seed);
  report.set_config("n_geodesics", opt.n_geodesics);
  report.set_config("t_end", opt.t_end);
  report.set_config("step", opt.step);
  report.set_config("tol", opt.tol);

  const double margin = 0.3;
  int skipped = 0;
  auto run_direction = [&](const pe::Metric& own, const pe::Metric& other) {
    double worst = 0.0;
    for (int i = 0; i < opt.n_geodesics; ++i) {
      const pe::Point x = own.domain.random_interior(rng, margin);
      const Eigen::VectorXd v = unit_speed(own, x, rng.unit_vector(2));
      pe::GeodesicPath path = pe::geodesic_integrate(own, x, v, opt.t_end, opt.step);
      if (path.samples.size() < 8) {
        ++skipped;
        continue;
      }
      worst = std::max(worst, pe::unparam_geodesic_residual(path, other).value);
    }
    return worst;
  };

  const double res_g = run_direction(pair.g, pair.g_bar);
  const double res_gbar = run_direction(pair.g_bar, pair.g);
  report.set_config("skipped_short_paths", skipped);
  report.add_check({"max_residual_g_to_gbar", res_g, opt.tol, res_g < opt.tol, ""});
  report.add_check({"max_residual_gbar_to_g", res_gbar, opt.tol, res_gbar < opt.tol, ""});

  const double sj = pe::sinjukov_residual(pair.L);
  report.add_check({"sinjukov_residual", sj, 1e-4, sj < 1e-4, ""});
  const double sa = pe::selfadjointness_defect(pair.L);
  report.add_check({"selfadjoint_defect", sa, 1e-10, sa < 1e-10, ""});

  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

int run_matveev(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  pe::MatveevExample ex = pe::matveev_default();
  pe::Report report("projequiv", kVersion, "matveev");
  report.set_config("model", "matveev:default");
  report.set_config("seed", opt.seed);
  report.set_config("tol", opt.tol);
  const int n_points = opt.n_points > 0 ? opt.n_points : 100;
  report.set_config("n_points", n_points);

  const double rt = pe::diffeo_roundtrip_error(ex.sigma, ex.g.domain);
  report.add_check({"sigma_roundtrip", rt, 1e-14, rt < 1e-14, ""});

  // Numerical strength against the closed form diag(a(x), 1/a(y)).
  const pe::StrengthPair sp = pe::strength_of(ex.sigma, ex.g);
  double worst = 0.0;
  ex.g.domain.for_each_grid_point(8, 0.05, [&](const pe::Point& x) {
    worst = std::max(
        worst, (sp.K.eval(x) - ex.K_closed_form.field.eval(x)).cwiseAbs().maxCoeff());
  });
  report.add_check({"strength_matches_closed_form", worst, opt.tol, worst < opt.tol, ""});

  const pe::HomographyCoeffs hc = pe::solve_alpha_beta(ex.sigma, ex.K_closed_form, ex.g);
  report.add_check({"alpha", hc.alpha, opt.tol, std::abs(hc.alpha) < opt.tol, ""});
  report.add_check(
      {"beta_minus_one", hc.beta - 1.0, opt.tol, std::abs(hc.beta - 1.0) < opt.tol, ""});
  report.add_check({"fit_residual", hc.residual, 0.05, hc.residual <= 0.05, ""});

  const pe::Mobius A = hc.A();
  const double detA = A.det();
  report.add_check({"rho_det", detA, 0.0, detA < 0.0, "orientation-reversing action"});
  const pe::Mobius A2 = A.pow(2);
  const double a2err = std::max(
      {std::abs(A2.a - 1.0), std::abs(A2.b), std::abs(A2.c), std::abs(A2.d - 1.0)});
  report.add_check({"A_squared_identity", a2err, 1e-6, a2err < 1e-6, ""});

  const double eq = pe::spectral_equivariance(ex.sigma, ex.K_closed_form, A, n_points,
                                              static_cast<std::uint64_t>(opt.seed));
  report.add_check({"spectral_equivariance", eq, 1e-6, eq < 1e-6, ""});

  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

// Flat-chart solution space of the degree-2 family A + w x^T + x w^T + c x x^T.
std::vector<pe::LTensor> flat_degree2_basis(const pe::Metric& g0) {
  const int d = g0.dim();
  std::vector<pe::LTensor> basis;
  auto add = [&](std::function<Eigen::MatrixXd(const pe::Point&)> fn) {
    pe::Tensor11Field f;
    f.eval = std::move(fn);
    basis.push_back(pe::make_ltensor(f, g0));
  };
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      add([i, j, d](const pe::Point&) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
        M(i, j) = 1.0;
        M(j, i) = 1.0;
        return M;
      });
    }
  }
  for (int k = 0; k < d; ++k) {
    add([k, d](const pe::Point& x) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
      for (int i = 0; i < d; ++i) {
        M(k, i) += x[i];
        M(i, k) += x[i];
      }
      return M;
    });
  }
  add([d](const pe::Point& x) { return (x * x.transpose()).eval(); });
  return basis;
}

int run_mobility(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  pe::Report report("projequiv", kVersion, "mobility");
  report.set_config("model", opt.model);
  report.set_config("seed", opt.seed);
  const int n_points = opt.n_points > 0 ? opt.n_points : 120;
  report.set_config("n_points", n_points);
  const double tol = opt.tol > 0 ? opt.tol : 1e-7;
  report.set_config("tol", tol);

  pe::Metric g = pe::model_metric(opt.model);
  std::vector<pe::LTensor> basis;
  int expected = 0;
  if (opt.model == "flat:2" || opt.model == "flat:3") {
    basis = flat_degree2_basis(g);
    expected = (g.dim() + 1) * (g.dim() + 2) / 2;
  } else if (opt.model == "dini:default" || opt.model == "dini:constant") {
    pe::DiniPair pair = opt.model == "dini:default" ? pe::dini_default() : pe::dini_constant();
    g = pair.g;
    pe::Tensor11Field id;
    const int d = g.dim();
    id.eval = [d](const pe::Point&) { return Eigen::MatrixXd::Identity(d, d).eval(); };
    id.partial = [d](const pe::Point&, int) { return Eigen::MatrixXd::Zero(d, d).eval(); };
    basis.push_back(pe::make_ltensor(id, g));
    basis.push_back(pair.L);
    expected = 2;
  } else {
    throw pe::ProjError(pe::ErrorCode::BadArgument,
                        "mobility: no solution-family basis wired for model " + opt.model);
  }

  const pe::MobilityResult mr =
      pe::mobility_in_span(g, basis, tol, n_points, static_cast<std::uint64_t>(opt.seed));
  report.add_check({"kernel_dim", static_cast<double>(mr.kernel_dim),
                    static_cast<double>(expected), mr.kernel_dim == expected, ""});
  report.add_check({"gap", mr.gap, 1e3, mr.gap >= 1e3, "kept/dropped singular value ratio"});
  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

int run_homography(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  pe::Report report("projequiv", kVersion, "homography");

  const pe::MobiusClass ell = pe::classify_exact(0, -1, 1, 0);
  const pe::MobiusClass par = pe::classify_exact(1, 1, 0, 1);
  const pe::MobiusClass hyp = pe::classify_exact(4, 0, 0, 1);
  report.add_check({"elliptic_tag", ell.tag == pe::MobiusTag::Elliptic ? 1.0 : 0.0, 1.0,
                    ell.tag == pe::MobiusTag::Elliptic, pe::mobius_tag_name(ell.tag)});
  report.add_check({"parabolic_tag", par.tag == pe::MobiusTag::Parabolic ? 1.0 : 0.0, 1.0,
                    par.tag == pe::MobiusTag::Parabolic, pe::mobius_tag_name(par.tag)});
  report.add_check({"hyperbolic_tag", hyp.tag == pe::MobiusTag::Hyperbolic ? 1.0 : 0.0, 1.0,
                    hyp.tag == pe::MobiusTag::Hyperbolic, pe::mobius_tag_name(hyp.tag)});

  // Group law on the projective line: (M1 M2) . z = M1 . (M2 . z).
  const pe::Mobius M1{2.0, 1.0, 1.0, 1.0};
  const pe::Mobius M2{0.0, -1.0, 1.0, 0.5};
  double law = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double z = -2.0 + 4.0 * i / 20.0;
    const double lhs = pe::act(M1 * M2, z);
    const double rhs = pe::act(M1, pe::act(M2, z));
    if (std::isinf(lhs) && std::isinf(rhs)) continue;
    law = std::max(law, std::abs(lhs - rhs));
  }
  report.add_check({"group_law", law, 1e-10, law < 1e-10, ""});

  // Conjugated dilation with fixed points {1, 2} and multiplier 1/2 at 1.
  const pe::Mobius C{0.0, 2.0, -1.0, 3.0};
  const pe::MobiusClass cls = pe::classify(C);
  const bool fp_ok = cls.fixed_points.size() == 2 && std::abs(cls.fixed_points[0] - 1.0) < 1e-12 &&
                     std::abs(cls.fixed_points[1] - 2.0) < 1e-12;
  report.add_check({"conjugated_fixed_points", fp_ok ? 1.0 : 0.0, 1.0, fp_ok, ""});
  const double mult = pe::multiplier_at(C, 1.0);
  report.add_check(
      {"multiplier_deviation", std::abs(mult - 0.5), 1e-12, std::abs(mult - 0.5) < 1e-12, ""});

  // Normalized partial products converge; successive differences contract by
  // the multiplier asymptotically, so judge the tail ratios only.
  const int n_max = opt.n_points > 0 ? opt.n_points : 24;
  report.set_config("n_max", n_max);
  const std::vector<double> prods = pe::product_limit(C, 1.7, n_max);
  std::vector<double> ratios;
  for (std::size_t i = 2; i + 1 < prods.size(); ++i) {
    const double d1 = prods[i] - prods[i - 1];
    const double d2 = prods[i + 1] - prods[i];
    if (std::abs(d1) < 1e-13) continue;
    ratios.push_back(d2 / d1);
  }
  double ratio_err = ratios.empty() ? std::numeric_limits<double>::infinity() : 0.0;
  const std::size_t tail = std::min<std::size_t>(3, ratios.size());
  for (std::size_t i = ratios.size() - tail; i < ratios.size(); ++i) {
    ratio_err = std::max(ratio_err, std::abs(ratios[i] - mult));
  }
  report.set_config("cauchy_ratios", static_cast<int>(ratios.size()));
  report.add_check({"cauchy_ratio_error", ratio_err, 0.05, !ratios.empty() && ratio_err < 0.05,
                    "tail |difference ratio - multiplier|"});

  const pe::CorollaryReport cor = pe::corollary_inequalities(0.5, 2.0, 1, 1);
  report.add_check({"eigenvalue_products_bracket_one", cor.all() ? 1.0 : 0.0, 1.0, cor.all(),
                    ""});

  const pe::DistortionFactors df = pe::distortion_factors(0.5, 2.0, 1.3, 1, 1);
  const double lhs = df.zeta_minus_sq * df.zeta_lambda_sq * df.zeta_plus_sq;
  const double rel = std::abs(lhs - df.jac_sq) / std::abs(df.jac_sq);
  report.add_check({"distortion_identity_rel", rel, 1e-12, rel < 1e-12, ""});

  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

int run_weyl(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  pe::Metric m = pe::model_metric(opt.model);
  pe::FDConfig cfg;
  cfg.step = opt.fd_step;
  cfg.order = opt.fd_order;
  cfg.validate();
  const double tol = opt.tol > 0 ? opt.tol : 1e-5;

  pe::Report report("projequiv", kVersion, "weyl");
  report.set_config("model", opt.model);
  report.set_config("fd_step", cfg.step);
  report.set_config("fd_order", cfg.order);
  report.set_config("tol", tol);

  const pe::FlatnessReport fr = pe::flatness_test(m, tol, cfg, opt.grid_res);
  if (m.dim() >= 3) {
    report.add_check({"max_weyl", fr.max_weyl, fr.tol, fr.max_weyl < fr.tol, ""});
    const pe::CurvatureData curv = pe::curvature(m, cfg);
    const pe::WeylField w = pe::projective_weyl(curv, m);
    const double td = pe::weyl_trace_defect(w, m.domain);
    report.add_check({"trace_defect", td, 1e-8, td < 1e-8, ""});
    const double fa = pe::weyl_frame_agreement(m, cfg);
    report.add_check({"frame_agreement", fa, 1e-8, fa < 1e-8, ""});
  }
  report.add_check({"curvature_variance", fr.curvature_variance, fr.var_tol,
                    fr.curvature_variance < fr.var_tol, ""});
  report.add_check({"flat_verdict", fr.flat ? 1.0 : 0.0, 1.0, fr.flat, ""});
  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& spec) {
  std::vector<std::pair<int, int>> out;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string item = spec.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw pe::ProjError(pe::ErrorCode::BadArgument, "bad --pairs entry '" + item + "'");
    }
    out.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    pos = comma + 1;
  }
  if (out.empty()) throw pe::ProjError(pe::ErrorCode::BadArgument, "--pairs is empty");
  return out;
}

int run_veronese(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  pe::Report report("projequiv", kVersion, "veronese");
  report.set_config("pairs", opt.pairs);
  const double tol = opt.tol > 0 ? opt.tol : 1e-6;
  report.set_config("tol", tol);

  for (const auto& [d, k] : parse_pairs(opt.pairs)) {
    const pe::VeroneseMap vm = pe::veronese(d, k);
    const long long expected_n = [&] {
      long long v = 1;
      for (int i = 1; i <= k; ++i) v = v * (d + i) / i;
      return v - 1;
    }();
    const std::string label = std::to_string(d) + "_" + std::to_string(k);
    report.add_check({"target_dim_" + label, static_cast<double>(vm.N),
                      static_cast<double>(expected_n), vm.N == expected_n, ""});

    const pe::Metric source = pe::fubini_study(d, 0, 0.25, 9);
    const pe::Metric target = pe::fubini_study(vm.N, 0, 0.7, 9);
    const pe::Metric pulled = pe::pullback_metric(vm.map, target, source.domain);
    double worst = 0.0;
    source.domain.for_each_grid_point(d == 1 ? 5 : 3, 0.0, [&](const pe::Point& x) {
      const Eigen::MatrixXd lhs = pulled.eval(x);
      const Eigen::MatrixXd rhs = k * source.eval(x);
      worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
    });
    report.add_check({"pullback_factor_" + label, worst, tol, worst < tol,
                      "relative deviation from k * base metric"});
  }

  // Segre embedding restricts to the product metric.
  const pe::SegreMap sm = pe::segre(1, 1);
  const pe::Metric fs_small = pe::fubini_study(1, 0, 0.25, 9);
  const pe::Metric product = pe::direct_sum_metric(fs_small, fs_small);
  const pe::Metric target = pe::fubini_study(sm.N, 0, 0.7, 9);
  const pe::Metric pulled = pe::pullback_metric(sm.map, target, product.domain);
  double worst = 0.0;
  product.domain.for_each_grid_point(3, 0.0, [&](const pe::Point& x) {
    const Eigen::MatrixXd lhs = pulled.eval(x);
    const Eigen::MatrixXd rhs = product.eval(x);
    worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
  });
  report.add_check({"segre_1_1_product_metric", worst, tol, worst < tol, ""});

  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

int run_functional(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.model != "dini:default" && opt.model != "dini:constant") {
    std::cerr << "error: functional supports models dini:default and dini:constant\n";
    return 2;
  }
  pe::DiniPair pair = opt.model == "dini:constant" ? pe::dini_constant() : pe::dini_default();
  pe::Report report("projequiv", kVersion, "functional");
  report.set_config("model", opt.model);
  const int per_axis = opt.grid_res > 0 ? opt.grid_res : 101;
  report.set_config("grid_res", per_axis);
  report.set_config("threads", opt.threads);
  const double tol = opt.tol > 0 ? opt.tol : 1e-4;
  report.set_config("tol", tol);

  // Q acts on the transfer tensor T = g0^{-1} gbar; the companion functional
  // N acts on the L-parameterization of the same pair. Since
  // det T = (det L)^{-(1+d)} the two integrands coincide pointwise.
  const pe::LTensor T = pe::transfer_tensor(pair.g_bar, pair.g);
  bool n_infinite = false;
  double q0 = 0.0, n0 = 0.0;
  q0 = pe::functionals(T.field, pair.g, pe::FunctionalKind::Q, pe::QuadScheme::Simpson,
                       per_axis, opt.threads);
  try {
    n0 = pe::functionals(pair.L.field, pair.g, pe::FunctionalKind::N, pe::QuadScheme::Simpson,
                         per_axis, opt.threads);
  } catch (const pe::ProjError& e) {
    if (e.code() != pe::ErrorCode::NearDegenerate) throw;
    n_infinite = true;
  }
  report.set_config("n_infinite", n_infinite);
  report.add_check({"q_value", q0, 0.0, true, "volume-ratio functional"});
  if (!n_infinite) {
    report.add_check({"n_value", n0, 0.0, true, "companion functional"});
    const double qn_rel = std::abs(n0 - q0) / std::abs(q0);
    report.add_check({"q_n_agree_rel", qn_rel, 1e-10, qn_rel < 1e-10,
                      "same density through both parameterizations"});
  }

  const pe::DiffeoOnChart psi = bent_box_diffeo(pair.g.domain, 0.3);
  const pe::Tensor11Field rhoT = pe::rho_ge_apply(psi, T.field, pair.g);
  const double q1 = pe::functionals(rhoT, pair.g, pe::FunctionalKind::Q,
                                    pe::QuadScheme::Simpson, per_axis, opt.threads);
  const double q_rel = std::abs(q1 - q0) / std::abs(q0);
  report.add_check({"q_invariance_rel", q_rel, tol, q_rel < tol, ""});
  if (!n_infinite) {
    const pe::LTensor rhoL = pe::rho_apply(psi, pair.L, pair.g);
    const double n1 = pe::functionals(rhoL.field, pair.g, pe::FunctionalKind::N,
                                      pe::QuadScheme::Simpson, per_axis, opt.threads);
    const double n_rel = std::abs(n1 - n0) / std::abs(n0);
    report.add_check({"n_invariance_rel", n_rel, tol, n_rel < tol, ""});
  }

  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

int run_spectrum(const CommonOpts& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  pe::Report report("projequiv", kVersion, "spectrum");
  report.set_config("model", opt.model);
  const int per_axis = opt.grid_res > 0 ? opt.grid_res : 15;
  report.set_config("grid_res", per_axis);
  if (!opt.csv.empty()) report.set_config("csv", basename_of(opt.csv));

  pe::Tensor11Field field;
  pe::ChartDomain domain({{0.0, 1.0}}, 3);
  if (opt.model == "matveev:default") {
    pe::MatveevExample ex = pe::matveev_default();
    field = ex.K_closed_form.field;
    domain = ex.g.domain;
  } else if (opt.model == "dini:default" || opt.model == "dini:constant") {
    pe::DiniPair pair = opt.model == "dini:constant" ? pe::dini_constant() : pe::dini_default();
    field = pe::transfer_tensor(pair.g_bar, pair.g).field;
    domain = pair.g.domain;
  } else {
    std::cerr << "error: spectrum supports dini:* and matveev:default models\n";
    return 2;
  }

  const pe::SpectrumCloud cloud = pe::spectrum_cloud(field, domain, per_axis, 0.05);
  report.add_check({"n_samples", static_cast<double>(cloud.samples.size()), 0.0, true, ""});
  const double conj = cloud.conjugation_defect();
  report.add_check({"conjugation_defect", conj, 1e-10, conj < 1e-10,
                    "distance of the spectrum set to its conjugate"});
  if (!opt.csv.empty()) {
    std::ofstream os(opt.csv);
    if (!os) throw pe::ProjError(pe::ErrorCode::BadArgument, "cannot open --csv " + opt.csv);
    cloud.to_csv(os);
  }
  deliver(report, opt, t0);
  return report.overall_pass() ? 0 : 1;
}

void add_common_flags(CLI::App* cmd, CommonOpts& opt, bool with_model) {
  if (with_model) cmd->add_option("--model", opt.model, "model id (see README)");
  cmd->add_option("--seed", opt.seed, "RNG seed");
  cmd->add_option("--grid-res", opt.grid_res, "per-axis sample override");
  cmd->add_option("--fd-step", opt.fd_step, "finite-difference step");
  cmd->add_option("--fd-order", opt.fd_order, "finite-difference order (2 or 4)");
  cmd->add_option("--tol", opt.tol, "check tolerance");
  cmd->add_option("--threads", opt.threads, "worker threads for quadrature");
  cmd->add_option("--out", opt.out, "write the JSON report to this path");
  cmd->add_option("--csv", opt.csv, "write sample CSV to this path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical toolkit for projectively equivalent metrics on charts"};
  app.set_version_flag("--version", std::string("projequiv ") + kVersion);
  app.require_subcommand(1);

  CommonOpts o_geo, o_dini, o_mat, o_mob, o_hom, o_weyl, o_ver, o_fun, o_spec;

  CLI::App* c_geo = app.add_subcommand("geodesics", "integrate random geodesics, check energy");
  add_common_flags(c_geo, o_geo, true);
  c_geo->add_option("--n-geodesics", o_geo.n_geodesics, "number of geodesics");
  c_geo->add_option("--t-end", o_geo.t_end, "integration horizon");
  c_geo->add_option("--step", o_geo.step, "RK4 step");
  o_geo.tol = 1e-3;

  CLI::App* c_dini = app.add_subcommand("dini", "shared unparameterized geodesics of a pair");
  add_common_flags(c_dini, o_dini, true);
  c_dini->add_option("--n-geodesics", o_dini.n_geodesics, "geodesics per direction");
  c_dini->add_option("--t-end", o_dini.t_end, "integration horizon");
  c_dini->add_option("--step", o_dini.step, "RK4 step");
  o_dini.model = "dini:default";
  o_dini.n_geodesics = 20;
  o_dini.t_end = 0.6;
  o_dini.step = 2e-3;

  CLI::App* c_mat = app.add_subcommand("matveev", "projective involution example checks");
  add_common_flags(c_mat, o_mat, false);
  c_mat->add_option("--n-points", o_mat.n_points, "spectral equivariance sample count");

  CLI::App* c_mob = app.add_subcommand("mobility", "kernel dimension of the linearized system");
  add_common_flags(c_mob, o_mob, true);
  c_mob->add_option("--n-points", o_mob.n_points, "sample points for the linear system");
  o_mob.tol = 1e-7;

  CLI::App* c_hom = app.add_subcommand("homography", "Mobius classification and product limits");
  add_common_flags(c_hom, o_hom, false);
  c_hom->add_option("--n-points", o_hom.n_points, "partial products to form");

  CLI::App* c_weyl = app.add_subcommand("weyl", "projective flatness probe");
  add_common_flags(c_weyl, o_weyl, true);
  o_weyl.model = "sphere:3";
  o_weyl.tol = 1e-5;

  CLI::App* c_ver = app.add_subcommand("veronese", "embedding pullback factor checks");
  add_common_flags(c_ver, o_ver, false);
  c_ver->add_option("--pairs", o_ver.pairs, "comma list of d:k pairs");
  o_ver.tol = 1e-6;

  CLI::App* c_fun = app.add_subcommand("functional", "invariant functionals of the transfer tensor");
  add_common_flags(c_fun, o_fun, true);
  o_fun.model = "dini:default";

  CLI::App* c_spec = app.add_subcommand("spectrum", "pointwise spectra of the transfer tensor");
  add_common_flags(c_spec, o_spec, true);
  o_spec.model = "matveev:default";

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_geo->parsed()) {
      if (!known_model(o_geo.model)) {
        std::cerr << "error: unknown model '" << o_geo.model << "'\n";
        return 2;
      }
      return run_geodesics(o_geo);
    }
    if (c_dini->parsed()) {
      if (o_dini.model != "dini:default" && o_dini.model != "dini:constant") {
        std::cerr << "error: dini supports models dini:default and dini:constant\n";
        return 2;
      }
      return run_dini(o_dini);
    }
    if (c_mat->parsed()) return run_matveev(o_mat);
    if (c_mob->parsed()) {
      if (!known_model(o_mob.model)) {
        std::cerr << "error: unknown model '" << o_mob.model << "'\n";
        return 2;
      }
      return run_mobility(o_mob);
    }
    if (c_hom->parsed()) return run_homography(o_hom);
    if (c_weyl->parsed()) {
      if (!known_model(o_weyl.model)) {
        std::cerr << "error: unknown model '" << o_weyl.model << "'\n";
        return 2;
      }
      return run_weyl(o_weyl);
    }
    if (c_ver->parsed()) return run_veronese(o_ver);
    if (c_fun->parsed()) return run_functional(o_fun);
    if (c_spec->parsed()) return run_spectrum(o_spec);
  } catch (const pe::ProjError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
