#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include "projequiv/homography.hpp"
#include "projequiv/models.hpp"

using namespace projequiv;

namespace {

LTensor constant_L(const Eigen::MatrixXd& M, const Metric& base) {
  Tensor11Field f;
  f.eval = [M](const Point&) { return M; };
  f.partial = [M](const Point&, int) { return Eigen::MatrixXd::Zero(M.rows(), M.cols()).eval(); };
  return make_ltensor(f, base);
}

DiffeoOnChart scaling(double s, int d) {
  DiffeoOnChart f;
  f.forward = [s](const Point& p) -> Point { return s * p; };
  f.inverse = [s](const Point& p) -> Point { return p / s; };
  f.differential = [s, d](const Point&) {
    return (s * Eigen::MatrixXd::Identity(d, d)).eval();
  };
  return f;
}

}  // namespace

TEST_CASE("matrix algebra of homographies") {
  Mobius m{2.0, 1.0, 1.0, 1.0};
  CHECK(m.det() == doctest::Approx(1.0));
  CHECK(m.trace() == doctest::Approx(3.0));

  Mobius prod = m * m.inverse();
  Mobius n = prod.normalized();
  CHECK(n.a == doctest::Approx(1.0));
  CHECK(std::abs(n.b) < 1e-15);
  CHECK(std::abs(n.c) < 1e-15);
  CHECK(n.d == doctest::Approx(1.0));

  Mobius cubed = m.pow(3);
  Mobius manual = m * m * m;
  CHECK(cubed.a == doctest::Approx(manual.a));
  CHECK(cubed.b == doctest::Approx(manual.b));
  CHECK(cubed.c == doctest::Approx(manual.c));
  CHECK(cubed.d == doctest::Approx(manual.d));

  Mobius inv2 = m.pow(-2);
  Mobius manual2 = m.inverse() * m.inverse();
  CHECK(inv2.a == doctest::Approx(manual2.a));
  CHECK(inv2.d == doctest::Approx(manual2.d));

  CHECK_THROWS_AS(Mobius({1.0, 2.0, 2.0, 4.0}).inverse(), ProjError);
}

TEST_CASE("exact classification of canonical integer matrices") {
  CHECK(classify_exact(0, -1, 1, 0).tag == MobiusTag::Elliptic);
  MobiusClass par = classify_exact(1, 1, 0, 1);
  CHECK(par.tag == MobiusTag::Parabolic);
  REQUIRE(par.fixed_points.size() == 1);
  CHECK(std::isinf(par.fixed_points[0]));

  MobiusClass hyp = classify_exact(4, 0, 0, 1);
  CHECK(hyp.tag == MobiusTag::Hyperbolic);
  REQUIRE(hyp.fixed_points.size() == 2);
  CHECK(hyp.fixed_points[0] == doctest::Approx(0.0));
  CHECK(std::isinf(hyp.fixed_points[1]));

  CHECK(classify_exact(3, 0, 0, 3).tag == MobiusTag::Identity);
  CHECK_THROWS_AS(classify_exact(1, 2, 2, 4), ProjError);
}

TEST_CASE("orientation-reversing maps classify through their square") {
  MobiusClass inv = classify_exact(0, 1, 1, 0);  // z -> 1/z, an involution
  CHECK(inv.orientation_reversing);
  CHECK(inv.tag == MobiusTag::Identity);
  REQUIRE(inv.fixed_points.size() == 2);
  CHECK(inv.fixed_points[0] == doctest::Approx(-1.0));
  CHECK(inv.fixed_points[1] == doctest::Approx(1.0));

  MobiusClass rev = classify_exact(2, 0, 0, -1);
  CHECK(rev.orientation_reversing);
  CHECK(rev.tag == MobiusTag::Hyperbolic);

  // Floating classification agrees on the same data.
  MobiusClass f = classify({2.0, 0.0, 0.0, -1.0});
  CHECK(f.orientation_reversing);
  CHECK(f.tag == MobiusTag::Hyperbolic);
}

TEST_CASE("floating and exact classification agree on integer samples") {
  const long long cases[][4] = {
      {0, -1, 1, 0}, {1, 1, 0, 1}, {4, 0, 0, 1}, {2, 1, 1, 1},
      {0, 2, -1, 3}, {1, 0, -1, 2}, {5, 5, 0, 5}, {3, 1, -1, 1},
  };
  for (const auto& c : cases) {
    MobiusClass exact = classify_exact(c[0], c[1], c[2], c[3]);
    MobiusClass flt = classify({double(c[0]), double(c[1]), double(c[2]), double(c[3])});
    CHECK(exact.tag == flt.tag);
    CHECK(exact.orientation_reversing == flt.orientation_reversing);
  }
}

TEST_CASE("homographic action and the group law") {
  Mobius m1{2.0, 1.0, 1.0, 1.0};
  Mobius m2{0.0, -1.0, 1.0, 0.5};
  const double zs[] = {-2.0, -0.5, 0.0, 0.3, 1.7, 100.0};
  for (double z : zs) {
    const double lhs = act(m1 * m2, z);
    const double rhs = act(m1, act(m2, z));
    if (std::isinf(lhs) || std::isinf(rhs)) {
      CHECK(std::isinf(lhs));
      CHECK(std::isinf(rhs));
    } else {
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
  // Poles route through infinity: z = -0.5 is the pole of m2.
  CHECK(std::isinf(act(m2, -0.5)));
  CHECK(act(m1, std::numeric_limits<double>::infinity()) == doctest::Approx(2.0));

  // Complex action: the elliptic rotation z -> -1/z fixes i.
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> w = act(Mobius{0.0, -1.0, 1.0, 0.0}, i);
  CHECK(std::abs(w - i) < 1e-15);
}

TEST_CASE("classification is conjugation invariant") {
  Rng rng(77);
  const Mobius reps[] = {
      {0.0, -1.0, 1.0, 0.0},  // elliptic
      {1.0, 1.0, 0.0, 1.0},   // parabolic
      {0.0, 2.0, -1.0, 3.0},  // hyperbolic
  };
  for (const Mobius& m : reps) {
    const MobiusTag want = classify(m).tag;
    for (int trial = 0; trial < 10; ++trial) {
      Mobius p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
      if (std::abs(p.det()) < 0.1) continue;
      const Mobius conj = p * m * p.inverse();
      CHECK(classify(conj).tag == want);
    }
  }
}

TEST_CASE("conjugation transports fixed points") {
  Mobius c{0.0, 2.0, -1.0, 3.0};
  Mobius p{1.0, -1.0, 1.0, 1.0};
  MobiusClass base = classify(c);
  MobiusClass moved = classify(p * c * p.inverse());
  REQUIRE(base.fixed_points.size() == 2);
  REQUIRE(moved.fixed_points.size() == 2);
  std::vector<double> transported = {act(p, base.fixed_points[0]), act(p, base.fixed_points[1])};
  std::sort(transported.begin(), transported.end());
  CHECK(moved.fixed_points[0] == doctest::Approx(transported[0]).epsilon(1e-10));
  CHECK(moved.fixed_points[1] == doctest::Approx(transported[1]).epsilon(1e-10));
}

TEST_CASE("fiberwise matrix action matches the scalar action on spectra") {
  Mobius m{2.0, 1.0, 1.0, 1.0};
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(2, 2);
  X.diagonal() << 1.0, 3.0;
  const Eigen::MatrixXd Y = act(m, X);
  CHECK(Y(0, 0) == doctest::Approx(act(m, 1.0)));
  CHECK(Y(1, 1) == doctest::Approx(act(m, 3.0)));
  CHECK(std::abs(Y(0, 1)) < 1e-15);

  // Denominator singular at an eigenvalue equal to the pole.
  Mobius inv{0.0, -1.0, 1.0, 0.0};
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
  Z.diagonal() << 0.0, 1.0;
  CHECK_THROWS_AS(act(inv, Z), ProjError);
}

TEST_CASE("multiplier values at hyperbolic fixed points") {
  Mobius c{0.0, 2.0, -1.0, 3.0};
  CHECK(multiplier_at(c, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(multiplier_at(c, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  // The two multipliers of any homography multiply to 1.
  CHECK(multiplier_at(c, 1.0) * multiplier_at(c, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(multiplier_at(Mobius{3.0, 0.0, 1.0, -1.0}, 1.0), ProjError);
}

TEST_CASE("normalized products stabilize inside the basin") {
  Mobius c{0.0, 2.0, -1.0, 3.0};  // fixed points 1 and 2, multiplier 1/2 at 1

  // Seeding at the attracting fixed point freezes the product there.
  std::vector<double> at_fp = product_limit(c, 1.0, 12);
  for (double p : at_fp) CHECK(p == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> ps = product_limit(c, 1.7, 30);
  REQUIRE(ps.size() == 30);
  const double tail = std::abs(ps[29] - ps[28]);
  CHECK(tail < 1e-8 * std::max(1.0, std::abs(ps[29])));
  // Successive difference ratios approach the multiplier 1/2.
  const double d1 = ps[25] - ps[24];
  const double d2 = ps[26] - ps[25];
  CHECK(d2 / d1 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("product limit input validation") {
  Mobius c{0.0, 2.0, -1.0, 3.0};
  CHECK_THROWS_AS(product_limit(c, 2.0, 10), ProjError);   // z = repelling point
  CHECK_THROWS_AS(product_limit(c, 0.9, 10), ProjError);   // below the basin
  CHECK_NOTHROW(product_limit(c, 1.95, 10));
  CHECK_THROWS_AS(product_limit(c, 1.5, 0), ProjError);

  CHECK_THROWS_AS(product_limit(Mobius{1.0, 1.0, 0.0, 1.0}, 0.5, 10), ProjError);   // parabolic
  CHECK_THROWS_AS(product_limit(Mobius{0.0, -1.0, 1.0, 0.0}, 0.5, 10), ProjError);  // elliptic
  CHECK_THROWS_AS(product_limit(Mobius{2.0, 0.0, 0.0, -1.0}, 0.5, 10), ProjError);  // det < 0

  try {
    product_limit(Mobius{1.0, 0.0, -1.0, 2.0}, 0.5, 10);  // fixed points {0, 1}
    CHECK(false);
  } catch (const ProjError& e) {
    CHECK(e.code() == ErrorCode::ZeroFixedPoint);
  }
}

TEST_CASE("eigenvalue product constraints") {
  CorollaryReport rep = corollary_inequalities(0.5, 2.0, 1, 1);
  CHECK(rep.product_minus == doctest::Approx(0.5));
  CHECK(rep.product_plus == doctest::Approx(2.0));
  CHECK(rep.minus_leq_one);
  CHECK(rep.plus_geq_one);
  CHECK(rep.bracket);
  CHECK(rep.all());

  CorollaryReport skew = corollary_inequalities(0.9, 1.2, 3, 1);
  CHECK(skew.product_minus == doctest::Approx(std::pow(0.9, 4) * 1.2));
  CHECK(skew.bracket);

  CHECK_THROWS_AS(corollary_inequalities(-1.0, 2.0, 1, 1), ProjError);
  CHECK_THROWS_AS(corollary_inequalities(2.0, 0.5, 1, 1), ProjError);
  CHECK_THROWS_AS(corollary_inequalities(0.5, 2.0, -1, 1), ProjError);
}

TEST_CASE("sector merging") {
  SectorDecomposition s =
      degenerate_sectors({{1.0, 2.0}, {1.5, 3.0}, {5.0, 6.0}});
  REQUIRE(s.sectors.size() == 2);
  CHECK(s.sectors[0].lo == doctest::Approx(1.0));
  CHECK(s.sectors[0].hi == doctest::Approx(3.0));
  CHECK(s.sectors[1].lo == doctest::Approx(5.0));

  SectorDecomposition touch = degenerate_sectors({{1.0, 2.0}, {2.0, 3.0}});
  REQUIRE(touch.sectors.size() == 1);
  CHECK(touch.sectors[0].hi == doctest::Approx(3.0));

  CHECK_THROWS_AS(degenerate_sectors({}), ProjError);
  CHECK_THROWS_AS(degenerate_sectors({{2.0, 1.0}}), ProjError);
}

TEST_CASE("distortion factor identities") {
  DistortionFactors f = distortion_factors(0.5, 2.0, 1.3, 1, 1);
  const double lhs = f.zeta_minus_sq * f.zeta_lambda_sq * f.zeta_plus_sq;
  CHECK(lhs == doctest::Approx(f.jac_sq).epsilon(1e-14));

  // Multiplicities enter as exponents.
  DistortionFactors g = distortion_factors(0.5, 2.0, 1.3, 2, 3);
  const double lhs_g = std::pow(g.zeta_minus_sq, 2) * g.zeta_lambda_sq *
                       std::pow(g.zeta_plus_sq, 3);
  CHECK(lhs_g == doctest::Approx(g.jac_sq).epsilon(1e-12));

  // Data transported through the inverse map pairs off against the original:
  // zeta_+^2 of the starred data times zeta_-^2 of the original is 1.
  DistortionFactors starred = distortion_factors(1.0 / 2.0, 1.0 / 0.5, 1.0 / 1.3, 1, 1);
  CHECK(starred.zeta_plus_sq * f.zeta_minus_sq == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(distortion_factors(0.0, 2.0, 1.0, 1, 1), ProjError);
}

TEST_CASE("spectrum clouds of closed-form tensors") {
  MatveevExample ex = matveev_default();
  SpectrumCloud cloud = spectrum_cloud(ex.K_closed_form.field, ex.g.domain, 6, 0.1);
  CHECK(cloud.samples.size() == 6 * 6 * 2);
  CHECK(cloud.conjugation_defect() < 1e-14);

  std::ostringstream os;
  cloud.to_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("re,im,x_1,x_2\n", 0) == 0);
  std::size_t rows = 0;
  for (char ch : text) rows += (ch == '\n');
  CHECK(rows == cloud.samples.size() + 1);

  // A rotation-like tensor has conjugate complex pairs at every point.
  Tensor11Field rot;
  rot.eval = [](const Point&) {
    Eigen::MatrixXd M(2, 2);
    M << 0.0, -1.0, 1.0, 0.0;
    return M;
  };
  Metric flat = constant_curvature_chart(2, 0);
  SpectrumCloud spin = spectrum_cloud(rot, flat.domain, 3, 0.0);
  CHECK(spin.conjugation_defect() < 1e-14);
  bool has_imag = false;
  for (const SpectrumSample& s : spin.samples) has_imag |= std::abs(s.value.imag()) > 0.5;
  CHECK(has_imag);
}

TEST_CASE("strength-action coefficients for the identity map") {
  Metric flat = constant_curvature_chart(2, 0);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D.diagonal() << 2.0, 3.0;
  HomographyCoeffs hc = solve_alpha_beta(DiffeoOnChart::identity(2), constant_L(D, flat), flat);
  // K^2 = (tr K) K - (det K) I by Cayley-Hamilton.
  CHECK(hc.alpha == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(hc.beta == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(hc.residual < 1e-12);
  // The identity is an isometry: rho acts trivially on span{K, I}.
  Mobius rho = hc.rho_matrix();
  CHECK(rho.a == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(rho.b) < 1e-10);
  CHECK(std::abs(rho.c) < 1e-10);
  CHECK(rho.d == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("isometries leave the pencil representation at the identity") {
  Metric flat = constant_curvature_chart(2, 0);
  Eigen::VectorXd b(2);
  b << 0.15, -0.1;
  DiffeoOnChart shift;
  shift.forward = [b](const Point& p) -> Point { return p + b; };
  shift.inverse = [b](const Point& p) -> Point { return p - b; };
  shift.differential = [](const Point&) { return Eigen::MatrixXd::Identity(2, 2).eval(); };

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D.diagonal() << 2.0, 3.0;
  HomographyCoeffs hc = solve_alpha_beta(shift, constant_L(D, flat), flat);
  Mobius rho = hc.rho_matrix();
  CHECK(std::abs(rho.det() - 1.0) < 1e-9);
  CHECK(std::abs(rho.b) < 1e-10);
  CHECK(std::abs(rho.c) < 1e-10);
}

TEST_CASE("scalar tensors cannot anchor the fit") {
  Metric flat = constant_curvature_chart(2, 0);
  LTensor twoI = constant_L(2.0 * Eigen::MatrixXd::Identity(2, 2), flat);
  CHECK_THROWS_AS(solve_alpha_beta(DiffeoOnChart::identity(2), twoI, flat), ProjError);
  try {
    solve_alpha_beta(DiffeoOnChart::identity(2), twoI, flat);
  } catch (const ProjError& e) {
    CHECK(e.code() == ErrorCode::ScalarK);
  }
}

TEST_CASE("fits outside the pencil are rejected") {
  Metric flat = constant_curvature_chart(2, 0);
  Tensor11Field K;
  K.eval = [](const Point& x) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(2, 2);
    M(0, 0) = x[0] + 2.0;
    return M;
  };
  CHECK_THROWS_AS(solve_alpha_beta(scaling(0.5, 2), make_ltensor(K, flat), flat), ProjError);
  try {
    solve_alpha_beta(scaling(0.5, 2), make_ltensor(K, flat), flat);
  } catch (const ProjError& e) {
    CHECK(e.code() == ErrorCode::BadFit);
  }
}

TEST_CASE("involution coefficients and equivariance of the swap surface") {
  MatveevExample ex = matveev_default();
  HomographyCoeffs hc = solve_alpha_beta(ex.sigma, ex.K_closed_form, ex.g, 8, 0.3);
  CHECK(std::abs(hc.alpha) < 1e-10);
  CHECK(hc.beta == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(hc.residual < 1e-10);

  Mobius A = hc.A();
  CHECK(A.det() < 0.0);
  Mobius A2 = A.pow(2).normalized();
  CHECK(A2.a == doctest::Approx(A2.d).epsilon(1e-9));
  CHECK(std::abs(A2.b) < 1e-9);
  CHECK(std::abs(A2.c) < 1e-9);

  Mobius rho = hc.rho_matrix();
  CHECK(rho.det() < 0.0);

  CHECK(iterate_check(ex.sigma, ex.K_closed_form, ex.g, A, 2, 5, 0.3) < 1e-10);
  CHECK(spectral_equivariance(ex.sigma, ex.K_closed_form, A, 50) < 1e-10);

  // A wrong action matrix leaves a visible equivariance defect.
  CHECK(spectral_equivariance(ex.sigma, ex.K_closed_form, Mobius::identity(), 50) > 0.1);
}
