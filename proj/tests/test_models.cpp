#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "projequiv/models.hpp"
#include "projequiv/projective.hpp"

using namespace projequiv;

namespace {

Point pt2(double a, double b) {
  Point p(2);
  p << a, b;
  return p;
}

ScalarField const_field(double v) {
  return {[v](const Point&) { return v; }, [](const Point&, int) { return 0.0; }};
}

// Central difference of a field evaluation, bypassing any stored partial.
template <typename Field>
Eigen::MatrixXd eval_difference(const Field& f, const ChartDomain& dom, const Point& x,
                                int axis) {
  Field stripped = f;
  stripped.partial = nullptr;
  return fd_partial(stripped, dom, x, axis, FDConfig{});
}

}  // namespace

TEST_CASE("surface pair validation") {
  ChartDomain dom({{0.0, 1.0}, {0.0, 1.0}}, 9);
  ScalarField sinX{[](const Point& p) { return 2.0 + std::sin(p[0]); }, nullptr};

  // inf X = 2 on this chart, so a constant 2.5 overlaps the X range.
  CHECK_THROWS_AS(dini_pair(sinX, const_field(2.5), dom), ProjError);
  try {
    dini_pair(sinX, const_field(2.5), dom);
  } catch (const ProjError& e) {
    CHECK(e.code() == ErrorCode::RangeOverlap);
  }

  CHECK_THROWS_AS(dini_pair(sinX, const_field(-0.5), dom), ProjError);
  try {
    dini_pair(sinX, const_field(-0.5), dom);
  } catch (const ProjError& e) {
    CHECK(e.code() == ErrorCode::PositivityFailure);
  }

  ChartDomain dom3({{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}, 9);
  CHECK_THROWS_AS(dini_pair(sinX, const_field(0.5), dom3), ProjError);
}

TEST_CASE("surface pair closed forms and derivative consistency") {
  DiniPair pair = dini_default();
  const Point x = pt2(1.1, 2.3);
  const double X = 4.0 + std::sin(1.1);
  const double Y = 1.5 + 0.4 * std::sin(2.3);

  const Eigen::MatrixXd G = pair.g.eval(x);
  CHECK(G(0, 0) == doctest::Approx(X - Y).epsilon(1e-14));
  CHECK(G(1, 1) == doctest::Approx(X - Y).epsilon(1e-14));
  CHECK(G(0, 1) == 0.0);

  const double A = 1.0 / Y - 1.0 / X;
  const Eigen::MatrixXd Gb = pair.g_bar.eval(x);
  CHECK(Gb(0, 0) == doctest::Approx(A / X).epsilon(1e-14));
  CHECK(Gb(1, 1) == doctest::Approx(A / Y).epsilon(1e-14));

  const Eigen::MatrixXd L = pair.L.field.eval(x);
  CHECK(L(0, 0) == doctest::Approx(X).epsilon(1e-14));
  CHECK(L(1, 1) == doctest::Approx(Y).epsilon(1e-14));

  // Stored analytic derivatives must match direct differencing of the
  // evaluations for every field of the pair.
  for (int axis = 0; axis < 2; ++axis) {
    CHECK((pair.g.g.partial(x, axis) - eval_difference(pair.g.g, pair.g.domain, x, axis))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
    CHECK((pair.g_bar.g.partial(x, axis) -
           eval_difference(pair.g_bar.g, pair.g_bar.domain, x, axis))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
    CHECK((pair.L.field.partial(x, axis) -
           eval_difference(pair.L.field, pair.g.domain, x, axis))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("constant-profile pair is affinely related") {
  DiniPair pair = dini_constant();
  const Point x = pt2(1.0, 2.0);
  CHECK((pair.g.eval(x) - 2.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  // Constant L over a flat metric solves the linearized equation exactly.
  CHECK(sinjukov_residual(pair.L) < 1e-13);
}

TEST_CASE("swap surface: closed-form strength and involution") {
  MatveevExample ex = matveev_default();
  CHECK(diffeo_roundtrip_error(ex.sigma, ex.g.domain) < 1e-15);

  StrengthPair sp = strength_of(ex.sigma, ex.g);
  Rng rng(3);
  for (int s = 0; s < 10; ++s) {
    const Point x = ex.g.domain.random_interior(rng, 0.1);
    CHECK((sp.K.eval(x) - ex.K_closed_form.field.eval(x)).cwiseAbs().maxCoeff() < 1e-12);
  }

  // sigma swaps the coordinates, so sigma_* K = K^{-1} pointwise.
  const Point x = pt2(1.3, 2.1);
  const Eigen::MatrixXd pushed = push_forward(ex.sigma, ex.K_closed_form.field).eval(x);
  const Eigen::MatrixXd Kinv = ex.K_closed_form.field.eval(x).inverse();
  CHECK((pushed - Kinv).cwiseAbs().maxCoeff() < 1e-13);

  // The swap is never an isometry on this family: K != I.
  CHECK((sp.K.eval(x) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() > 0.5);
}

TEST_CASE("swap surface validation") {
  ScalarField a{[](const Point& p) { return 3.0 + std::sin(p[0]); }, nullptr};
  ChartDomain rect({{0.0, 2.0}, {0.0, 1.0}}, 9);
  CHECK_THROWS_AS(matveev_example(a, rect), ProjError);  // needs a square chart

  ScalarField low{[](const Point& p) { return 0.9 + 0.05 * std::sin(p[0]); }, nullptr};
  ChartDomain square({{0.0, 2.0}, {0.0, 2.0}}, 9);
  CHECK_THROWS_AS(matveev_example(low, square), ProjError);
  try {
    matveev_example(low, square);
  } catch (const ProjError& e) {
    CHECK(e.code() == ErrorCode::PositivityFailure);
  }

  // Constant profile: strength is the constant diag(a, 1/a).
  MatveevExample flat_profile = matveev_example(const_field(2.0), square);
  const Eigen::MatrixXd K = strength_of(flat_profile.sigma, flat_profile.g).K.eval(pt2(1.0, 1.0));
  CHECK(K(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(K(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("constant curvature chart catalogue") {
  CHECK_THROWS_AS(constant_curvature_chart(2, 5), ProjError);
  CHECK_THROWS_AS(constant_curvature_chart(0, 0), ProjError);

  Metric flat = constant_curvature_chart(3, 0);
  CHECK(flat.p == 3);
  CHECK(flat.q == 0);
  CHECK_NOTHROW(validate_signature(flat));

  Metric sphere = constant_curvature_chart(2, 1);
  const Point o = pt2(0.0, 0.0);
  CHECK(sphere.eval(o)(0, 0) == doctest::Approx(4.0));

  Metric hyp = constant_curvature_chart(2, -1);
  Point h(2);
  h << 0.0, 1.0;
  CHECK(hyp.eval(h)(0, 0) == doctest::Approx(1.0));
  // Analytic partials of all three charts agree with differencing.
  for (Metric* m : {&flat, &sphere, &hyp}) {
    const Point c = m->domain.center();
    for (int axis = 0; axis < m->dim(); ++axis) {
      CHECK((m->g.partial(c, axis) - eval_difference(m->g, m->domain, c, axis))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("projective line chart is the round sphere of curvature 2") {
  Metric fs = fubini_study(1);
  CHECK(fs.dim() == 2);
  const Point o = pt2(0.0, 0.0);
  CHECK((fs.eval(o) - 2.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  CurvatureData curv = curvature(fs);
  Rng rng(13);
  for (int s = 0; s < 5; ++s) {
    const Point x = fs.domain.random_interior(rng, 0.1);
    Eigen::VectorXd u = rng.unit_vector(2), v = rng.unit_vector(2);
    if (std::abs(u.dot(v)) > 0.99) continue;
    CHECK(sectional_curvature(curv, fs, x, u, v) == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("plane chart of the two-dimensional projective space") {
  Metric fs2 = fubini_study(2);
  CHECK(fs2.dim() == 4);
  CHECK(fs2.p == 4);
  const Point o = Eigen::VectorXd::Zero(4);
  CHECK((fs2.eval(o) - 2.0 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_NOTHROW(validate_signature(fs2));
  CHECK_THROWS_AS(fubini_study(0), ProjError);
}

TEST_CASE("antiholomorphic inversion is an isometry of the line chart") {
  // w = -z / |z|^2 realified, with its exact Jacobian.
  ChartMap inv;
  inv.dim_in = 2;
  inv.dim_out = 2;
  inv.eval = [](const Point& p) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    return Point(pt2(-p[0] / r2, -p[1] / r2));
  };
  inv.differential = [](const Point& p) {
    const double u = p[0], v = p[1];
    const double r4 = (u * u + v * v) * (u * u + v * v);
    Eigen::MatrixXd J(2, 2);
    J << (u * u - v * v), 2.0 * u * v, 2.0 * u * v, (v * v - u * u);
    return (J / r4).eval();
  };

  ChartDomain source({{0.35, 0.65}, {0.35, 0.65}}, 9);
  Metric target = fubini_study(1, 0, 3.5, 9);
  Metric pulled = pullback_metric(inv, target, source);
  Metric reference = fubini_study(1, 0, 0.7, 9);

  Rng rng(19);
  for (int s = 0; s < 8; ++s) {
    const Point x = source.random_interior(rng, 0.02);
    CHECK((pulled.eval(x) - reference.eval(x)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pullback rejects maps that leave the target chart") {
  ChartMap big;
  big.dim_in = 2;
  big.dim_out = 2;
  big.eval = [](const Point& p) { return Point(10.0 * p); };
  big.differential = [](const Point&) {
    return (10.0 * Eigen::MatrixXd::Identity(2, 2)).eval();
  };
  ChartDomain source({{0.1, 0.3}, {0.1, 0.3}}, 9);
  Metric target = fubini_study(1);  // half width 0.7
  CHECK_THROWS_AS(pullback_metric(big, target, source), ProjError);
}

TEST_CASE("chart map composition and products") {
  ChartMap f;  // R^2 -> R^2 affine
  f.dim_in = 2;
  f.dim_out = 2;
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 2.0, 0.0, 1.0;
  f.eval = [A](const Point& p) { return Point(A * p); };
  f.differential = [A](const Point&) { return A; };

  ChartMap g;  // R^2 -> R^2 quadratic
  g.dim_in = 2;
  g.dim_out = 2;
  g.eval = [](const Point& p) { return Point(pt2(p[0] * p[0], p[1])); };
  g.differential = [](const Point& p) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(2, 2);
    J(0, 0) = 2.0 * p[0];
    return J;
  };

  ChartMap fg = compose(f, g);
  const Point x = pt2(0.3, 0.4);
  CHECK((fg.eval(x) - f.eval(g.eval(x))).norm() < 1e-15);
  CHECK((fg.jacobian(x) - A * g.differential(x)).cwiseAbs().maxCoeff() < 1e-14);

  ChartMap both = product_map(f, g);
  CHECK(both.dim_in == 4);
  CHECK(both.dim_out == 4);
  Point xy(4);
  xy << 0.3, 0.4, 0.5, 0.6;
  const Point out = both.eval(xy);
  CHECK(out[0] == doctest::Approx((A * pt2(0.3, 0.4))[0]));
  CHECK(out[2] == doctest::Approx(0.25));
  const Eigen::MatrixXd J = both.jacobian(xy);
  CHECK(J.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(J.bottomLeftCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degree map dimensions and weights") {
  CHECK(veronese(1, 1).N == 1);
  CHECK(veronese(1, 2).N == 2);
  CHECK(veronese(1, 3).N == 3);
  CHECK(veronese(2, 2).N == 5);
  CHECK(veronese(3, 2).N == 9);
  CHECK_THROWS_AS(veronese(0, 2), ProjError);
  CHECK_THROWS_AS(veronese(1, 0), ProjError);

  // Degree 1 is the identity chart map.
  VeroneseMap v1 = veronese(1, 1);
  const Point z = pt2(0.3, -0.2);
  CHECK((v1.map.eval(z) - z).norm() < 1e-15);

  // Degree 2 on the line: w = (sqrt(2) z, z^2) in the affine chart.
  VeroneseMap v2 = veronese(1, 2);
  CHECK(v2.map.dim_in == 2);
  CHECK(v2.map.dim_out == 4);
  const std::complex<double> zc(0.3, -0.2);
  const std::complex<double> z2 = zc * zc;
  const Point w = v2.map.eval(z);
  CHECK(w[0] == doctest::Approx(std::sqrt(2.0) * zc.real()).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(z2.real()).epsilon(1e-14));
  CHECK(w[2] == doctest::Approx(std::sqrt(2.0) * zc.imag()).epsilon(1e-14));
  CHECK(w[3] == doctest::Approx(z2.imag()).epsilon(1e-14));
}

TEST_CASE("embedding differentials match direct differencing") {
  VeroneseMap v = veronese(2, 2);
  Rng rng(29);
  ChartDomain box({{-0.3, 0.3}, {-0.3, 0.3}, {-0.3, 0.3}, {-0.3, 0.3}}, 9);
  for (int s = 0; s < 4; ++s) {
    Point z(4);
    for (int i = 0; i < 4; ++i) z[i] = rng.uniform(-0.25, 0.25);
    const Eigen::MatrixXd J = v.map.differential(z);
    ChartMap stripped = v.map;
    stripped.differential = nullptr;
    const Eigen::MatrixXd Jfd = stripped.jacobian(z);
    CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-8);
  }

  SegreMap sg = segre(1, 1);
  Point x(4);
  x << 0.2, -0.1, 0.15, 0.3;
  ChartMap stripped = sg.map;
  stripped.differential = nullptr;
  CHECK((sg.map.differential(x) - stripped.jacobian(x)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("degree-k pullback scales the line metric by k") {
  for (int k : {1, 2, 3}) {
    VeroneseMap v = veronese(1, k);
    ChartDomain source({{-0.25, 0.25}, {-0.25, 0.25}}, 9);
    Metric target = fubini_study(v.N, 0, 0.8, 9);
    Metric pulled = pullback_metric(v.map, target, source);
    Metric base = fubini_study(1, 0, 0.25, 9);
    Rng rng(41);
    for (int s = 0; s < 6; ++s) {
      const Point x = source.random_interior(rng, 0.01);
      const Eigen::MatrixXd got = pulled.eval(x);
      const Eigen::MatrixXd want = (double(k) * base.eval(x)).eval();
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, want.norm()));
    }
  }
}

TEST_CASE("product embedding pulls back to the direct sum") {
  SegreMap sg = segre(1, 1);
  CHECK(sg.N == 3);
  CHECK(sg.map.dim_in == 4);
  CHECK(sg.map.dim_out == 6);

  // Coordinates of the image in the lexicographic affine chart.
  Point x(4);
  x << 0.3, 0.1, -0.2, 0.4;
  const std::complex<double> z(0.3, 0.1), zeta(-0.2, 0.4);
  const std::complex<double> prod = z * zeta;
  const Point w = sg.map.eval(x);
  CHECK(w[0] == doctest::Approx(zeta.real()).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(z.real()).epsilon(1e-14));
  CHECK(w[2] == doctest::Approx(prod.real()).epsilon(1e-14));
  CHECK(w[3] == doctest::Approx(zeta.imag()).epsilon(1e-14));
  CHECK(w[4] == doctest::Approx(z.imag()).epsilon(1e-14));
  CHECK(w[5] == doctest::Approx(prod.imag()).epsilon(1e-14));

  ChartDomain source(std::vector<Interval>(4, Interval{-0.25, 0.25}), 9);
  Metric target = fubini_study(3, 0, 0.8, 9);
  Metric pulled = pullback_metric(sg.map, target, source);
  Metric factor = fubini_study(1, 0, 0.25, 9);
  Metric want = direct_sum_metric(factor, factor);
  Rng rng(43);
  for (int s = 0; s < 6; ++s) {
    const Point p = source.random_interior(rng, 0.01);
    CHECK((pulled.eval(p) - want.eval(p)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("direct sums concatenate charts and signatures") {
  Metric s2 = constant_curvature_chart(2, 1);
  Metric h2 = constant_curvature_chart(2, -1);
  Metric sum = direct_sum_metric(s2, h2);
  CHECK(sum.dim() == 4);
  CHECK(sum.p == 4);
  CHECK(sum.q == 0);
  Point x(4);
  x << 0.1, -0.2, 0.3, 1.0;
  const Eigen::MatrixXd G = sum.eval(x);
  CHECK((G.topLeftCorner(2, 2) - s2.eval(pt2(0.1, -0.2))).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((G.bottomRightCorner(2, 2) - h2.eval(pt2(0.3, 1.0))).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(G.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model registry") {
  const std::vector<std::string> ids = model_ids();
  CHECK(ids.size() == 13);
  CHECK(std::find(ids.begin(), ids.end(), "dini:default") != ids.end());
  CHECK(std::find(ids.begin(), ids.end(), "warped:default") != ids.end());
  for (const std::string& id : ids) {
    Metric m = model_metric(id);
    CHECK(m.dim() >= 2);
    CHECK_NOTHROW(validate_signature(m));
  }
  CHECK_THROWS_AS(model_metric("nope:1"), ProjError);
  try {
    model_metric("nope:1");
  } catch (const ProjError& e) {
    CHECK(std::string(e.what()).find("known") != std::string::npos);
  }
}
