#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "projequiv/chart.hpp"
#include "projequiv/parallel.hpp"

using namespace projequiv;

namespace {

ChartDomain unit_box(int d, int res = 9) {
  return ChartDomain(std::vector<Interval>(d, Interval{0.0, 1.0}), res);
}

ScalarField sin_x0() {
  return {[](const Point& p) { return std::sin(p[0]); }, nullptr};
}

}  // namespace

TEST_CASE("interval basics") {
  Interval iv{2.0, 5.0};
  CHECK(iv.length() == 3.0);
  CHECK(iv.contains(2.0));
  CHECK(iv.contains(5.0));
  CHECK_FALSE(iv.contains(5.0001));
  CHECK_FALSE(iv.contains(2.05, 0.1));
  CHECK(iv.contains(2.15, 0.1));
}

TEST_CASE("chart domain geometry") {
  ChartDomain dom({{0.0, 2.0}, {0.0, 3.0}}, 11);
  CHECK(dom.dim() == 2);
  CHECK(dom.grid_res() == 11);
  CHECK(dom.box_volume() == doctest::Approx(6.0));
  CHECK(dom.center()[0] == doctest::Approx(1.0));
  CHECK(dom.center()[1] == doctest::Approx(1.5));

  Point in(2), out(2);
  in << 1.0, 1.0;
  out << 1.0, 3.5;
  CHECK(dom.contains(in));
  CHECK_FALSE(dom.contains(out));
  CHECK_NOTHROW(dom.require_inside(in));
  CHECK_THROWS_AS(dom.require_inside(out), ProjError);
  try {
    dom.require_inside(out);
  } catch (const ProjError& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}

TEST_CASE("axis grid endpoints, spacing, margin") {
  ChartDomain dom({{0.0, 1.0}}, 9);
  auto xs = dom.axis_grid(0, 5);
  REQUIRE(xs.size() == 5);
  CHECK(xs.front() == doctest::Approx(0.0));
  CHECK(xs.back() == doctest::Approx(1.0));
  CHECK(xs[2] == doctest::Approx(0.5));

  auto ys = dom.axis_grid(0, 3, 0.25);
  CHECK(ys.front() == doctest::Approx(0.25));
  CHECK(ys.back() == doctest::Approx(0.75));

  auto single = dom.axis_grid(0, 1);
  CHECK(single[0] == doctest::Approx(0.5));

  CHECK_THROWS_AS(dom.axis_grid(0, 0), ProjError);
  CHECK_THROWS_AS(dom.axis_grid(0, 3, 0.6), ProjError);
}

TEST_CASE("grid sweep is row-major with the last axis fastest") {
  ChartDomain dom({{0.0, 1.0}, {10.0, 20.0}}, 9);
  std::vector<Point> pts;
  dom.for_each_grid_point(3, 0.0, [&](const Point& p) { pts.push_back(p); });
  REQUIRE(pts.size() == 9);
  CHECK(pts[0][0] == doctest::Approx(0.0));
  CHECK(pts[0][1] == doctest::Approx(10.0));
  CHECK(pts[1][0] == doctest::Approx(0.0));
  CHECK(pts[1][1] == doctest::Approx(15.0));
  CHECK(pts[3][0] == doctest::Approx(0.5));
  CHECK(pts[3][1] == doctest::Approx(10.0));
  CHECK(pts[8][0] == doctest::Approx(1.0));
  CHECK(pts[8][1] == doctest::Approx(20.0));
}

TEST_CASE("random interior respects margins and is deterministic") {
  ChartDomain dom({{0.0, 1.0}, {-2.0, 2.0}}, 9);
  Rng rng1(7), rng2(7);
  for (int i = 0; i < 200; ++i) {
    Point p = dom.random_interior(rng1, 0.1);
    CHECK(dom.contains(p, 0.1));
    Point q = dom.random_interior(rng2, 0.1);
    CHECK((p - q).norm() == 0.0);
  }
}

TEST_CASE("rng streams are reproducible and well ranged") {
  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i) CHECK(a.uniform() == b.uniform());

  Rng r(3);
  std::set<int> seen;
  for (int i = 0; i < 200; ++i) {
    const int k = r.uniform_int(2, 5);
    CHECK(k >= 2);
    CHECK(k <= 5);
    seen.insert(k);
  }
  CHECK(seen.size() == 4);

  double mean = 0.0, m2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double g = r.gaussian();
    mean += g;
    m2 += g * g;
  }
  mean /= n;
  const double var = m2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == doctest::Approx(1.0).epsilon(0.1));

  CHECK(r.unit_vector(5).norm() == doctest::Approx(1.0));
}

TEST_CASE("fd config validation") {
  FDConfig ok;
  CHECK_NOTHROW(ok.validate());
  FDConfig bad_order;
  bad_order.order = 3;
  CHECK_THROWS_AS(bad_order.validate(), ProjError);
  FDConfig bad_step;
  bad_step.step = 0.0;
  CHECK_THROWS_AS(bad_step.validate(), ProjError);
}

TEST_CASE("fd margin covers nested stencils") {
  FDConfig cfg;
  const double m = fd_margin(cfg);
  CHECK(m > 2.0 * (cfg.step + cfg.step2));
  CHECK(m < 2.001 * (cfg.step + cfg.step2));
}

TEST_CASE("central difference of sin matches cos") {
  ChartDomain dom = unit_box(1);
  Point p(1);
  p << 0.3;
  FDConfig cfg;  // order 4, step 1e-3
  const double d = fd_partial(sin_x0(), dom, p, 0, cfg);
  CHECK(d == doctest::Approx(std::cos(0.3)).epsilon(1e-11));

  // Quadratics are differentiated exactly by the order-4 stencil.
  ScalarField sq{[](const Point& q) { return q[0] * q[0]; }, nullptr};
  p << 0.4;
  CHECK(fd_partial(sq, dom, p, 0, cfg) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("order-2 differences shrink like h^2") {
  ChartDomain dom = unit_box(1);
  Point p(1);
  p << 0.3;
  FDConfig coarse;
  coarse.order = 2;
  coarse.step = 1e-2;
  FDConfig fine = coarse;
  fine.step = 5e-3;
  const double e1 = std::abs(fd_partial(sin_x0(), dom, p, 0, coarse) - std::cos(0.3));
  const double e2 = std::abs(fd_partial(sin_x0(), dom, p, 0, fine) - std::cos(0.3));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("analytic partial wins over differencing") {
  ChartDomain dom = unit_box(1);
  ScalarField f{[](const Point& p) { return p[0] * p[0]; },
                [](const Point&, int) { return 99.0; }};
  Point p(1);
  p << 0.5;
  CHECK(fd_partial(f, dom, p, 0, FDConfig{}) == 99.0);
}

TEST_CASE("fd stencil must stay inside the chart") {
  ChartDomain dom = unit_box(1);
  Point near_edge(1);
  near_edge << 0.001;  // order-4 stencil reaches -0.001
  CHECK_THROWS_AS(fd_partial(sin_x0(), dom, near_edge, 0, FDConfig{}), ProjError);
  try {
    fd_partial(sin_x0(), dom, near_edge, 0, FDConfig{});
  } catch (const ProjError& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
  Point safe(1);
  safe << 0.5;
  CHECK_NOTHROW(fd_partial(sin_x0(), dom, safe, 0, FDConfig{}));
}

TEST_CASE("non-finite field samples are rejected") {
  ChartDomain dom = unit_box(1);
  ScalarField f{[](const Point& p) { return 1.0 / (p[0] - 0.5); }, nullptr};
  Point p(1);
  p << 0.5;
  // The stencil straddles the pole; the quotient is finite but the direct
  // evaluation used by quadrature blows up.
  CHECK_THROWS_AS(integrate_quadrature(f.eval, dom, nullptr, QuadScheme::Trapezoid, 3),
                  ProjError);
}

TEST_CASE("quadrature reproduces exact integrals") {
  ChartDomain dom = unit_box(2, 9);
  auto one = [](const Point&) { return 1.0; };
  CHECK(integrate_quadrature(one, dom, nullptr, QuadScheme::Trapezoid) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate_quadrature(one, dom, nullptr, QuadScheme::Simpson) ==
        doctest::Approx(1.0).epsilon(1e-14));

  auto xy = [](const Point& p) { return p[0] * p[1]; };
  CHECK(integrate_quadrature(xy, dom, nullptr, QuadScheme::Simpson) ==
        doctest::Approx(0.25).epsilon(1e-14));

  ChartDomain line({{0.0, M_PI}}, 9);
  auto s = [](const Point& p) { return std::sin(p[0]); };
  CHECK(integrate_quadrature(s, line, nullptr, QuadScheme::Simpson, 101) ==
        doctest::Approx(2.0).epsilon(1e-7));

  // Weight fields multiply the integrand.
  ChartDomain u({{0.0, 1.0}}, 9);
  auto x = [](const Point& p) { return p[0]; };
  CHECK(integrate_quadrature(x, u, x, QuadScheme::Simpson, 21) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("quadrature value is identical for every thread count") {
  ChartDomain dom = unit_box(2, 9);
  auto f = [](const Point& p) { return std::sin(p[0] + p[1]) + std::cos(3.0 * p[0]); };
  const double v1 = integrate_quadrature(f, dom, nullptr, QuadScheme::Simpson, 51, 1);
  const double v2 = integrate_quadrature(f, dom, nullptr, QuadScheme::Simpson, 51, 2);
  const double v5 = integrate_quadrature(f, dom, nullptr, QuadScheme::Simpson, 51, 5);
  CHECK(v1 == v2);  // bitwise, not approximate
  CHECK(v1 == v5);
}

TEST_CASE("pairwise sum is exact on integers and deterministic") {
  std::vector<double> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(i);
  CHECK(pairwise_sum(xs) == 5050.0);
  CHECK(pairwise_sum({}) == 0.0);
  CHECK(pairwise_sum({3.5}) == 3.5);
}

TEST_CASE("parallel_for matches the serial loop and propagates exceptions") {
  const std::size_t n = 1000;
  std::vector<double> serial(n), threaded(n);
  parallel_for(n, 1, [&](std::size_t i) { serial[i] = std::sqrt(double(i)); });
  parallel_for(n, 4, [&](std::size_t i) { threaded[i] = std::sqrt(double(i)); });
  CHECK(serial == threaded);

  CHECK_THROWS_AS(parallel_for(100, 3,
                               [&](std::size_t i) {
                                 if (i == 17) {
                                   throw ProjError(ErrorCode::BadArgument, "boom");
                                 }
                               }),
                  ProjError);
}

TEST_CASE("affine diffeo round trip, power, and composition") {
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 1.0, 0.0, 1.0;
  Eigen::Vector2d b(0.1, -0.2);
  const Eigen::MatrixXd Ainv = A.inverse();
  DiffeoOnChart f;
  f.forward = [A, b](const Point& p) -> Point { return A * p + b; };
  f.inverse = [Ainv, b](const Point& p) -> Point { return Ainv * (p - b); };
  f.differential = [A](const Point&) { return A; };

  ChartDomain dom({{-1.0, 1.0}, {-1.0, 1.0}}, 9);
  CHECK(diffeo_roundtrip_error(f, dom, 5) < 1e-14);

  Point x(2);
  x << 0.3, -0.4;
  DiffeoOnChart f2 = f.power(2, 2);
  CHECK((f2.forward(x) - f.forward(f.forward(x))).norm() < 1e-14);
  DiffeoOnChart fi = f.power(-1, 2);
  CHECK((fi.forward(f.forward(x)) - x).norm() < 1e-13);
  DiffeoOnChart id = f.power(0, 2);
  CHECK((id.forward(x) - x).norm() == 0.0);

  DiffeoOnChart g = DiffeoOnChart::compose(f, f);
  CHECK((g.forward(x) - f2.forward(x)).norm() < 1e-14);
  CHECK((g.differential(x) - (A * A)).norm() < 1e-13);
}

TEST_CASE("error codes have stable names") {
  CHECK(std::string(error_code_name(ErrorCode::OutOfDomain)) == "OutOfDomain");
  CHECK(std::string(error_code_name(ErrorCode::NearDegenerate)) == "NearDegenerate");
  CHECK(std::string(error_code_name(ErrorCode::BadArgument)) == "BadArgument");
  ProjError e(ErrorCode::StepTooLarge, "drift 0.1");
  CHECK(std::string(e.what()) == "StepTooLarge: drift 0.1");
  CHECK(e.code() == ErrorCode::StepTooLarge);
}
