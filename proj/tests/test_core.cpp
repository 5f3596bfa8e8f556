#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "dpplab/core.hpp"
#include "dpplab/quadrature.hpp"

using namespace dpplab;

TEST_CASE("window geometry") {
  Window w = Window::interval(-1.0, 3.0);
  CHECK(w.dim() == 1);
  CHECK(w.volume() == doctest::Approx(4.0));
  CHECK(w.center()[0] == doctest::Approx(1.0));

  Vec lo(2), hi(2);
  lo << 0.0, -2.0;
  hi << 1.0, 2.0;
  Window box(lo, hi);
  CHECK(box.dim() == 2);
  CHECK(box.volume() == doctest::Approx(4.0));
  Vec p(2);
  p << 0.5, 0.0;
  CHECK(box.contains(p));
  p << 1.5, 0.0;
  CHECK_FALSE(box.contains(p));

  Vec bad_lo(2), bad_hi(2);
  bad_lo << 0.0, 1.0;
  bad_hi << 1.0, 1.0;
  CHECK_THROWS_AS(Window(bad_lo, bad_hi), std::invalid_argument);
}

TEST_CASE("disjoint boxes") {
  CHECK(disjoint(Window::interval(0.0, 1.0), Window::interval(2.0, 3.0)));
  CHECK_FALSE(disjoint(Window::interval(0.0, 1.5), Window::interval(1.0, 3.0)));
  // shared face only: still disjoint as open boxes
  CHECK(disjoint(Window::interval(0.0, 1.0), Window::interval(1.0, 2.0)));
}

TEST_CASE("point configurations") {
  PointConfiguration c(1);
  CHECK(c.size() == 0);
  Vec x(1);
  x << 0.25;
  c.add(x);
  x << 0.75;
  c.add(x);
  CHECK(c.size() == 2);
  CHECK(c.count(Window::interval(0.0, 0.5)) == 1);
  CHECK(c.count(Window::interval(0.0, 1.0)) == 2);
  CHECK(c.simple());

  c.add(x);  // duplicate point
  CHECK_FALSE(c.simple());

  Vec wrong(2);
  wrong << 0.0, 0.0;
  CHECK_THROWS_AS(c.add(wrong), std::invalid_argument);
}

TEST_CASE("configuration csv round trip keeps full precision") {
  PointConfiguration c(2);
  Vec p(2);
  p << 0.1234567890123456789, -3.0e-15;
  c.add(p);
  p << 1.0 / 3.0, 2.0 / 7.0;
  c.add(p);
  std::ostringstream out;
  c.write_csv(out);
  std::istringstream in(out.str());
  PointConfiguration back = PointConfiguration::read_csv(in);
  REQUIRE(back.size() == 2);
  REQUIRE(back.dim() == 2);
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a) CHECK(back[i][a] == c[i][a]);
}

TEST_CASE("factorial powers") {
  CHECK(factorial_power(5.0, 0) == doctest::Approx(1.0));
  CHECK(factorial_power(5.0, 2) == doctest::Approx(20.0));
  CHECK(factorial_power(3.0, 3) == doctest::Approx(6.0));
  CHECK(factorial_power(3.0, 4) == doctest::Approx(0.0));  // more factors than the count
  CHECK(factorial_power(0.0, 1) == doctest::Approx(0.0));
  CHECK(factorial_power(2.5, 2) == doctest::Approx(2.5 * 1.5));
  CHECK(factorial_power(2.5, 3) == doctest::Approx(0.0));  // r exceeds x: no way to choose
}

TEST_CASE("random stream determinism and ranges") {
  RandomStream a(123), b(123), c(124);
  bool same = true, differ = false;
  for (int i = 0; i < 64; ++i) {
    double ua = a.uniform();
    same = same && (ua == b.uniform());
    differ = differ || (ua != c.uniform());
    CHECK(ua >= 0.0);
    CHECK(ua < 1.0);
  }
  CHECK(same);
  CHECK(differ);

  RandomStream r(7);
  for (int i = 0; i < 100; ++i) {
    double v = r.uniform(2.0, 5.0);
    CHECK(v >= 2.0);
    CHECK(v < 5.0);
    int k = r.uniform_int(6);
    CHECK(k >= 0);
    CHECK(k < 6);
  }
}

TEST_CASE("normal draws look standard") {
  RandomStream r(99);
  double sum = 0.0, sumsq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double v = r.normal();
    sum += v;
    sumsq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("stream splitting does not depend on parent consumption") {
  RandomStream a(42), b(42);
  (void)b.uniform();  // consume from one parent only
  (void)b.uniform();
  auto kids_a = a.split(3);
  auto kids_b = b.split(3);
  REQUIRE(kids_a.size() == 3);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 16; ++i) CHECK(kids_a[k].uniform() == kids_b[k].uniform());

  // siblings decorrelate
  auto kids = RandomStream(5).split(2);
  bool differ = false;
  for (int i = 0; i < 8; ++i) differ = differ || (kids[0].uniform() != kids[1].uniform());
  CHECK(differ);
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  Quadrature q = Quadrature::tensor(Window::interval(0.0, 2.0), 8);
  REQUIRE(q.size() == 8);
  double integral = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    double x = q.nodes[i][0];
    integral += q.weights[i] * (x * x * x - x);
  }
  // exact: x^4/4 - x^2/2 on [0, 2]
  CHECK(integral == doctest::Approx(2.0).epsilon(1e-13));

  double total = 0.0;
  for (double w : q.weights) total += w;
  CHECK(total == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("tensor quadrature covers multi-d windows") {
  Vec lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << 1.0, 2.0;
  Quadrature q = Quadrature::tensor(Window(lo, hi), 5);
  REQUIRE(q.size() == 25);
  CHECK(q.points_per_axis == 5);
  double vol = 0.0;
  for (double w : q.weights) vol += w;
  CHECK(vol == doctest::Approx(2.0).epsilon(1e-12));
  for (const Vec& x : q.nodes) CHECK(q.window.contains(x));
}
