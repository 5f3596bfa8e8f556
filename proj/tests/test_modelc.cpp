#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "dpplab/kernels.hpp"
#include "dpplab/modelc.hpp"

using namespace dpplab;

namespace {
Vec pt(double x) {
  Vec v(1);
  v << x;
  return v;
}

WaveFunction demo_packet(int n = 256) {
  return gaussian_packet(Window::interval(-12.0, 12.0), n, 1.0, pt(-1.0), 0.8, pt(2.0));
}
}  // namespace

TEST_CASE("packets start normalized and admissible") {
  WaveFunction psi = demo_packet();
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi.admissible());
  CHECK(psi.boundary_max() < 1e-10);
  CHECK(psi.size() == 256);

  CHECK_THROWS_AS(gaussian_packet(Window::interval(0.0, 1.0), 10, 1.0, pt(0.5), 0.1, pt(0.0)),
                  std::invalid_argument);  // grid too coarse
  CHECK_THROWS_AS(gaussian_packet(Window::interval(0.0, 1.0), 64, -1.0, pt(0.5), 0.1, pt(0.0)),
                  std::invalid_argument);  // bad mass
}

TEST_CASE("expectations of the reference packet") {
  WaveFunction psi = demo_packet();
  CHECK(position_expectation(psi).value[0] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(momentum_expectation(psi).value[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(position_width(psi)[0] == doctest::Approx(0.8).epsilon(1e-10));
  CHECK_FALSE(position_expectation(psi).boundary_warning);
}

TEST_CASE("free evolution keeps the norm through a thousand chained steps") {
  WaveFunction psi = demo_packet();
  WaveFunction state = psi;
  for (int i = 0; i < 1000; ++i) state = free_propagate(state, 1e-3);
  CHECK(std::abs(state.norm() - 1.0) < 1e-10);

  // chaining a thousand substeps lands on the direct one second evolution
  WaveFunction direct = free_propagate(psi, 1.0);
  double gap = 0.0;
  for (std::size_t j = 0; j < state.size(); ++j)
    gap = std::max(gap, std::abs(state.amplitudes()[j] - direct.amplitudes()[j]));
  CHECK(gap < 1e-8);
}

TEST_CASE("dispersion follows the exact width law") {
  WaveFunction psi = demo_packet();
  const double sigma = 0.8, m = 1.0;
  for (double t : {0.25, 0.6, 1.0}) {
    WaveFunction pt_state = free_propagate(psi, t);
    double expected = sigma * std::sqrt(1.0 + std::pow(t / (2.0 * m * sigma * sigma), 2));
    CHECK(position_width(pt_state)[0] == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("boundary margins are enforced on both ends of the evolution") {
  // a packet shoved against the wall is rejected as input
  WaveFunction stuck =
      gaussian_packet(Window::interval(-6.0, 6.0), 128, 1.0, pt(5.2), 0.5, pt(0.0));
  CHECK_FALSE(stuck.admissible());
  CHECK_THROWS_AS(free_propagate(stuck, 0.1), std::invalid_argument);

  // a fast packet that would cross the wall reports the last safe time
  WaveFunction fast =
      gaussian_packet(Window::interval(-6.0, 6.0), 128, 1.0, pt(0.0), 0.5, pt(4.0));
  CHECK_THROWS_WITH_AS(free_propagate(fast, 2.0), doctest::Contains("earliest safe t"),
                       std::runtime_error);
}

TEST_CASE("canonical commutator holds once the grid resolves the packet") {
  const Window w = Window::interval(-8.0, 8.0);
  const double sigma = 0.30 / std::sqrt(2.0);
  double res64 = 0.0, res256 = 0.0;
  for (int n : {64, 128, 256}) {
    WaveFunction psi = gaussian_packet(w, n, 1.0, pt(0.0), sigma, pt(0.0));
    CommutatorReport rep = commutator_check(psi);
    CHECK(rep.position_commutator == 0.0);  // grid coordinates commute exactly
    if (n == 64) {
      res64 = rep.relative_residual;
      CHECK_FALSE(rep.precondition_ok);  // band-limit test correctly refuses
    }
    if (n == 256) {
      res256 = rep.relative_residual;
      CHECK(rep.precondition_ok);
      CHECK(rep.spectral_tail < 1e-10);
    }
  }
  CHECK(res64 > 1e-3);     // under-resolved: the identity visibly fails
  CHECK(res256 < 1e-12);   // resolved: failure collapses by many decades
  CHECK(res64 / res256 > 1e6);
}

TEST_CASE("entropic uncertainty saturates at the gaussian target") {
  const double target = 1.0 + std::log(std::numbers::pi);
  const Window w = Window::interval(-16.0, 16.0);
  for (double sigma : {0.12, 0.24, 0.48, 0.96}) {
    EntropyReport rep = entropy_sum(gaussian_packet(w, 1024, 1.0, pt(0.0), sigma, pt(0.0)));
    CHECK(rep.sum == doctest::Approx(target).epsilon(1e-9));
    CHECK(rep.position_entropy + rep.momentum_entropy == doctest::Approx(rep.sum));
  }
}

TEST_CASE("marks order points by distance, stable under relabeling") {
  PointConfiguration c(1);
  for (double x : {0.9, -0.2, 0.4}) {
    Vec p(1);
    p << x;
    c.add(p);
  }
  MarkedConfiguration m = mark_by_distance(c, pt(0.0));
  // distances 0.2 < 0.4 < 0.9
  CHECK(m.marks()[0] == 3);
  CHECK(m.marks()[1] == 1);
  CHECK(m.marks()[2] == 2);

  // permuting the input points permutes the marks with them
  PointConfiguration shuffled(1);
  for (double x : {0.4, 0.9, -0.2}) {
    Vec p(1);
    p << x;
    shuffled.add(p);
  }
  MarkedConfiguration ms = mark_by_distance(shuffled, pt(0.0));
  CHECK(select_particle(m, 1, 0.0).position[0] == select_particle(ms, 1, 0.0).position[0]);
  CHECK(select_particle(m, 3, 0.0).position[0] == select_particle(ms, 3, 0.0).position[0]);

  // equidistant points fall back to coordinate order
  PointConfiguration tie(1);
  for (double x : {1.0, -1.0}) {
    Vec p(1);
    p << x;
    tie.add(p);
  }
  MarkedConfiguration mt = mark_by_distance(tie, pt(0.0));
  CHECK(select_particle(mt, 1, 0.0).position[0] == -1.0);

  CHECK_THROWS_AS(select_particle(m, 9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MarkedConfiguration(c, {1, 1, 2}), std::invalid_argument);
}

TEST_CASE("conditioning normalizes away the reported weight") {
  const Window w = Window::interval(-4.0, 4.0);
  const int n = 64;
  std::vector<Cplx> raw(n);
  for (int j = 0; j < n; ++j) {
    double x = -4.0 + 8.0 * j / n;
    raw[j] = Cplx(std::exp(-x * x), 0.1 * x);
  }
  WaveFunction a = conditional_wavefunction(w, n, 1.0, raw, 1.0);
  WaveFunction b = conditional_wavefunction(w, n, 1.0, raw, 7.5);
  for (int j = 0; j < n; ++j) CHECK(std::abs(a.amplitudes()[j] - b.amplitudes()[j]) < 1e-12);
  CHECK_THROWS_AS(conditional_wavefunction(w, n, 1.0, raw, 0.0), std::invalid_argument);
}

TEST_CASE("sequential pair construction flags the projection as entangled-like") {
  Window w = Window::interval(0.0, 1.0);
  Kernel k = projection_kernel(fourier_basis(2, w), w);
  TwoParticleReport rep = two_particle_joint(k, pt(0.1), pt(0.6), w);
  CHECK(rep.first_intensity == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.probe_violation == doctest::Approx(0.741820358).epsilon(1e-6));
  CHECK(rep.classification == "entangled-like");
  CHECK(rep.probe_violation > 1e-6);

  TwoParticleReport other = two_particle_joint(k, pt(0.2), pt(0.7), w);
  CHECK(other.probe_violation == doctest::Approx(0.877951388).epsilon(1e-6));
  CHECK(other.classification == "entangled-like");

  CHECK_THROWS_AS(two_particle_joint(k, pt(0.3), pt(0.3), w), std::invalid_argument);
}

TEST_CASE("independent modes with separated supports factorize") {
  // two smooth bumps that never overlap: occupation events are independent
  Window w = Window::interval(0.0, 1.0);
  auto bump = [](double x, double a, double b) -> double {
    if (x <= a || x >= b) return 0.0;
    double t = (x - a) / (b - a);
    return std::exp(-1.0 / (t * (1.0 - t)));
  };
  // rough L2 normalization on a fine midpoint rule
  auto norm_of = [&](double a, double b) {
    double s = 0.0;
    const int m = 4000;
    for (int i = 0; i < m; ++i) {
      double x = (i + 0.5) / m;
      s += bump(x, a, b) * bump(x, a, b) / m;
    }
    return std::sqrt(s);
  };
  const double n1 = norm_of(0.02, 0.48), n2 = norm_of(0.52, 0.98);
  CFunc f1 = [=](const Vec& x) { return Cplx(bump(x[0], 0.02, 0.48) / n1, 0.0); };
  CFunc f2 = [=](const Vec& x) { return Cplx(bump(x[0], 0.52, 0.98) / n2, 0.0); };
  Kernel k = spectral_kernel({0.5, 0.4}, {f1, f2}, 1);

  TwoParticleReport rep = two_particle_joint(k, pt(0.25), pt(0.75), w);
  CHECK(rep.product_gap <= 1e-10 * rep.independent_product);
  CHECK(rep.probe_violation < 1e-6);
  CHECK(rep.classification == "factorized");
}
