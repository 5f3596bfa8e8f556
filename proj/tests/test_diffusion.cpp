#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "dpplab/diffusion.hpp"

using namespace dpplab;

TEST_CASE("spectral initial conditions are ordered and reproducible") {
  RandomStream a(6), b(6);
  DiffusionState sa = dyson_initial_gue(12, a);
  DiffusionState sb = dyson_initial_gue(12, b);
  REQUIRE(sa.x.size() == 12);
  CHECK(sa.time == 0.0);
  for (std::size_t i = 0; i + 1 < sa.x.size(); ++i) CHECK(sa.x[i] < sa.x[i + 1]);
  for (std::size_t i = 0; i < sa.x.size(); ++i) CHECK(sa.x[i] == sb.x[i]);

  // matrix scaling puts the spectrum near [-sqrt(2n), sqrt(2n)]
  RandomStream big(1);
  DiffusionState wide = dyson_initial_gue(60, big);
  double edge = std::sqrt(2.0 * 60.0);
  CHECK(wide.x.front() > -1.3 * edge);
  CHECK(wide.x.back() < 1.3 * edge);
  CHECK(wide.x.back() > 0.6 * edge);
}

TEST_CASE("steps preserve ordering and advance time") {
  RandomStream rng(44);
  DiffusionState st = dyson_initial_gue(8, rng);
  for (int t = 0; t < 1000; ++t) {
    int depth = dyson_step(st, 1e-3, 1.0, rng);
    CHECK(depth >= 0);
    for (std::size_t i = 0; i + 1 < st.x.size(); ++i) REQUIRE(st.x[i] < st.x[i + 1]);
  }
  CHECK(st.time == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unresolvable crossings give up after twenty halvings") {
  // a huge restoring force throws both walkers across the origin in any
  // bisected substep, so refinement cannot restore the ordering
  DiffusionState st;
  st.time = 0.0;
  st.x = {-1.0, 1.0};
  RandomStream rng(1);
  CHECK_THROWS_WITH_AS(dyson_step(st, 1.0, 1e12, rng), doctest::Contains("collision unresolved"),
                       std::runtime_error);
}

TEST_CASE("spacing law reference values") {
  CHECK(wigner_surmise_cdf(0.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(wigner_surmise_cdf(8.0) == doctest::Approx(1.0).epsilon(1e-10));
  for (double s : {0.2, 0.5, 0.9, 1.4, 2.0})
    CHECK(wigner_surmise_cdf(s + 0.05) > wigner_surmise_cdf(s));
  // erf(2 s / sqrt(pi)) - (4 s / pi) exp(-4 s^2 / pi) at s = 1
  double expected = std::erf(2.0 / std::sqrt(std::acos(-1.0))) -
                    (4.0 / std::acos(-1.0)) * std::exp(-4.0 / std::acos(-1.0));
  CHECK(wigner_surmise_cdf(1.0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("recorded runs expose cadence and stationarity diagnostics") {
  RandomStream rng(7);
  DiffusionState init = dyson_initial_gue(10, rng);
  DiffusionRun run = dyson_run(init, 4000, 1e-3, 1.0, 400, 10, rng);
  // records at steps 400, 410, ..., 4000
  CHECK(run.records.size() == 361);
  CHECK(run.steps == 4000);
  for (std::size_t i = 0; i + 1 < run.records.size(); ++i)
    CHECK(run.records[i].time < run.records[i + 1].time);

  StationarityReport rep = stationarity_report(run);
  CHECK(rep.particles == 10);
  CHECK(rep.records == 361);
  CHECK(rep.ks_spacing > 0.0);
  CHECK(rep.ks_spacing < 0.2);
  CHECK(rep.mean_square_model == doctest::Approx(100.0 / 2.0));
  CHECK(rep.drift_ratio > 0.3);
  CHECK(rep.drift_ratio < 3.0);
  CHECK(std::isfinite(rep.edge_model));
}

TEST_CASE("free diffusion is flagged as non stationary") {
  RandomStream rng(2);
  DiffusionState init = dyson_initial_gue(6, rng);
  DiffusionRun run = dyson_run(init, 200, 1e-3, 0.0, 0, 10, rng);
  StationarityReport rep = stationarity_report(run);
  CHECK_FALSE(rep.stationary);
  CHECK(std::isinf(rep.mean_square_model));
}
