#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dpplab/fredholm.hpp"
#include "dpplab/kernels.hpp"

using namespace dpplab;

namespace {
SpectralDecomposition three_mode() {
  Window w = Window::interval(-1.0, 1.0);
  return decompose(spectral_kernel({0.3, 0.2, 0.1}, legendre_basis(3, w), 1), w, 24);
}
}  // namespace

TEST_CASE("known three mode determinants") {
  SpectralDecomposition sd = three_mode();

  DeterminantReport plus = fredholm_det(sd, 1.0);
  // (1 + 0.3)(1 + 0.2)(1 + 0.1)
  CHECK(plus.value("spectral") == doctest::Approx(1.716).epsilon(1e-9));
  CHECK(plus.value("series") == doctest::Approx(1.716).epsilon(1e-9));
  CHECK(plus.routes_consistent);
  CHECK(plus.max_pairwise_gap < 1e-8);

  DeterminantReport minus = fredholm_det(sd, -1.0);
  // (1 - 0.3)(1 - 0.2)(1 - 0.1)
  CHECK(minus.value("spectral") == doctest::Approx(0.504).epsilon(1e-9));
  CHECK(minus.value("series") == doctest::Approx(0.504).epsilon(1e-9));
  CHECK(minus.routes_consistent);
}

TEST_CASE("determinant at z equal zero is one") {
  DeterminantReport rep = fredholm_det(three_mode(), 0.0);
  for (const auto& [name, value] : rep.values) CHECK(value == doctest::Approx(1.0));
}

TEST_CASE("trace expansion joins in its convergence region") {
  // single mode of weight one half: trace 0.5, so |z| tr < 1 holds at z = -1
  Window w = Window::interval(0.0, 1.0);
  CFunc psi = [](const Vec& x) {
    return Cplx(std::sqrt(2.0) * std::sin(std::numbers::pi * x[0]), 0.0);
  };
  SpectralDecomposition sd = decompose(rank_one_kernel(psi, 0.5, 1), w, 24);
  DeterminantReport rep = fredholm_det(sd, -1.0, "all");
  CHECK(rep.value("spectral") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.value("series") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.value("plemelj") == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.routes_consistent);
  CHECK(rep.max_pairwise_gap < 1e-8);
}

TEST_CASE("trace expansion outside its region") {
  // sine kernel on [0, 5]: trace 5, z = -1 violates |z| tr < 1
  SpectralDecomposition sd = decompose(sine_kernel(), Window::interval(0.0, 5.0), 48);

  // silently skipped when every route was requested
  DeterminantReport rep = fredholm_det(sd, -1.0, "all");
  bool has_plemelj = false;
  for (const auto& [name, value] : rep.values) has_plemelj = has_plemelj || name == "plemelj";
  CHECK_FALSE(has_plemelj);
  CHECK(rep.routes_consistent);

  // a hard failure when asked for by name
  CHECK_THROWS_WITH_AS(fredholm_det(sd, -1.0, "plemelj"),
                       doctest::Contains("Plemelj precondition violated"), std::domain_error);
}

TEST_CASE("series route tracks the spectral one on a smooth kernel") {
  Window w = Window::interval(0.0, 3.0);
  SpectralDecomposition sd = decompose(gaussian_kernel(0.35, 0.5), w, 24);
  for (double z : {1.0, -1.0, 0.4}) {
    DeterminantReport rep = fredholm_det(sd, z);
    CHECK(std::abs(rep.value("series") - rep.value("spectral")) < 1e-8);
    CHECK(rep.series_terms >= 1);
  }
}

TEST_CASE("unknown route names are rejected") {
  SpectralDecomposition sd = three_mode();
  CHECK_THROWS_AS(fredholm_det(sd, 1.0, "cayley"), std::invalid_argument);
  // trace 0.6: z = 2 leaves the expansion region, so the route is absent
  DeterminantReport rep = fredholm_det(sd, 2.0);
  CHECK_THROWS_AS(rep.value("plemelj"), std::invalid_argument);
}

TEST_CASE("projection determinant vanishes at z equal minus one") {
  Window w = Window::interval(0.0, 1.0);
  SpectralDecomposition sd = decompose(projection_kernel(fourier_basis(2, w), w), w, 24);
  DeterminantReport rep = fredholm_det(sd, -1.0);
  CHECK(std::abs(rep.value("spectral")) < 1e-12);
  CHECK(std::abs(rep.value("series")) < 1e-10);
}
