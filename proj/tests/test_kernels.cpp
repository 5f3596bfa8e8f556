#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "dpplab/fredholm.hpp"
#include "dpplab/kernels.hpp"
#include "dpplab/quadrature.hpp"

using namespace dpplab;

namespace {
Vec pt(double x) {
  Vec v(1);
  v << x;
  return v;
}
}  // namespace

TEST_CASE("sine kernel values") {
  Kernel k = sine_kernel();
  CHECK(k(pt(0.3), pt(0.3)).real() == doctest::Approx(1.0));
  // separation one half: sin(pi/2)/(pi/2)
  CHECK(k(pt(1.0), pt(0.5)).real() == doctest::Approx(0.6366197723675814).epsilon(1e-14));
  CHECK(k(pt(1.0), pt(2.0)).real() == doctest::Approx(0.0).scale(1.0));
  CHECK(k.kind() == "sine");
  CHECK_FALSE(k.projection_like());
}

TEST_CASE("gaussian kernel validation and symmetry") {
  CHECK_THROWS_AS(gaussian_kernel(1.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_kernel(0.5, -1.0), std::invalid_argument);
  Kernel k = gaussian_kernel(0.4, 0.6);
  CHECK(k(pt(0.7), pt(0.7)).real() == doctest::Approx(0.4));
  CHECK(k(pt(0.1), pt(0.9)) == k(pt(0.9), pt(0.1)));
}

TEST_CASE("kernels are hermitian at random pairs") {
  RandomStream rng(314);
  Window w = Window::interval(0.0, 1.0);
  Kernel ks[] = {sine_kernel(), gaussian_kernel(0.3, 0.5),
                 projection_kernel(fourier_basis(3, w), w)};
  for (const Kernel& k : ks) {
    for (int i = 0; i < 40; ++i) {
      Vec x = pt(rng.uniform()), y = pt(rng.uniform());
      std::complex<double> gap = k(x, y) - std::conj(k(y, x));
      CHECK(std::abs(gap) < 1e-12);
    }
  }
}

TEST_CASE("projection kernel rejects a basis that is not orthonormal") {
  Window w = Window::interval(0.0, 1.0);
  auto basis = fourier_basis(2, w);
  basis[1] = [inner = basis[1]](const Vec& x) { return 2.0 * inner(x); };
  CHECK_THROWS_AS(projection_kernel(basis, w), std::invalid_argument);
}

TEST_CASE("spectral grid restriction obeys the spectrum bound") {
  Window w = Window::interval(0.0, 5.0);
  SpectralDecomposition sd = decompose(sine_kernel(), w, 48);
  REQUIRE(sd.rank() >= 1);
  for (double mu : sd.eigenvalues()) {
    CHECK(mu > 0.0);
    CHECK(mu <= 1.0);
  }
  // a kernel whose restricted operator tops 1 is rejected outright
  CHECK_THROWS_WITH_AS(decompose(gaussian_kernel(0.6, 0.8, 1), Window::interval(0.0, 4.0), 40),
                       doctest::Contains("As2"), std::domain_error);
}

TEST_CASE("decomposition reconstructs the kernel") {
  Window w = Window::interval(0.0, 2.0);
  SpectralDecomposition sd = decompose(sine_kernel(), w, 40);
  Kernel k = sine_kernel();
  RandomStream rng(11);
  for (int i = 0; i < 30; ++i) {
    Vec x = pt(rng.uniform(0.0, 2.0)), y = pt(rng.uniform(0.0, 2.0));
    CHECK(std::abs(sd.spectral_value(x, y) - k(x, y)) < 1e-6);
  }
}

TEST_CASE("trace from the decomposition matches direct quadrature") {
  Window w = Window::interval(0.0, 3.0);
  SpectralDecomposition sd = decompose(gaussian_kernel(0.35, 0.5), w, 40);
  CHECK(std::abs(sd.trace() - trace(gaussian_kernel(0.35, 0.5), w)) < 1e-8);
  // sine kernel diagonal is constant one, so the trace is the window length
  SpectralDecomposition ss = decompose(sine_kernel(), Window::interval(0.0, 5.0), 48);
  CHECK(ss.trace() == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("projection spectra clamp to exact ones") {
  Window w = Window::interval(0.0, 1.0);
  SpectralDecomposition sd = decompose(projection_kernel(fourier_basis(3, w), w), w, 32);
  REQUIRE(sd.rank() == 3);
  for (double mu : sd.eigenvalues()) CHECK(mu == 1.0);
}

TEST_CASE("eigenfunctions are orthonormal under the node weights") {
  Window w = Window::interval(0.0, 2.0);
  SpectralDecomposition sd = decompose(sine_kernel(), w, 36);
  const auto& q = sd.quadrature();
  // the off-grid extension divides by the eigenvalue, so modes at the
  // truncation floor amplify kernel rounding; test the well-conditioned ones
  for (int a = 0; a < sd.rank(); ++a)
    for (int b = a; b < sd.rank(); ++b) {
      if (sd.eigenvalues()[a] < 1e-6 || sd.eigenvalues()[b] < 1e-6) continue;
      std::complex<double> inner = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j)
        inner += q.weights[j] * sd.eigenfunction(a, q.nodes[j]) *
                 std::conj(sd.eigenfunction(b, q.nodes[j]));
      CHECK(std::abs(inner - (a == b ? 1.0 : 0.0)) < 1e-8);
    }
}

TEST_CASE("spectral kernel round trips prescribed eigenvalues") {
  Window w = Window::interval(-1.0, 1.0);
  Kernel k = spectral_kernel({0.3, 0.2, 0.1}, legendre_basis(3, w), 1);
  SpectralDecomposition sd = decompose(k, w, 24);
  REQUIRE(sd.rank() == 3);
  CHECK(sd.eigenvalues()[0] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(sd.eigenvalues()[1] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(sd.eigenvalues()[2] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("rank one kernel carries its weight as the only eigenvalue") {
  Window w = Window::interval(0.0, 1.0);
  CFunc psi = [](const Vec& x) {
    return Cplx(std::sqrt(2.0) * std::sin(std::numbers::pi * x[0]), 0.0);
  };
  SpectralDecomposition sd = decompose(rank_one_kernel(psi, 0.5, 1), w, 24);
  REQUIRE(sd.rank() == 1);
  CHECK(sd.eigenvalues()[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("thinning zeroes the removed point and stays positive") {
  Window w = Window::interval(0.0, 5.0);
  Kernel k = sine_kernel();
  Vec z = pt(2.2);
  Kernel kt = thin(k, z);
  CHECK(std::abs(kt(z, z)) < 1e-14);
  CHECK(kt.kind() == "thinned");

  // the conditioned kernel still decomposes: spectrum within [0, 1)
  SpectralDecomposition sd = decompose(kt, w, 40);
  for (double mu : sd.eigenvalues()) {
    CHECK(mu > -1e-8);
    CHECK(mu <= 1.0);
  }

  // diagonal never increases under conditioning
  RandomStream rng(21);
  for (int i = 0; i < 25; ++i) {
    Vec x = pt(rng.uniform(0.0, 5.0));
    CHECK(kt(x, x).real() <= k(x, x).real() + 1e-12);
    CHECK(kt(x, x).real() >= -1e-12);
  }
}

TEST_CASE("thinning a projection drops the rank by one") {
  Window w = Window::interval(0.0, 1.0);
  Kernel k = projection_kernel(fourier_basis(4, w), w);
  SpectralDecomposition sd = decompose(thin(k, pt(0.5)), w, 32);
  REQUIRE(sd.rank() == 3);
  for (double mu : sd.eigenvalues()) CHECK(mu == 1.0);
}
