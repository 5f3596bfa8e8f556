#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>

#include "dpplab/core.hpp"
#include "dpplab/quadrature.hpp"

namespace dpplab {

using Cplx = std::complex<double>;
using CFunc = std::function<Cplx(const Vec&)>;

namespace detail {
class KernelImpl;
}

// Hermitian correlation kernel K(x, y), evaluated pointwise. Value type with
// shared immutable implementation; copies are cheap and evaluation is
// thread-safe.
class Kernel {
 public:
  explicit Kernel(std::shared_ptr<const detail::KernelImpl> impl);

  Cplx operator()(const Vec& x, const Vec& y) const;
  int dim() const;
  const std::string& kind() const;
  // projection kernels and their thinned descendants; such kernels keep
  // eigenvalues pinned to exactly 1 through decomposition clamping
  bool projection_like() const;

 private:
  std::shared_ptr<const detail::KernelImpl> impl_;
};

// sinc product kernel, K(x, x) = 1; band-limited projection on the line
Kernel sine_kernel(int dim = 1);

// alpha * exp(-|x - y|^2 / (2 ell^2)) with 0 < alpha < 1, ell > 0
Kernel gaussian_kernel(double alpha, double ell, int dim = 1);

// sum of phi_i phi_i* over an orthonormal family; orthonormality on `domain`
// is checked by quadrature at construction (Gram within 1e-8 of identity)
Kernel projection_kernel(std::vector<CFunc> basis, const Window& domain, int check_resolution = 32);

// explicit finite-rank kernel: sum of lambda_i phi_i(x) conj(phi_i(y))
Kernel spectral_kernel(std::vector<double> eigenvalues, std::vector<CFunc> functions, int dim);

// weight * psi(x) conj(psi(y))
Kernel rank_one_kernel(CFunc psi, double weight, int dim);

// palm-type removal at z: K(x,y) - K(x,z)K(z,y)/K(z,z); requires K(z,z) > 1e-12
Kernel thin(const Kernel& k, const Vec& z);

// orthonormal helpers on a 1-D window
std::vector<CFunc> fourier_basis(int n_modes, const Window& w);
std::vector<CFunc> legendre_basis(int n, const Window& w);

// Spectral data of the restriction of a kernel to a window, obtained by the
// Nystrom method on a tensor Gauss-Legendre grid:
//
//   B = W^{1/2} A W^{1/2},  A_ij = K(x_i, x_j),  W = diag(quadrature weights)
//
// Hermitian eigenpairs (mu, u) of B give eigenfunction samples
// phi(x_j) = u_j / sqrt(w_j), orthonormal under the quadrature inner product,
// and the Nystrom extension phi(x) = (1/mu) sum_j sqrt(w_j) K(x, x_j) u_j.
//
// Validation: an eigenvalue below -1e-6 or above 1 + 1e-6 rejects the kernel
// (spectrum must lie in [0, 1)). Projection-like kernels have eigenvalues
// within 1e-8 of 1 clamped to exactly 1. Eigenvalues below 1e-12 are dropped.
class SpectralDecomposition {
 public:
  const Kernel& kernel() const { return kernel_; }
  const Quadrature& quadrature() const { return quad_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  int rank() const { return static_cast<int>(eigenvalues_.size()); }
  double trace() const;  // sum of kept eigenvalues

  // phi_k at an arbitrary point (Nystrom extension)
  Cplx eigenfunction(int k, const Vec& x) const;
  // all kept eigenfunctions at x in one kernel-row evaluation
  Eigen::VectorXcd eigenfunctions_at(const Vec& x) const;
  // eigenfunction samples at the quadrature nodes, size() x rank()
  const Eigen::MatrixXcd& node_modes() const { return node_modes_; }
  // weighted node matrix B (symmetrized kernel samples)
  const Eigen::MatrixXcd& weighted_node_matrix() const { return node_matrix_; }

  // kernel value rebuilt from the kept modes
  Cplx spectral_value(const Vec& x, const Vec& y) const;

  friend SpectralDecomposition decompose(const Kernel&, const Window&, int);

 private:
  SpectralDecomposition(Kernel k, Quadrature q);

  Kernel kernel_;
  Quadrature quad_;
  std::vector<double> eigenvalues_;
  Eigen::MatrixXcd node_modes_;     // phi_k(x_j)
  Eigen::MatrixXcd extension_;      // sqrt(w_j) u_jk / mu_k, used by eigenfunctions_at
  Eigen::MatrixXcd node_matrix_;    // B
};

SpectralDecomposition decompose(const Kernel& k, const Window& w, int points_per_axis);

}  // namespace dpplab
