#include "dpplab/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace dpplab {

namespace detail {

class KernelImpl {
 public:
  KernelImpl(int dim, std::string kind, bool projection_like)
      : dim_(dim), kind_(std::move(kind)), projection_like_(projection_like) {
    if (dim < 1) throw std::invalid_argument("Kernel: dim >= 1 required");
  }
  virtual ~KernelImpl() = default;
  virtual Cplx value(const Vec& x, const Vec& y) const = 0;

  int dim() const { return dim_; }
  const std::string& kind() const { return kind_; }
  bool projection_like() const { return projection_like_; }

 private:
  int dim_;
  std::string kind_;
  bool projection_like_;
};

namespace {

void check_point(const KernelImpl& k, const Vec& x) {
  if (x.size() != k.dim()) throw std::invalid_argument("Kernel: point dimension mismatch");
}

class SineKernel final : public KernelImpl {
 public:
  explicit SineKernel(int dim) : KernelImpl(dim, "sine", false) {}
  Cplx value(const Vec& x, const Vec& y) const override {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) {
      double t = std::numbers::pi * (x[a] - y[a]);
      v *= std::abs(t) < 1e-12 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
    }
    return v;
  }
};

class GaussianKernel final : public KernelImpl {
 public:
  GaussianKernel(double alpha, double ell, int dim)
      : KernelImpl(dim, "gaussian", false), alpha_(alpha), inv2ell2_(0.5 / (ell * ell)) {}
  Cplx value(const Vec& x, const Vec& y) const override {
    return alpha_ * std::exp(-(x - y).squaredNorm() * inv2ell2_);
  }

 private:
  double alpha_;
  double inv2ell2_;
};

class SpectralKernel final : public KernelImpl {
 public:
  SpectralKernel(std::vector<double> lam, std::vector<CFunc> fns, int dim, std::string kind,
                 bool projection_like)
      : KernelImpl(dim, std::move(kind), projection_like), lam_(std::move(lam)), fns_(std::move(fns)) {}
  Cplx value(const Vec& x, const Vec& y) const override {
    Cplx v = 0.0;
    for (std::size_t i = 0; i < lam_.size(); ++i) v += lam_[i] * fns_[i](x) * std::conj(fns_[i](y));
    return v;
  }

 private:
  std::vector<double> lam_;
  std::vector<CFunc> fns_;
};

class ThinnedKernel final : public KernelImpl {
 public:
  ThinnedKernel(Kernel parent, Vec z, double kzz)
      : KernelImpl(parent.dim(), "thinned", parent.projection_like()),
        parent_(std::move(parent)),
        z_(std::move(z)),
        kzz_(kzz) {}
  Cplx value(const Vec& x, const Vec& y) const override {
    return parent_(x, y) - parent_(x, z_) * parent_(z_, y) / kzz_;
  }

 private:
  Kernel parent_;
  Vec z_;
  double kzz_;
};

}  // namespace
}  // namespace detail

Kernel::Kernel(std::shared_ptr<const detail::KernelImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw std::invalid_argument("Kernel: null implementation");
}

Cplx Kernel::operator()(const Vec& x, const Vec& y) const {
  detail::check_point(*impl_, x);
  detail::check_point(*impl_, y);
  return impl_->value(x, y);
}

int Kernel::dim() const { return impl_->dim(); }
const std::string& Kernel::kind() const { return impl_->kind(); }
bool Kernel::projection_like() const { return impl_->projection_like(); }

Kernel sine_kernel(int dim) { return Kernel(std::make_shared<detail::SineKernel>(dim)); }

Kernel gaussian_kernel(double alpha, double ell, int dim) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("gaussian_kernel: alpha in (0, 1) required");
  if (!(ell > 0.0)) throw std::invalid_argument("gaussian_kernel: ell > 0 required");
  return Kernel(std::make_shared<detail::GaussianKernel>(alpha, ell, dim));
}

Kernel projection_kernel(std::vector<CFunc> basis, const Window& domain, int check_resolution) {
  if (basis.empty()) throw std::invalid_argument("projection_kernel: empty basis");
  const int n = static_cast<int>(basis.size());
  Quadrature q = Quadrature::tensor(domain, check_resolution);
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::VectorXcd> vals(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = basis[i](q.nodes[j]);
    vals[j] = std::move(v);
  }
  for (std::size_t j = 0; j < q.size(); ++j) gram += q.weights[j] * vals[j] * vals[j].adjoint();
  double worst = 0.0;
  int wi = 0, wj = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dev = std::abs(gram(i, j) - (i == j ? 1.0 : 0.0));
      if (dev > worst) {
        worst = dev;
        wi = i;
        wj = j;
      }
    }
  if (worst > 1e-8) {
    std::ostringstream msg;
    msg << "projection_kernel: basis not orthonormal on the domain, Gram(" << wi << "," << wj
        << ") deviates by " << worst;
    throw std::invalid_argument(msg.str());
  }
  std::vector<double> lam(basis.size(), 1.0);
  return Kernel(std::make_shared<detail::SpectralKernel>(std::move(lam), std::move(basis),
                                                         domain.dim(), "projection", true));
}

Kernel spectral_kernel(std::vector<double> eigenvalues, std::vector<CFunc> functions, int dim) {
  if (eigenvalues.size() != functions.size())
    throw std::invalid_argument("spectral_kernel: eigenvalue/function count mismatch");
  if (eigenvalues.empty()) throw std::invalid_argument("spectral_kernel: empty spectrum");
  for (double l : eigenvalues)
    if (!std::isfinite(l)) throw std::invalid_argument("spectral_kernel: non-finite eigenvalue");
  return Kernel(std::make_shared<detail::SpectralKernel>(std::move(eigenvalues), std::move(functions),
                                                         dim, "spectral", false));
}

Kernel rank_one_kernel(CFunc psi, double weight, int dim) {
  if (!std::isfinite(weight) || weight < 0.0)
    throw std::invalid_argument("rank_one_kernel: weight >= 0 required");
  std::vector<double> lam{weight};
  std::vector<CFunc> fns{std::move(psi)};
  return Kernel(
      std::make_shared<detail::SpectralKernel>(std::move(lam), std::move(fns), dim, "rank-one", false));
}

Kernel thin(const Kernel& k, const Vec& z) {
  if (z.size() != k.dim()) throw std::invalid_argument("thin: removal point dimension mismatch");
  double kzz = k(z, z).real();
  if (!(kzz > 1e-12))
    throw std::domain_error("thin: degenerate removal point, K(z,z) must exceed 1e-12");
  return Kernel(std::make_shared<detail::ThinnedKernel>(k, z, kzz));
}

std::vector<CFunc> fourier_basis(int n_modes, const Window& w) {
  if (w.dim() != 1) throw std::invalid_argument("fourier_basis: 1-D window required");
  if (n_modes < 1) throw std::invalid_argument("fourier_basis: n_modes >= 1 required");
  const double lo = w.lo[0], len = w.hi[0] - w.lo[0];
  std::vector<CFunc> fns;
  fns.reserve(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    double freq = 2.0 * std::numbers::pi * k / len;
    double scale = 1.0 / std::sqrt(len);
    fns.push_back([lo, freq, scale](const Vec& x) {
      return scale * std::exp(Cplx(0.0, freq * (x[0] - lo)));
    });
  }
  return fns;
}

std::vector<CFunc> legendre_basis(int n, const Window& w) {
  if (w.dim() != 1) throw std::invalid_argument("legendre_basis: 1-D window required");
  if (n < 1) throw std::invalid_argument("legendre_basis: n >= 1 required");
  const double lo = w.lo[0], len = w.hi[0] - w.lo[0];
  std::vector<CFunc> fns;
  fns.reserve(n);
  for (int k = 0; k < n; ++k) {
    double norm = std::sqrt((2.0 * k + 1.0) / len);
    fns.push_back([lo, len, k, norm](const Vec& x) {
      double t = 2.0 * (x[0] - lo) / len - 1.0;
      double p0 = 1.0, p1 = t;
      if (k == 0) return Cplx(norm);
      for (int m = 2; m <= k; ++m) {
        double p2 = ((2 * m - 1) * t * p1 - (m - 1) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      return Cplx(norm * p1);
    });
  }
  return fns;
}

SpectralDecomposition::SpectralDecomposition(Kernel k, Quadrature q)
    : kernel_(std::move(k)), quad_(std::move(q)) {}

double SpectralDecomposition::trace() const {
  double t = 0.0;
  for (double mu : eigenvalues_) t += mu;
  return t;
}

Cplx SpectralDecomposition::eigenfunction(int k, const Vec& x) const {
  if (k < 0 || k >= rank()) throw std::invalid_argument("eigenfunction: index out of range");
  Cplx v = 0.0;
  for (std::size_t j = 0; j < quad_.size(); ++j) v += kernel_(x, quad_.nodes[j]) * extension_(j, k);
  return v;
}

Eigen::VectorXcd SpectralDecomposition::eigenfunctions_at(const Vec& x) const {
  Eigen::VectorXcd row(quad_.size());
  for (std::size_t j = 0; j < quad_.size(); ++j) row[j] = kernel_(x, quad_.nodes[j]);
  return extension_.transpose() * row;
}

Cplx SpectralDecomposition::spectral_value(const Vec& x, const Vec& y) const {
  Eigen::VectorXcd fx = eigenfunctions_at(x);
  Eigen::VectorXcd fy = eigenfunctions_at(y);
  Cplx v = 0.0;
  for (int k = 0; k < rank(); ++k) v += eigenvalues_[k] * fx[k] * std::conj(fy[k]);
  return v;
}

SpectralDecomposition decompose(const Kernel& k, const Window& w, int points_per_axis) {
  if (w.dim() != k.dim()) throw std::invalid_argument("decompose: window/kernel dimension mismatch");
  SpectralDecomposition sd(k, Quadrature::tensor(w, points_per_axis));
  const auto& q = sd.quad_;
  const std::size_t m = q.size();

  Eigen::MatrixXcd a(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    a(i, i) = k(q.nodes[i], q.nodes[i]);
    for (std::size_t j = i + 1; j < m; ++j) {
      Cplx v = k(q.nodes[i], q.nodes[j]);
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  Eigen::VectorXd sqw(m);
  for (std::size_t i = 0; i < m; ++i) sqw[i] = std::sqrt(q.weights[i]);
  sd.node_matrix_ = sqw.asDiagonal() * a * sqw.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(sd.node_matrix_);
  if (eig.info() != Eigen::Success) throw std::runtime_error("decompose: eigensolver failed");

  const Eigen::VectorXd& lam = eig.eigenvalues();  // ascending
  if (lam[0] < -1e-6 || lam[m - 1] > 1.0 + 1e-6) {
    std::ostringstream msg;
    msg << "decompose: kernel violates As2, restricted spectrum must lie in [0, 1) but spans ["
        << lam[0] << ", " << lam[m - 1] << "]";
    throw std::domain_error(msg.str());
  }

  std::vector<int> keep;
  for (int i = static_cast<int>(m) - 1; i >= 0; --i) {
    if (lam[i] < 1e-12) break;  // ascending order: everything below is truncated
    keep.push_back(i);
  }
  const int r = static_cast<int>(keep.size());
  sd.eigenvalues_.resize(r);
  sd.node_modes_.resize(m, r);
  sd.extension_.resize(m, r);
  for (int c = 0; c < r; ++c) {
    double mu = lam[keep[c]];
    if (k.projection_like() && std::abs(mu - 1.0) <= 1e-8) mu = 1.0;
    sd.eigenvalues_[c] = mu;
    const auto u = eig.eigenvectors().col(keep[c]);
    for (std::size_t j = 0; j < m; ++j) {
      sd.node_modes_(j, c) = u[j] / sqw[j];
      sd.extension_(j, c) = sqw[j] * u[j] / mu;
    }
  }
  return sd;
}

}  // namespace dpplab
