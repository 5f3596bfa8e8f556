#include "dpplab/fredholm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dpplab {

double trace(const Kernel& k, const Window& w, int points_per_axis) {
  Quadrature q = Quadrature::tensor(w, points_per_axis);
  double t = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) t += q.weights[i] * k(q.nodes[i], q.nodes[i]).real();
  return t;
}

double DeterminantReport::value(const std::string& route) const {
  for (const auto& [name, v] : values)
    if (name == route) return v;
  throw std::invalid_argument("DeterminantReport: route '" + route + "' was not evaluated");
}

namespace {

constexpr int kMaxSeriesOrder = 20;
constexpr double kSeriesTermTol = 1e-12;
// subset enumeration is the literal evaluation but blows up combinatorially;
// past this node count the identical S_m come from Newton's identities
constexpr std::size_t kEnumerationNodeLimit = 16;

double spectral_route(const SpectralDecomposition& sd, double z) {
  double det = 1.0;
  for (double mu : sd.eigenvalues()) det *= 1.0 + z * mu;
  return det;
}

// sum over size-m index subsets of det(B[J, J]), each by partial-pivot LU
double subset_sum(const Eigen::MatrixXcd& b, int m) {
  const int n = static_cast<int>(b.rows());
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  double acc = 0.0;
  Eigen::MatrixXcd sub(m, m);
  while (true) {
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) sub(r, c) = b(idx[r], idx[c]);
    acc += Eigen::PartialPivLU<Eigen::MatrixXcd>(sub).determinant().real();
    int k = m - 1;
    while (k >= 0 && idx[k] == n - m + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return acc;
}

double series_route(const SpectralDecomposition& sd, double z, int& terms_out) {
  const Eigen::MatrixXcd& b = sd.weighted_node_matrix();
  const std::size_t n = b.rows();
  const int top = std::min<int>(kMaxSeriesOrder, static_cast<int>(n));
  const bool enumerate = n <= kEnumerationNodeLimit;

  // power sums and elementary symmetric functions for the large-grid path
  std::vector<double> esym{1.0};
  Eigen::MatrixXcd bpow;
  std::vector<double> psums;
  if (!enumerate) psums.reserve(top);

  double det = 1.0, zm = 1.0;
  int m = 0;
  while (m < top) {
    ++m;
    zm *= z;
    double sm;
    if (enumerate) {
      sm = subset_sum(b, m);
    } else {
      if (bpow.size() == 0)
        bpow = b;
      else
        bpow = bpow * b;
      psums.push_back(bpow.trace().real());
      // Newton: e_m = (1/m) sum_{i=1..m} (-1)^(i-1) e_{m-i} p_i
      double e = 0.0;
      for (int i = 1; i <= m; ++i) e += (i % 2 ? 1.0 : -1.0) * esym[m - i] * psums[i - 1];
      e /= m;
      esym.push_back(e);
      sm = e;
    }
    double term = zm * sm;
    det += term;
    if (std::abs(term) < kSeriesTermTol) break;
  }
  terms_out = m;
  return det;
}

double plemelj_route(const SpectralDecomposition& sd, double z) {
  const Eigen::MatrixXcd& b = sd.weighted_node_matrix();
  double logdet = 0.0, zm = 1.0;
  Eigen::MatrixXcd bpow = b;
  for (int m = 1; m <= 300; ++m) {
    zm *= z;
    double term = (m % 2 ? 1.0 : -1.0) * zm * bpow.trace().real() / m;
    logdet += term;
    if (std::abs(term) < 1e-15) break;
    bpow = bpow * b;
  }
  return std::exp(logdet);
}

}  // namespace

DeterminantReport fredholm_det(const SpectralDecomposition& sd, double z, const std::string& method) {
  if (!std::isfinite(z)) throw std::invalid_argument("fredholm_det: z must be finite");
  const bool all = method == "all";
  if (!all && method != "spectral" && method != "series" && method != "plemelj")
    throw std::invalid_argument("fredholm_det: unknown method '" + method + "'");

  const double abs_trace = std::abs(sd.weighted_node_matrix().trace().real());
  const bool plemelj_ok = std::abs(z) * abs_trace < 1.0;
  if (method == "plemelj" && !plemelj_ok) {
    std::ostringstream msg;
    msg << "fredholm_det: Plemelj precondition violated, |z| Tr|K| = " << std::abs(z) * abs_trace
        << " must be below 1";
    throw std::domain_error(msg.str());
  }

  DeterminantReport rep;
  rep.z = z;
  if (all || method == "spectral") rep.values.emplace_back("spectral", spectral_route(sd, z));
  if (all || method == "series") {
    int terms = 0;
    rep.values.emplace_back("series", series_route(sd, z, terms));
    rep.series_terms = terms;
  }
  if ((all && plemelj_ok) || method == "plemelj")
    rep.values.emplace_back("plemelj", plemelj_route(sd, z));

  for (std::size_t i = 0; i < rep.values.size(); ++i)
    for (std::size_t j = i + 1; j < rep.values.size(); ++j)
      rep.max_pairwise_gap =
          std::max(rep.max_pairwise_gap, std::abs(rep.values[i].second - rep.values[j].second));
  rep.routes_consistent = rep.max_pairwise_gap <= 1e-5;
  return rep;
}

}  // namespace dpplab
