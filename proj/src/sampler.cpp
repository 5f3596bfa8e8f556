#include "dpplab/sampler.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "dpplab/statistics.hpp"

namespace dpplab {

namespace {

constexpr long kProposalCap = 1'000'000;
constexpr double kEnvelopeSlack = 1.1;
constexpr double kNullRowTol = 1e-8;

// Orthonormal frame rows spanning the coefficient subspace of functions that
// vanish at every accepted point. A function with coefficients c vanishes at
// the newly accepted x iff c is Hermitian-orthogonal to conj(phi(x)); the
// piece of that constraint inside the current row space is C^T conj(C phi),
// so the rows are re-orthogonalized against it and exactly one dimension
// drops out.
Eigen::MatrixXcd rebuild_frame(const Eigen::MatrixXcd& frame, const Eigen::VectorXcd& accepted) {
  const int m = static_cast<int>(frame.rows());
  const int k = static_cast<int>(frame.cols());
  Eigen::MatrixXcd next(m - 1, k);
  Eigen::VectorXcd lead = frame.transpose() * (frame * accepted).conjugate();
  lead /= lead.norm();
  int out = 0;
  int dropped = 0;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXcd r = frame.row(j).transpose();
    r -= lead * (lead.adjoint() * r);
    for (int t = 0; t < out; ++t) r -= next.row(t).transpose() * (next.row(t).conjugate() * r);
    double nrm = r.norm();
    if (nrm < kNullRowTol) {
      ++dropped;
      continue;
    }
    if (out == m - 1) {
      ++dropped;  // numerically tied rows; keep the frame square
      continue;
    }
    next.row(out++) = (r / nrm).transpose();
  }
  if (out != m - 1 || dropped != 1)
    throw std::runtime_error("sampler frame update lost orthogonality");
  return next;
}

}  // namespace

PointConfiguration sample(const SpectralDecomposition& sd, RandomStream& rng) {
  const Window& w = sd.quadrature().window;
  const int d = w.dim();
  PointConfiguration cfg(d);

  std::vector<int> selected;
  for (int k = 0; k < sd.rank(); ++k)
    if (rng.uniform() < sd.eigenvalues()[k]) selected.push_back(k);
  if (selected.empty()) return cfg;

  const int k = static_cast<int>(selected.size());
  const std::size_t nodes = sd.quadrature().size();

  // eigenfunction samples at the quadrature nodes, restricted to the
  // selected modes; used only to size the rejection envelope
  Eigen::MatrixXcd node_sel(nodes, k);
  for (int j = 0; j < k; ++j) node_sel.col(j) = sd.node_modes().col(selected[j]);

  Eigen::MatrixXcd frame = Eigen::MatrixXcd::Identity(k, k);
  auto max_node_diagonal = [&]() {
    double best = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      double v = (frame * node_sel.row(i).transpose()).squaredNorm();
      best = std::max(best, v);
    }
    return best;
  };

  Eigen::VectorXcd phi(k);
  for (int remaining = k; remaining > 0; --remaining) {
    const double envelope = kEnvelopeSlack * max_node_diagonal();
    if (envelope <= 0.0) throw std::runtime_error("sampler stuck: vanishing frame density");
    long proposals = 0;
    for (;;) {
      if (++proposals > kProposalCap)
        throw std::runtime_error("sampler stuck: rejection cap exceeded");
      Vec x(d);
      for (int a = 0; a < d; ++a) x[a] = w.lo[a] + rng.uniform() * (w.hi[a] - w.lo[a]);
      Eigen::VectorXcd full = sd.eigenfunctions_at(x);
      for (int j = 0; j < k; ++j) phi[j] = full[selected[j]];
      double density = (frame * phi).squaredNorm();
      if (rng.uniform() * envelope < density) {
        cfg.add(x);
        if (remaining > 1) frame = rebuild_frame(frame, phi);
        break;
      }
    }
  }
  return cfg;
}

std::vector<PointConfiguration> sample_batch(const SpectralDecomposition& sd, int count,
                                             RandomStream& rng) {
  if (count < 0) throw std::invalid_argument("sample_batch: count must be nonnegative");
  std::vector<RandomStream> streams = rng.split(count);
  std::vector<PointConfiguration> out(count, PointConfiguration(sd.kernel().dim()));

  unsigned workers = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("DPPLAB_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) workers = static_cast<unsigned>(v);
  }
  workers = std::max(1u, std::min<unsigned>(workers, count > 0 ? count : 1));

  std::atomic<int> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      int i = cursor.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = sample(sd, streams[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

SpectralDecomposition thinned_decomposition(const SpectralDecomposition& sd, const Vec& z) {
  return decompose(thin(sd.kernel(), z), sd.quadrature().window, sd.quadrature().points_per_axis);
}

PointConfiguration sample_thinned(const SpectralDecomposition& sd, const Vec& z,
                                  RandomStream& rng) {
  SpectralDecomposition thinned = thinned_decomposition(sd, z);
  return sample(thinned, rng);
}

CountLawReport verify_count_law(const std::vector<PointConfiguration>& samples,
                                const SpectralDecomposition& sd) {
  if (samples.empty()) throw std::invalid_argument("verify_count_law: no samples");
  CountDistribution law = count_distribution(sd);
  const std::size_t cells = law.p.size();  // counts 0 .. rank
  std::vector<double> observed(cells, 0.0), expected(cells, 0.0);
  double mean_obs = 0.0;
  for (const auto& s : samples) {
    std::size_t n = s.size();
    mean_obs += static_cast<double>(n);
    if (n >= cells)
      throw std::runtime_error("verify_count_law: sample count exceeds the model rank");
    observed[n] += 1.0;
  }
  mean_obs /= static_cast<double>(samples.size());
  for (std::size_t n = 0; n < cells; ++n)
    expected[n] = law.p[n] * static_cast<double>(samples.size());

  // merge adjacent cells until every expected count reaches 5
  CountLawReport rep;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t n = 0; n < cells; ++n) {
    acc_o += observed[n];
    acc_e += expected[n];
    if (acc_e >= 5.0) {
      rep.observed.push_back(acc_o);
      rep.expected.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (rep.expected.empty()) {
      rep.observed.push_back(acc_o);
      rep.expected.push_back(acc_e);
    } else {
      rep.observed.back() += acc_o;
      rep.expected.back() += acc_e;
    }
  }

  for (std::size_t c = 0; c < rep.expected.size(); ++c) {
    double diff = rep.observed[c] - rep.expected[c];
    rep.chi_square += diff * diff / rep.expected[c];
  }
  rep.dof = static_cast<int>(rep.expected.size()) - 1;
  rep.mean_observed = mean_obs;
  rep.mean_model = law.mean();
  rep.variance_model = law.variance();
  if (rep.dof >= 1) {
    boost::math::chi_squared dist(rep.dof);
    rep.p_value = boost::math::cdf(boost::math::complement(dist, rep.chi_square));
  } else {
    rep.p_value = 1.0;
  }
  rep.flagged = rep.p_value < 1e-3;
  return rep;
}

}  // namespace dpplab
