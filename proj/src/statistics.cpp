#include "dpplab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dpplab {

namespace {

double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double pairwise_sum(const std::vector<double>& v) { return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size()); }

void check_interaction_exists(const SpectralDecomposition& sd) {
  for (double mu : sd.eigenvalues())
    if (mu >= 1.0 - 1e-9)
      throw std::domain_error(
          "interaction operator undefined: an eigenvalue reaches 1 within 1e-9 "
          "(projection-type spectrum)");
}

}  // namespace

double correlation(const Kernel& k, const std::vector<Vec>& points) {
  const int n = static_cast<int>(points.size());
  if (n == 0) return 1.0;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = k(points[i], points[i]);
    for (int j = i + 1; j < n; ++j) {
      Cplx v = k(points[i], points[j]);
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant().real();
}

Kernel interaction_kernel(const SpectralDecomposition& sd) {
  check_interaction_exists(sd);
  auto holder = std::make_shared<SpectralDecomposition>(sd);
  std::vector<double> lam(sd.rank());
  std::vector<CFunc> fns;
  fns.reserve(sd.rank());
  for (int k = 0; k < sd.rank(); ++k) {
    lam[k] = sd.eigenvalues()[k] / (1.0 - sd.eigenvalues()[k]);
    fns.push_back([holder, k](const Vec& x) { return holder->eigenfunction(k, x); });
  }
  return spectral_kernel(std::move(lam), std::move(fns), sd.kernel().dim());
}

double void_probability(const SpectralDecomposition& sd) {
  double p = 1.0;
  for (double mu : sd.eigenvalues()) p *= 1.0 - mu;
  return p;
}

double janossy_density(const SpectralDecomposition& sd, const std::vector<Vec>& points) {
  if (points.empty()) return void_probability(sd);
  check_interaction_exists(sd);
  const int n = static_cast<int>(points.size());
  const int r = sd.rank();
  Eigen::MatrixXcd f(n, r);
  for (int i = 0; i < n; ++i) f.row(i) = sd.eigenfunctions_at(points[i]).transpose();
  Eigen::VectorXd ratio(r);
  for (int k = 0; k < r; ++k) ratio[k] = sd.eigenvalues()[k] / (1.0 - sd.eigenvalues()[k]);
  Eigen::MatrixXcd j = f * ratio.asDiagonal() * f.adjoint();
  double eta = Eigen::PartialPivLU<Eigen::MatrixXcd>(j).determinant().real();
  double density = void_probability(sd) * eta;
  if (density < -1e-6)
    throw std::runtime_error("janossy_density: determinant went negative beyond roundoff scale");
  return std::max(density, 0.0);
}

double CountDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 1; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
  return m;
}

double CountDistribution::variance() const {
  double m = mean(), s = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) s += (n - m) * (n - m) * p[n];
  return s;
}

CountDistribution count_distribution(const SpectralDecomposition& sd) {
  CountDistribution d;
  d.p = {1.0};
  for (double mu : sd.eigenvalues()) {
    std::vector<double> next(d.p.size() + 1, 0.0);
    for (std::size_t n = 0; n < d.p.size(); ++n) {
      next[n] += (1.0 - mu) * d.p[n];
      next[n + 1] += mu * d.p[n];
    }
    d.p = std::move(next);
  }
  return d;
}

// ---- box-product integrals ----------------------------------------------

namespace {

// window cells induced by the box-edge arrangement, each with its own rule
struct PartitionQuad {
  std::vector<Vec> nodes;
  std::vector<double> weights;
  std::vector<std::vector<int>> box_nodes;  // node indices per requested box
  std::vector<int> free_nodes;              // complement node indices
};

PartitionQuad build_partition(const Window& w, const std::vector<Window>& boxes,
                              int cell_resolution) {
  const int d = w.dim();
  for (const auto& b : boxes) {
    if (b.dim() != d) throw std::invalid_argument("box dimension mismatch");
    for (int a = 0; a < d; ++a)
      if (b.lo[a] < w.lo[a] - 1e-12 || b.hi[a] > w.hi[a] + 1e-12)
        throw std::invalid_argument("boxes must lie inside the window");
  }
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      if (!disjoint(boxes[i], boxes[j])) throw std::invalid_argument("boxes must be disjoint");

  std::vector<std::vector<double>> cuts(d);
  for (int a = 0; a < d; ++a) {
    cuts[a] = {w.lo[a], w.hi[a]};
    for (const auto& b : boxes) {
      if (b.lo[a] > w.lo[a] && b.lo[a] < w.hi[a]) cuts[a].push_back(b.lo[a]);
      if (b.hi[a] > w.lo[a] && b.hi[a] < w.hi[a]) cuts[a].push_back(b.hi[a]);
    }
    std::sort(cuts[a].begin(), cuts[a].end());
    cuts[a].erase(std::unique(cuts[a].begin(), cuts[a].end(),
                              [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                  cuts[a].end());
  }

  PartitionQuad pq;
  pq.box_nodes.resize(boxes.size());
  std::vector<int> idx(d, 0);
  std::vector<int> ncells(d);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    ncells[a] = static_cast<int>(cuts[a].size()) - 1;
    total *= ncells[a];
  }
  for (std::size_t c = 0; c < total; ++c) {
    Vec lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
      lo[a] = cuts[a][idx[a]];
      hi[a] = cuts[a][idx[a] + 1];
    }
    Window cell(lo, hi);
    int owner = -1;
    Vec mid = cell.center();
    for (std::size_t b = 0; b < boxes.size(); ++b)
      if (boxes[b].contains(mid)) {
        owner = static_cast<int>(b);
        break;
      }
    Quadrature q = Quadrature::tensor(cell, cell_resolution);
    for (std::size_t t = 0; t < q.size(); ++t) {
      int node_id = static_cast<int>(pq.nodes.size());
      pq.nodes.push_back(q.nodes[t]);
      pq.weights.push_back(q.weights[t]);
      if (owner >= 0)
        pq.box_nodes[owner].push_back(node_id);
      else
        pq.free_nodes.push_back(node_id);
    }
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < ncells[a]) break;
      idx[a] = 0;
    }
  }
  return pq;
}

// weighted kernel matrix on the partition nodes
Eigen::MatrixXcd weighted_kernel_matrix(const Kernel& k, const PartitionQuad& pq) {
  const int n = static_cast<int>(pq.nodes.size());
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    double wi = std::sqrt(pq.weights[i]);
    m(i, i) = wi * wi * k(pq.nodes[i], pq.nodes[i]);
    for (int j = i + 1; j < n; ++j) {
      Cplx v = wi * std::sqrt(pq.weights[j]) * k(pq.nodes[i], pq.nodes[j]);
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
  }
  return m;
}

// weighted interaction matrix, built from the decomposition's modes so the
// whole computation stays inside one discrete model
Eigen::MatrixXcd weighted_interaction_matrix(const SpectralDecomposition& sd,
                                             const PartitionQuad& pq) {
  check_interaction_exists(sd);
  const int n = static_cast<int>(pq.nodes.size());
  const int r = sd.rank();
  Eigen::MatrixXcd f(n, r);
  for (int i = 0; i < n; ++i)
    f.row(i) = std::sqrt(pq.weights[i]) * sd.eigenfunctions_at(pq.nodes[i]).transpose();
  Eigen::VectorXd ratio(r);
  for (int k = 0; k < r; ++k) ratio[k] = sd.eigenvalues()[k] / (1.0 - sd.eigenvalues()[k]);
  return f * ratio.asDiagonal() * f.adjoint();
}

double gathered_det(const Eigen::MatrixXcd& m, const std::vector<int>& ids) {
  const int n = static_cast<int>(ids.size());
  if (n == 0) return 1.0;
  Eigen::MatrixXcd sub(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sub(i, j) = m(ids[i], ids[j]);
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(sub).determinant().real();
}

template <class F>
void for_each_combination(const std::vector<int>& items, int k, std::vector<int>& scratch,
                          std::size_t start, F&& fn) {
  if (k == 0) {
    fn();
    return;
  }
  for (std::size_t i = start; i + k <= items.size(); ++i) {
    scratch.push_back(items[i]);
    for_each_combination(items, k - 1, scratch, i + 1, fn);
    scratch.pop_back();
  }
}

// sum of det(m[J, J]) over subsets J drawing exactly counts[i] nodes from
// group i (groups are disjoint node-index lists)
double constrained_subset_sum(const Eigen::MatrixXcd& m,
                              const std::vector<const std::vector<int>*>& groups,
                              const std::vector<int>& counts) {
  double acc = 0.0;
  std::vector<int> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t g) {
    if (g == groups.size()) {
      acc += gathered_det(m, chosen);
      return;
    }
    for_each_combination(*groups[g], counts[g], chosen, 0, [&] { rec(g + 1); });
  };
  rec(0);
  return acc;
}

// sum over all subsets of total size with per-box intersection >= minima,
// weighted by prod falling_factorial(|J cap box_i|, minima_i); the "anywhere"
// slots of the whole-window series land both in boxes and in the complement
double weighted_subset_sum(const Eigen::MatrixXcd& m, const PartitionQuad& pq,
                           const std::vector<int>& minima, int total) {
  const std::size_t r = pq.box_nodes.size();
  double acc = 0.0;
  std::vector<int> chosen;
  std::function<void(std::size_t, int, double)> rec = [&](std::size_t g, int left, double weight) {
    if (g == r) {
      if (left > static_cast<int>(pq.free_nodes.size())) return;
      for_each_combination(pq.free_nodes, left, chosen, 0,
                           [&] { acc += weight * gathered_det(m, chosen); });
      return;
    }
    const auto& group = pq.box_nodes[g];
    int hi = std::min<int>(left, static_cast<int>(group.size()));
    for (int c = minima[g]; c <= hi; ++c) {
      double fp = factorial_power(c, minima[g]);
      for_each_combination(group, c, chosen, 0, [&] { rec(g + 1, left - c, weight * fp); });
    }
  };
  rec(0, total, 1.0);
  return acc;
}

struct BoxContext {
  PartitionQuad pq;
  Eigen::MatrixXcd bk;
  double node_void = 0.0;
};

BoxContext make_context(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                        const std::vector<int>& counts, int cell_resolution) {
  if (boxes.size() != counts.size())
    throw std::invalid_argument("box and count lists must have equal length");
  for (int c : counts)
    if (c < 0) throw std::invalid_argument("counts must be nonnegative");
  BoxContext ctx{build_partition(sd.quadrature().window, boxes, cell_resolution), {}, 0.0};
  ctx.bk = weighted_kernel_matrix(sd.kernel(), ctx.pq);
  const int n = static_cast<int>(ctx.pq.nodes.size());
  ctx.node_void = (Eigen::MatrixXcd::Identity(n, n) - ctx.bk).partialPivLu().determinant().real();
  return ctx;
}

double fact(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double factorial_moment(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                        const std::vector<int>& orders, int cell_resolution) {
  BoxContext ctx = make_context(sd, boxes, orders, cell_resolution);
  std::vector<const std::vector<int>*> groups;
  for (const auto& g : ctx.pq.box_nodes) groups.push_back(&g);
  double mult = 1.0;
  for (int c : orders) mult *= fact(c);
  return mult * constrained_subset_sum(ctx.bk, groups, orders);
}

double janossy_box(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                   const std::vector<int>& counts, int cell_resolution) {
  BoxContext ctx = make_context(sd, boxes, counts, cell_resolution);
  Eigen::MatrixXcd bj = weighted_interaction_matrix(sd, ctx.pq);
  std::vector<const std::vector<int>*> groups;
  for (const auto& g : ctx.pq.box_nodes) groups.push_back(&g);
  double mult = 1.0;
  for (int c : counts) mult *= fact(c);
  return ctx.node_void * mult * constrained_subset_sum(bj, groups, counts);
}

double fidi_probability(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                        const std::vector<int>& counts, int max_terms, int cell_resolution) {
  BoxContext ctx = make_context(sd, boxes, counts, cell_resolution);
  Eigen::MatrixXcd bj = weighted_interaction_matrix(sd, ctx.pq);
  std::vector<const std::vector<int>*> groups;
  for (const auto& g : ctx.pq.box_nodes) groups.push_back(&g);
  groups.push_back(&ctx.pq.free_nodes);
  std::vector<int> with_s(counts);
  with_s.push_back(0);

  double total = 0.0;
  for (int s = 0; s < max_terms; ++s) {
    if (s > static_cast<int>(ctx.pq.free_nodes.size())) return total;
    with_s.back() = s;
    double term = ctx.node_void * constrained_subset_sum(bj, groups, with_s);
    total += term;
    if (std::abs(term) < 1e-10) return total;
  }
  throw std::runtime_error("fidi_probability: complement series did not converge within " +
                           std::to_string(max_terms) + " terms");
}

double factorial_moment_from_janossy(const SpectralDecomposition& sd,
                                     const std::vector<Window>& boxes,
                                     const std::vector<int>& orders, int max_terms,
                                     int cell_resolution) {
  BoxContext ctx = make_context(sd, boxes, orders, cell_resolution);
  Eigen::MatrixXcd bj = weighted_interaction_matrix(sd, ctx.pq);
  int n = 0;
  for (int c : orders) n += c;
  double total = 0.0;
  for (int s = 0; s < max_terms; ++s) {
    if (n + s > static_cast<int>(ctx.pq.nodes.size())) return total;
    double term = ctx.node_void * weighted_subset_sum(bj, ctx.pq, orders, n + s);
    total += term;
    if (std::abs(term) < 1e-10) return total;
  }
  throw std::runtime_error("factorial_moment_from_janossy: series did not converge within " +
                           std::to_string(max_terms) + " terms");
}

double janossy_from_moments(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                            const std::vector<int>& counts, int max_terms, int cell_resolution) {
  BoxContext ctx = make_context(sd, boxes, counts, cell_resolution);
  int n = 0;
  for (int c : counts) n += c;
  double total = 0.0;
  for (int s = 0; s < max_terms; ++s) {
    if (n + s > static_cast<int>(ctx.pq.nodes.size())) return total;
    double term = weighted_subset_sum(ctx.bk, ctx.pq, counts, n + s);
    total += (s % 2 ? -term : term);
    if (std::abs(term) < 1e-10) return total;
  }
  throw std::runtime_error("janossy_from_moments: alternating series did not converge within " +
                           std::to_string(max_terms) + " terms");
}

// ---- empirical estimators -------------------------------------------------

namespace {

double bin_integral_rho1(const Kernel& k, double lo, double hi) {
  Window b = Window::interval(lo, hi);
  Quadrature q = Quadrature::tensor(b, 8);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) acc += q.weights[i] * k(q.nodes[i], q.nodes[i]).real();
  return acc;
}

double bin_integral_rho2(const Kernel& k, double alo, double ahi, double blo, double bhi) {
  std::vector<double> gx, gw;
  gauss_legendre(6, gx, gw);
  double acc = 0.0;
  for (std::size_t i = 0; i < gx.size(); ++i)
    for (std::size_t j = 0; j < gx.size(); ++j) {
      Vec x(1), y(1);
      x[0] = 0.5 * (alo + ahi) + 0.5 * (ahi - alo) * gx[i];
      y[0] = 0.5 * (blo + bhi) + 0.5 * (bhi - blo) * gx[j];
      double w = 0.25 * (ahi - alo) * (bhi - blo) * gw[i] * gw[j];
      double kxx = k(x, x).real(), kyy = k(y, y).real();
      acc += w * (kxx * kyy - std::norm(k(x, y)));
    }
  return acc;
}

}  // namespace

void CorrelationTable::write_csv(std::ostream& os) const {
  os << "box_lo,box_hi,estimate,stderr,analytic\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.box_lo, r.box_hi,
                  r.estimate, r.stderr_, r.analytic);
    os << buf;
  }
}

CorrelationTable empirical_correlation(const std::vector<PointConfiguration>& samples,
                                       const SpectralDecomposition& sd, int bins, int order) {
  if (samples.size() < 100)
    throw std::invalid_argument("empirical_correlation: at least 100 samples required");
  if (bins < 1) throw std::invalid_argument("empirical_correlation: bins >= 1 required");
  if (order != 1 && order != 2)
    throw std::invalid_argument("empirical_correlation: order must be 1 or 2");
  const Window& w = sd.quadrature().window;
  if (w.dim() != 1)
    throw std::invalid_argument("empirical_correlation: 1-D windows only");
  const double lo = w.lo[0], len = w.hi[0] - w.lo[0], width = len / bins;
  const std::size_t s = samples.size();

  CorrelationTable table;
  table.order = order;

  if (order == 1) {
    std::vector<std::vector<double>> per_bin(bins, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < s; ++i) {
      if (samples[i].dim() != 1)
        throw std::invalid_argument("empirical_correlation: sample dimension mismatch");
      for (const auto& p : samples[i].points()) {
        int b = static_cast<int>((p[0] - lo) / width);
        if (b >= 0 && b < bins) per_bin[b][i] += 1.0;
      }
    }
    for (int b = 0; b < bins; ++b) {
      double m = pairwise_sum(per_bin[b]) / s;
      std::vector<double> sq(s);
      for (std::size_t i = 0; i < s; ++i) sq[i] = (per_bin[b][i] - m) * (per_bin[b][i] - m);
      double var = pairwise_sum(sq) / (s - 1);
      CorrelationRow row;
      row.box_lo = lo + b * width;
      row.box_hi = lo + (b + 1) * width;
      row.estimate = m / width;
      row.stderr_ = std::sqrt(var / s) / width;
      row.analytic = bin_integral_rho1(sd.kernel(), row.box_lo, row.box_hi) / width;
      table.rows.push_back(row);
    }
    return table;
  }

  // order 2: pool ordered pair counts by bin-center separation k * width
  std::vector<std::vector<double>> per_sep(bins, std::vector<double>(s, 0.0));
  for (std::size_t i = 0; i < s; ++i) {
    const auto& pts = samples[i].points();
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b) {
        if (a == b) continue;
        int ba = static_cast<int>((pts[a][0] - lo) / width);
        int bb = static_cast<int>((pts[b][0] - lo) / width);
        if (ba < 0 || ba >= bins || bb < 0 || bb >= bins) continue;
        int k = std::abs(ba - bb);
        per_sep[k][i] += 1.0;
      }
  }
  for (int k = 0; k < bins; ++k) {
    // ordered bin pairs contributing to separation k, and their volume mass
    double vol2 = 0.0;
    double analytic = 0.0;
    int npairs = 0;
    for (int a = 0; a < bins; ++a) {
      int b = a + k;
      if (b >= bins) break;
      double alo = lo + a * width, ahi = alo + width;
      double blo = lo + b * width, bhi = blo + width;
      double cnt = (k == 0) ? 1.0 : 2.0;  // ordered pairs (a,b) and (b,a)
      vol2 += cnt * width * width;
      analytic += cnt * bin_integral_rho2(sd.kernel(), alo, ahi, blo, bhi);
      ++npairs;
    }
    if (npairs == 0) continue;
    double m = pairwise_sum(per_sep[k]) / s;
    std::vector<double> sq(s);
    for (std::size_t i = 0; i < s; ++i) sq[i] = (per_sep[k][i] - m) * (per_sep[k][i] - m);
    double var = pairwise_sum(sq) / (s - 1);
    CorrelationRow row;
    row.box_lo = std::max(0.0, (k - 0.5) * width);
    row.box_hi = (k + 0.5) * width;
    row.estimate = m / vol2;
    row.stderr_ = std::sqrt(var / s) / vol2;
    row.analytic = analytic / vol2;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace dpplab
