#include "dpplab/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace dpplab {

namespace {

constexpr int kMaxHalving = 20;

std::vector<double> drift(const std::vector<double>& x, double theta) {
  const int n = static_cast<int>(x.size());
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) {
    double v = -theta * x[i];
    for (int j = 0; j < n; ++j)
      if (j != i) v += 1.0 / (x[i] - x[j]);
    d[i] = v;
  }
  return d;
}

bool strictly_increasing(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) return false;
  return true;
}

std::vector<double> attempt(const std::vector<double>& x, double dt, double theta, int depth,
                            int& deepest, RandomStream& rng) {
  std::vector<double> y(x.size());
  std::vector<double> d = drift(x, theta);
  double s = std::sqrt(dt);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + d[i] * dt + s * rng.normal();
  if (strictly_increasing(y)) return y;
  if (depth >= kMaxHalving)
    throw std::runtime_error("collision unresolved: ordering lost after 20 halvings");
  deepest = std::max(deepest, depth + 1);
  std::vector<double> mid = attempt(x, dt / 2, theta, depth + 1, deepest, rng);
  return attempt(mid, dt / 2, theta, depth + 1, deepest, rng);
}

}  // namespace

DiffusionState dyson_initial_gue(int n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("dyson_initial_gue: n >= 1 required");
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = std::sqrt(0.5) * rng.normal();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      std::complex<double> z(0.5 * rng.normal(), 0.5 * rng.normal());
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  DiffusionState s;
  s.x.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return s;
}

int dyson_step(DiffusionState& state, double dt, double theta, RandomStream& rng) {
  if (dt <= 0.0) throw std::invalid_argument("dyson_step: dt > 0 required");
  if (!strictly_increasing(state.x))
    throw std::invalid_argument("dyson_step: positions must be strictly increasing");
  int deepest = 0;
  state.x = attempt(state.x, dt, theta, 0, deepest, rng);
  state.time += dt;
  return deepest;
}

DiffusionRun dyson_run(const DiffusionState& initial, int steps, double dt, double theta,
                       int burn_in, int record_stride, RandomStream& rng) {
  if (record_stride < 1) throw std::invalid_argument("dyson_run: record_stride >= 1 required");
  DiffusionRun run;
  run.steps = steps;
  run.dt = dt;
  run.theta = theta;
  DiffusionState s = initial;
  for (int t = 1; t <= steps; ++t) {
    run.max_halving_depth = std::max(run.max_halving_depth, dyson_step(s, dt, theta, rng));
    if (t >= burn_in && t % record_stride == 0) run.records.push_back(s);
  }
  return run;
}

double wigner_surmise_cdf(double s) {
  if (s <= 0.0) return 0.0;
  const double pi = std::numbers::pi;
  return std::erf(2.0 * s / std::sqrt(pi)) - (4.0 * s / pi) * std::exp(-4.0 * s * s / pi);
}

StationarityReport stationarity_report(const DiffusionRun& run) {
  if (run.records.size() < 2)
    throw std::invalid_argument("stationarity_report: at least 2 recorded states required");
  const int n = static_cast<int>(run.records.front().x.size());
  if (n < 4)
    throw std::invalid_argument("stationarity_report: at least 4 particles required");
  const std::size_t m = run.records.size();

  StationarityReport rep;
  rep.particles = n;
  rep.records = static_cast<int>(m);

  // per-gap-index ensemble means, then pooled interior spacings
  std::vector<double> gap_mean(n - 1, 0.0);
  for (const auto& st : run.records)
    for (int g = 0; g < n - 1; ++g) gap_mean[g] += st.x[g + 1] - st.x[g];
  for (double& v : gap_mean) v /= static_cast<double>(m);

  std::vector<double> pooled;
  pooled.reserve(m * (n - 3));
  for (const auto& st : run.records)
    for (int g = 1; g < n - 2; ++g) pooled.push_back((st.x[g + 1] - st.x[g]) / gap_mean[g]);
  std::sort(pooled.begin(), pooled.end());
  double ks = 0.0;
  const double cnt = static_cast<double>(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    double c = wigner_surmise_cdf(pooled[i]);
    ks = std::max(ks, std::abs((i + 1) / cnt - c));
    ks = std::max(ks, std::abs(i / cnt - c));
  }
  rep.ks_spacing = ks;

  double lo = run.records.front().x.front(), hi = run.records.front().x.back();
  double sumsq_first = 0.0, sumsq_second = 0.0, sumsq = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    double ss = 0.0;
    for (double v : run.records[r].x) {
      ss += v * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    sumsq += ss;
    (r < m / 2 ? sumsq_first : sumsq_second) += ss;
  }
  rep.mean_square_observed = sumsq / static_cast<double>(m);
  rep.min_position = lo;
  rep.max_position = hi;
  rep.drift_ratio = sumsq_first > 0.0
                        ? (sumsq_second / static_cast<double>(m - m / 2)) /
                              (sumsq_first / static_cast<double>(m / 2))
                        : std::numeric_limits<double>::infinity();

  if (run.theta > 0.0) {
    rep.mean_square_model = n * n / (2.0 * run.theta);
    rep.edge_model = std::sqrt(2.0 * n / run.theta);
    rep.stationary = rep.drift_ratio > 0.5 && rep.drift_ratio < 2.0;
  } else {
    rep.mean_square_model = std::numeric_limits<double>::infinity();
    rep.edge_model = std::numeric_limits<double>::infinity();
    rep.stationary = false;  // no confinement, no stationary law
  }
  return rep;
}

}  // namespace dpplab
