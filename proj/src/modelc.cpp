#include "dpplab/modelc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fftw3.h>

namespace dpplab {

namespace {

constexpr double kBoundaryTol = 1e-8;
constexpr int kBoundaryMargin = 5;  // grid layers counted as "near the boundary"

std::size_t ipow(int base, int exp) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) v *= static_cast<std::size_t>(base);
  return v;
}

}  // namespace

// ---- marked configurations ------------------------------------------------

MarkedConfiguration::MarkedConfiguration(PointConfiguration base, std::vector<int> marks)
    : base_(std::move(base)), marks_(std::move(marks)) {
  if (marks_.size() != base_.size())
    throw std::invalid_argument("MarkedConfiguration: one mark per point required");
  std::vector<int> sorted(marks_);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i) + 1)
      throw std::invalid_argument("MarkedConfiguration: marks must be a permutation of 1..n");
}

MarkedConfiguration mark_by_distance(const PointConfiguration& config, const Vec& origin) {
  if (origin.size() != config.dim())
    throw std::invalid_argument("mark_by_distance: origin dimension mismatch");
  if (!config.simple())
    throw std::invalid_argument("mark_by_distance: configuration must be simple");
  const auto& pts = config.points();
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    double di = (pts[i] - origin).squaredNorm(), dj = (pts[j] - origin).squaredNorm();
    if (di != dj) return di < dj;
    return std::lexicographical_compare(pts[i].begin(), pts[i].end(), pts[j].begin(),
                                        pts[j].end());
  });
  std::vector<int> marks(pts.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    marks[order[rank]] = static_cast<int>(rank) + 1;
  return MarkedConfiguration(config, std::move(marks));
}

ParticleRecord select_particle(const MarkedConfiguration& marked, int label, double t) {
  const auto& marks = marked.marks();
  for (std::size_t i = 0; i < marks.size(); ++i)
    if (marks[i] == label) return ParticleRecord{t, label, marked.ground().points()[i]};
  throw std::invalid_argument("select_particle: mark " + std::to_string(label) + " not present");
}

// ---- wave functions on the periodic lattice ---------------------------------

WaveFunction::WaveFunction(Window window, int points_per_axis, double mass,
                           std::vector<Cplx> amplitudes)
    : window_(std::move(window)), n_(points_per_axis), mass_(mass), amp_(std::move(amplitudes)) {
  if (window_.dim() < 1 || window_.dim() > 3)
    throw std::invalid_argument("WaveFunction: 1, 2 or 3 dimensions supported");
  if (n_ < 4 * kBoundaryMargin)
    throw std::invalid_argument("WaveFunction: grid too coarse (need >= 20 points per axis)");
  if (mass_ <= 0.0) throw std::invalid_argument("WaveFunction: mass must be positive");
  if (amp_.size() != ipow(n_, window_.dim()))
    throw std::invalid_argument("WaveFunction: amplitude count does not match the grid");
  double cell = 1.0;
  for (int a = 0; a < window_.dim(); ++a) cell *= (window_.hi[a] - window_.lo[a]) / n_;
  double s = 0.0;
  for (const Cplx& v : amp_) s += std::norm(v);
  s *= cell;
  if (s <= 0.0) throw std::invalid_argument("WaveFunction: zero amplitude field");
  double inv = 1.0 / std::sqrt(s);
  for (Cplx& v : amp_) v *= inv;
}

Vec WaveFunction::spacing() const {
  Vec h(window_.dim());
  for (int a = 0; a < window_.dim(); ++a) h[a] = (window_.hi[a] - window_.lo[a]) / n_;
  return h;
}

Vec WaveFunction::node(std::size_t flat_index) const {
  const int d = window_.dim();
  Vec x(d);
  Vec h = spacing();
  for (int a = d - 1; a >= 0; --a) {
    x[a] = window_.lo[a] + static_cast<double>(flat_index % n_) * h[a];
    flat_index /= n_;
  }
  return x;
}

double WaveFunction::norm() const {
  double cell = 1.0;
  for (int a = 0; a < window_.dim(); ++a) cell *= (window_.hi[a] - window_.lo[a]) / n_;
  double s = 0.0;
  for (const Cplx& v : amp_) s += std::norm(v);
  return std::sqrt(cell * s);
}

double WaveFunction::boundary_max() const {
  const int d = window_.dim();
  double worst = 0.0;
  for (std::size_t j = 0; j < amp_.size(); ++j) {
    std::size_t rest = j;
    bool near = false;
    for (int a = d - 1; a >= 0 && !near; --a) {
      int idx = static_cast<int>(rest % n_);
      rest /= n_;
      if (idx < kBoundaryMargin || idx >= n_ - kBoundaryMargin) near = true;
    }
    if (near) worst = std::max(worst, std::abs(amp_[j]));
  }
  return worst;
}

WaveFunction gaussian_packet(const Window& w, int points_per_axis, double mass, const Vec& center,
                             double sigma, const Vec& wavevector) {
  const int d = w.dim();
  if (center.size() != static_cast<std::size_t>(d) ||
      wavevector.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("gaussian_packet: center/wavevector dimension mismatch");
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_packet: sigma must be positive");
  std::vector<Cplx> amp(ipow(points_per_axis, d));
  for (std::size_t j = 0; j < amp.size(); ++j) {
    std::size_t rest = j;
    double q2 = 0.0, phase = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      double h = (w.hi[a] - w.lo[a]) / points_per_axis;
      double xa = w.lo[a] + static_cast<double>(rest % points_per_axis) * h;
      rest /= points_per_axis;
      double dx = xa - center[a];
      q2 += dx * dx;
      phase += wavevector[a] * xa;
    }
    amp[j] = std::exp(-q2 / (4.0 * sigma * sigma)) * std::exp(Cplx(0.0, phase));
  }
  return WaveFunction(w, points_per_axis, mass, std::move(amp));
}

WaveFunction conditional_wavefunction(const Window& w, int points_per_axis, double mass,
                                      std::vector<Cplx> raw, double weight) {
  if (weight <= 0.0)
    throw std::invalid_argument("conditional_wavefunction: weight must be positive");
  double inv = 1.0 / std::sqrt(weight);
  for (Cplx& v : raw) v *= inv;
  return WaveFunction(w, points_per_axis, mass, std::move(raw));
}

// ---- spectral machinery -----------------------------------------------------

namespace {

std::vector<Cplx> run_fft(const std::vector<Cplx>& in, int d, int n, int sign) {
  static std::mutex plan_mutex;  // FFTW planning is not thread-safe
  std::vector<Cplx> out(in.size());
  std::vector<int> dims(d, n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft(d, dims.data(),
                         reinterpret_cast<fftw_complex*>(const_cast<Cplx*>(in.data())),
                         reinterpret_cast<fftw_complex*>(out.data()), sign,
                         FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

// integer frequency of FFT slot i (length n): 0..n/2, then negative
int freq_of(int i, int n) { return i <= n / 2 ? i : i - n; }

// wavenumber along `axis` for every flat index; Nyquist slot set to zero so
// the momentum operator stays skew-adjoint on the even grid
std::vector<double> axis_wavenumbers(const WaveFunction& psi, int axis) {
  const int d = psi.dim(), n = psi.points_per_axis();
  const double len = psi.window().hi[axis] - psi.window().lo[axis];
  std::vector<double> k(psi.size());
  std::size_t stride = ipow(n, d - 1 - axis);
  for (std::size_t j = 0; j < k.size(); ++j) {
    int i = static_cast<int>((j / stride) % n);
    int f = freq_of(i, n);
    k[j] = (n % 2 == 0 && i == n / 2) ? 0.0 : 2.0 * std::numbers::pi * f / len;
  }
  return k;
}

// (-i d/dx_axis) psi by spectral differentiation
std::vector<Cplx> momentum_apply(const WaveFunction& psi, int axis) {
  const int d = psi.dim(), n = psi.points_per_axis();
  std::vector<Cplx> ft = run_fft(psi.amplitudes(), d, n, FFTW_FORWARD);
  std::vector<double> k = axis_wavenumbers(psi, axis);
  for (std::size_t j = 0; j < ft.size(); ++j) ft[j] *= k[j];
  std::vector<Cplx> out = run_fft(ft, d, n, FFTW_BACKWARD);
  double inv = 1.0 / static_cast<double>(out.size());
  for (Cplx& v : out) v *= inv;
  return out;
}

double cell_volume(const WaveFunction& psi) {
  double cell = 1.0;
  for (int a = 0; a < psi.dim(); ++a)
    cell *= (psi.window().hi[a] - psi.window().lo[a]) / psi.points_per_axis();
  return cell;
}

WaveFunction propagate_raw(const WaveFunction& psi, double t) {
  const int d = psi.dim(), n = psi.points_per_axis();
  std::vector<Cplx> ft = run_fft(psi.amplitudes(), d, n, FFTW_FORWARD);
  std::vector<std::vector<double>> k(d);
  for (int a = 0; a < d; ++a) k[a] = axis_wavenumbers(psi, a);
  for (std::size_t j = 0; j < ft.size(); ++j) {
    double k2 = 0.0;
    for (int a = 0; a < d; ++a) k2 += k[a][j] * k[a][j];
    ft[j] *= std::exp(Cplx(0.0, -t * k2 / (2.0 * psi.mass())));
  }
  std::vector<Cplx> out = run_fft(ft, d, n, FFTW_BACKWARD);
  double inv = 1.0 / static_cast<double>(out.size());
  for (Cplx& v : out) v *= inv;
  return WaveFunction(psi.window(), n, psi.mass(), std::move(out));
}

}  // namespace

ExpectationReport position_expectation(const WaveFunction& psi) {
  const int d = psi.dim();
  ExpectationReport rep;
  rep.value = Vec::Zero(d);
  rep.boundary_warning = !psi.admissible();
  const double cell = cell_volume(psi);
  for (std::size_t j = 0; j < psi.size(); ++j) {
    double p = std::norm(psi.amplitudes()[j]) * cell;
    Vec x = psi.node(j);
    for (int a = 0; a < d; ++a) rep.value[a] += x[a] * p;
  }
  return rep;
}

ExpectationReport momentum_expectation(const WaveFunction& psi) {
  const int d = psi.dim();
  ExpectationReport rep;
  rep.value = Vec::Zero(d);
  rep.boundary_warning = !psi.admissible();
  const double cell = cell_volume(psi);
  for (int a = 0; a < d; ++a) {
    std::vector<Cplx> pp = momentum_apply(psi, a);
    Cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < psi.size(); ++j) acc += std::conj(psi.amplitudes()[j]) * pp[j];
    acc *= cell;
    if (std::abs(acc.imag()) > 1e-10)
      throw std::runtime_error("momentum_expectation: value failed the reality check");
    rep.value[a] = acc.real();
  }
  return rep;
}

Vec position_width(const WaveFunction& psi) {
  const int d = psi.dim();
  Vec mean = position_expectation(psi).value;
  Vec var = Vec::Zero(d);
  const double cell = cell_volume(psi);
  for (std::size_t j = 0; j < psi.size(); ++j) {
    double p = std::norm(psi.amplitudes()[j]) * cell;
    Vec x = psi.node(j);
    for (int a = 0; a < d; ++a) var[a] += (x[a] - mean[a]) * (x[a] - mean[a]) * p;
  }
  for (int a = 0; a < d; ++a) var[a] = std::sqrt(std::max(var[a], 0.0));
  return var;
}

WaveFunction free_propagate(const WaveFunction& psi, double t) {
  if (!psi.admissible())
    throw std::invalid_argument("free_propagate: input state violates the boundary margin");
  WaveFunction out = propagate_raw(psi, t);
  if (out.admissible()) return out;
  // the packet reached the boundary: bisect for the earliest safe time
  double lo = 0.0, hi = std::abs(t);
  for (int it = 0; it < 60 && hi - lo > 1e-12 * std::abs(t); ++it) {
    double mid = 0.5 * (lo + hi);
    if (propagate_raw(psi, std::copysign(mid, t)).admissible())
      lo = mid;
    else
      hi = mid;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "free_propagate: boundary margin violated; earliest safe t = %.6g",
                std::copysign(lo, t));
  throw std::runtime_error(buf);
}

VelocityReport velocity_limit_check(const WaveFunction& psi, const std::vector<double>& dts) {
  if (dts.empty()) throw std::invalid_argument("velocity_limit_check: empty dt list");
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (dts[i] <= 0.0) throw std::invalid_argument("velocity_limit_check: dts must be positive");
    if (i > 0 && dts[i] >= dts[i - 1])
      throw std::invalid_argument("velocity_limit_check: dts must be strictly decreasing");
  }
  const int d = psi.dim();
  VelocityReport rep;
  rep.momentum_velocity = momentum_expectation(psi).value / psi.mass();
  Vec x0 = position_expectation(psi).value;
  for (double dt : dts) {
    Vec xt = position_expectation(free_propagate(psi, dt)).value;
    VelocityRow row;
    row.dt = dt;
    row.velocity = Vec::Zero(d);
    for (int a = 0; a < d; ++a) {
      row.velocity[a] = (xt[a] - x0[a]) / dt;
      row.deviation = std::max(row.deviation, std::abs(row.velocity[a] - rep.momentum_velocity[a]));
    }
    rep.max_deviation = std::max(rep.max_deviation, row.deviation);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

CommutatorReport commutator_check(const WaveFunction& psi) {
  const int d = psi.dim(), n = psi.points_per_axis();
  CommutatorReport rep;

  // smoothness precondition: relative spectral mass in the top quarter band
  std::vector<Cplx> ft = run_fft(psi.amplitudes(), d, n, FFTW_FORWARD);
  double mx = 0.0;
  for (const Cplx& v : ft) mx = std::max(mx, std::abs(v));
  for (std::size_t j = 0; j < ft.size(); ++j) {
    std::size_t rest = j;
    bool top_band = false;
    for (int a = d - 1; a >= 0; --a) {
      int i = static_cast<int>(rest % n);
      rest /= n;
      if (std::abs(freq_of(i, n)) * 8 >= 3 * n) top_band = true;  // |f| >= 0.75 n/2
    }
    if (top_band) rep.spectral_tail = std::max(rep.spectral_tail, std::abs(ft[j]) / mx);
  }
  rep.precondition_ok = rep.spectral_tail < 1e-10;

  // same-axis canonical residual, worst over axes
  for (int a = 0; a < d; ++a) {
    std::vector<Cplx> pp = momentum_apply(psi, a);
    std::vector<Cplx> xpsi(psi.size());
    for (std::size_t j = 0; j < psi.size(); ++j) xpsi[j] = psi.node(j)[a] * psi.amplitudes()[j];
    std::vector<Cplx> ftx = run_fft(xpsi, d, n, FFTW_FORWARD);
    std::vector<double> k = axis_wavenumbers(psi, a);
    for (std::size_t j = 0; j < ftx.size(); ++j) ftx[j] *= k[j];
    std::vector<Cplx> pxpsi = run_fft(ftx, d, n, FFTW_BACKWARD);
    double inv = 1.0 / static_cast<double>(pxpsi.size());
    for (Cplx& v : pxpsi) v *= inv;

    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
      Cplx r = psi.node(j)[a] * pp[j] - pxpsi[j] - Cplx(0.0, 1.0) * psi.amplitudes()[j];
      num += std::norm(r);
      den += std::norm(psi.amplitudes()[j]);
    }
    rep.relative_residual = std::max(rep.relative_residual, std::sqrt(num / den));
  }

  // cross-axis position commutator: diagonal operators compose by multiplying
  // their symbols, and scalar multiplication commutes exactly
  rep.position_commutator = 0.0;
  if (d >= 2) {
    for (std::size_t j = 0; j < psi.size(); ++j) {
      Vec x = psi.node(j);
      double s12 = x[0] * x[1], s21 = x[1] * x[0];
      rep.position_commutator =
          std::max(rep.position_commutator, std::abs((s12 - s21) * psi.amplitudes()[j]));
    }
  }
  return rep;
}

EntropyReport entropy_sum(const WaveFunction& psi) {
  const int d = psi.dim(), n = psi.points_per_axis();
  const double cell = cell_volume(psi);
  EntropyReport rep;
  for (const Cplx& v : psi.amplitudes()) {
    double p = std::norm(v);
    if (p > 0.0) rep.position_entropy -= cell * p * std::log(p);
  }

  // continuum-normalized spectral density, renormalized to unit mass
  std::vector<Cplx> ft = run_fft(psi.amplitudes(), d, n, FFTW_FORWARD);
  double dk = 1.0, scale = cell / std::pow(2.0 * std::numbers::pi, d / 2.0);
  for (int a = 0; a < d; ++a) dk *= 2.0 * std::numbers::pi / (psi.window().hi[a] - psi.window().lo[a]);
  std::vector<double> q(ft.size());
  double mass = 0.0;
  for (std::size_t j = 0; j < ft.size(); ++j) {
    q[j] = std::norm(scale * ft[j]);
    mass += q[j] * dk;
  }
  for (double& v : q) v /= mass;
  for (double v : q)
    if (v > 0.0) rep.momentum_entropy -= dk * v * std::log(v);
  rep.sum = rep.position_entropy + rep.momentum_entropy;
  return rep;
}

// ---- two-particle construction ----------------------------------------------

namespace {

struct ProbeOutcome {
  const char* kind = "consistency";
  double violation = 0.0;
};

// Necessary condition for rho(x,y) to be the pair density of a 2-point
// determinantal process with one Hermitian kappa: the moduli
// |kappa_ij|^2 = rho1_i rho1_j - rho_ij must be nonnegative, every principal
// 3x3 minor of kappa must vanish (a 2-point process has no triples), which
// pins cos of each triangle phase, and the four triangle phases of a
// quadruple must close up for some choice of signs.
ProbeOutcome quadruple_probe(const std::array<double, 4>& d, const std::array<std::array<double, 4>, 4>& s) {
  double most_negative = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) most_negative = std::min(most_negative, s[i][j]);
  if (most_negative < -1e-9) return {"negativity", -most_negative};

  std::array<std::array<double, 4>, 4> m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = std::sqrt(std::max(s[i][j], 0.0));

  const int tri[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  double cosine[4];
  bool unconstrained[4];
  double range_excess = 0.0;
  for (int t = 0; t < 4; ++t) {
    int i = tri[t][0], j = tri[t][1], k = tri[t][2];
    double r = (d[i] * s[j][k] + d[j] * s[i][k] + d[k] * s[i][j] - d[i] * d[j] * d[k]) / 2.0;
    double mod = m[i][j] * m[j][k] * m[i][k];
    if (mod < 1e-14) {
      if (std::abs(r) >= 1e-12) return {"zero-modulus", std::abs(r)};
      unconstrained[t] = true;
      cosine[t] = 0.0;
      continue;
    }
    unconstrained[t] = false;
    double c = r / mod;
    range_excess = std::max(range_excess, std::abs(c) - 1.0);
    cosine[t] = std::clamp(c, -1.0, 1.0);
  }
  if (range_excess > 0.0) return {"cos-range", range_excess};
  for (int t = 0; t < 4; ++t)
    if (unconstrained[t]) return {"consistency", 0.0};

  // gauge-fix the star edges from point 0; triangles (0,i,j) pin cos of the
  // far-edge phases, and the (1,2,3) triangle must close for some signs
  double t12 = std::acos(cosine[0]), t13 = std::acos(cosine[1]), t23 = std::acos(cosine[2]);
  double best = std::numeric_limits<double>::infinity();
  for (int s1 : {1, -1})
    for (int s2 : {1, -1})
      for (int s3 : {1, -1})
        best = std::min(best, std::abs(std::cos(s1 * t12 + s3 * t23 - s2 * t13) - cosine[3]));
  return {"consistency", best};
}

}  // namespace

TwoParticleReport two_particle_joint(const Kernel& k, const Vec& zA, const Vec& zB,
                                     const Window& w) {
  if (k.dim() != w.dim()) throw std::invalid_argument("two_particle_joint: dimension mismatch");
  if (zA.size() != zB.size() || zA.size() != k.dim())
    throw std::invalid_argument("two_particle_joint: point dimension mismatch");
  if ((zA - zB).norm() == 0.0)
    throw std::invalid_argument("two_particle_joint: removal points must be distinct");

  const double ka = k(zA, zA).real();
  Kernel kt = thin(k, zA);  // rejects a degenerate diagonal at zA
  const double kb = kt(zB, zB).real();
  if (kb <= 1e-12)
    throw std::domain_error("two_particle_joint: degenerate diagonal at the second point");

  TwoParticleReport rep;
  rep.first_intensity = ka;
  rep.second_intensity = kb;
  rep.pair_intensity = ka * kb;
  rep.independent_product = ka * k(zB, zB).real();
  rep.product_gap = std::abs(rep.pair_intensity - rep.independent_product);

  auto psiA = [&](const Vec& x) { return k(x, zA) / std::sqrt(ka); };
  auto psiB = [&](const Vec& x) { return kt(x, zB) / std::sqrt(kb); };

  // 8 probe points along the window diagonal, mid-cell positions
  std::array<double, 8> rho1;
  std::array<double, 8> pa2, pb2;
  for (int i = 0; i < 8; ++i) {
    Vec x(w.dim());
    for (int a = 0; a < w.dim(); ++a) x[a] = w.lo[a] + (i + 0.5) / 8.0 * (w.hi[a] - w.lo[a]);
    pa2[i] = std::norm(psiA(x));
    pb2[i] = std::norm(psiB(x));
    rho1[i] = pa2[i] + pb2[i];
  }

  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      for (int l = j + 1; l < 8; ++l)
        for (int q = l + 1; q < 8; ++q) {
          const int ids[4] = {i, j, l, q};
          std::array<double, 4> diag;
          std::array<std::array<double, 4>, 4> s{};
          for (int u = 0; u < 4; ++u) {
            diag[u] = rho1[ids[u]];
            for (int v = 0; v < 4; ++v) {
              if (u == v) continue;
              double joint = pa2[ids[u]] * pb2[ids[v]] + pa2[ids[v]] * pb2[ids[u]];
              s[u][v] = rho1[ids[u]] * rho1[ids[v]] - joint;
            }
          }
          ProbeOutcome out = quadruple_probe(diag, s);
          if (out.violation > rep.probe_violation) {
            rep.probe_violation = out.violation;
            rep.probe_kind = out.kind;
          }
        }
  if (rep.probe_kind.empty()) rep.probe_kind = "consistency";
  rep.classification = rep.probe_violation > 1e-6 ? "entangled-like" : "factorized";
  return rep;
}

}  // namespace dpplab
