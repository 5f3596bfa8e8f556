#pragma once

#include <string>
#include <vector>

#include "dpplab/kernels.hpp"

namespace dpplab {

// A configuration with an explicit labeling: one distinct mark per point,
// forming a permutation of 1..n. Dropping the marks recovers the underlying
// configuration unchanged.
class MarkedConfiguration {
 public:
  MarkedConfiguration(PointConfiguration base, std::vector<int> marks);

  const PointConfiguration& ground() const { return base_; }
  const std::vector<int>& marks() const { return marks_; }

 private:
  PointConfiguration base_;
  std::vector<int> marks_;
};

// Marks assigned by increasing Euclidean distance from `origin`; distance
// ties are broken by lexicographic comparison of the coordinates, so the
// labeling does not depend on the input point order.
MarkedConfiguration mark_by_distance(const PointConfiguration& config, const Vec& origin);

struct ParticleRecord {
  double time = 0.0;
  int mark = 0;
  Vec position;
};

// The point carrying mark `label` at time t; absent labels are an error.
ParticleRecord select_particle(const MarkedConfiguration& marked, int label, double t);

// Complex amplitude field on a uniform periodic lattice over a window,
// x_j = lo + j h per axis, normalized so the Riemann sum of |psi|^2 is 1.
// Admissible states decay below 1e-8 within 5h of the window boundary,
// standing in for decay at infinity on the periodic grid.
class WaveFunction {
 public:
  WaveFunction(Window window, int points_per_axis, double mass, std::vector<Cplx> amplitudes);

  int dim() const { return window_.dim(); }
  const Window& window() const { return window_; }
  int points_per_axis() const { return n_; }
  double mass() const { return mass_; }
  std::size_t size() const { return amp_.size(); }
  const std::vector<Cplx>& amplitudes() const { return amp_; }
  Vec spacing() const;
  Vec node(std::size_t flat_index) const;

  double norm() const;          // discrete L2 norm, 1 after construction
  double boundary_max() const;  // largest |psi| within 5h of the boundary
  bool admissible() const { return boundary_max() < 1e-8; }

 private:
  Window window_;
  int n_;
  double mass_;
  std::vector<Cplx> amp_;
};

// Normalized Gaussian packet: position density sd `sigma` per axis, carrier
// phase exp(i k . x).
WaveFunction gaussian_packet(const Window& w, int points_per_axis, double mass, const Vec& center,
                             double sigma, const Vec& wavevector);

// psi_S(y) = raw(y) / sqrt(weight), then grid-normalized; the result is
// invariant under (raw, weight) -> (c raw, |c|^2 weight) up to global phase.
WaveFunction conditional_wavefunction(const Window& w, int points_per_axis, double mass,
                                      std::vector<Cplx> raw, double weight);

struct ExpectationReport {
  Vec value;
  bool boundary_warning = false;
};

ExpectationReport position_expectation(const WaveFunction& psi);
// spectral differentiation on the periodic grid, Nyquist mode dropped
ExpectationReport momentum_expectation(const WaveFunction& psi);
// per-axis position standard deviation
Vec position_width(const WaveFunction& psi);

// exp(-it P^2 / (2m)) applied mode by mode; unitary, so the norm is exact.
// If the evolved packet no longer clears the boundary margin the call fails
// and names the earliest safe time found by bisection.
WaveFunction free_propagate(const WaveFunction& psi, double t);

struct VelocityRow {
  double dt = 0.0;
  Vec velocity;        // finite-difference mean velocity over [0, dt]
  double deviation = 0.0;  // max-norm distance to the momentum prediction
};

struct VelocityReport {
  Vec momentum_velocity;  // <P>/m
  std::vector<VelocityRow> rows;
  double max_deviation = 0.0;
};

// finite-difference drift of <X> against <P>/m for a decreasing ladder of
// time steps; free evolution makes <X> exactly linear in t, so deviations
// reflect discretization only
VelocityReport velocity_limit_check(const WaveFunction& psi, const std::vector<double>& dts);

struct CommutatorReport {
  double relative_residual = 0.0;   // || (XP - PX) psi - i psi || / || psi ||
  double spectral_tail = 0.0;       // largest relative mode magnitude in the top band
  bool precondition_ok = false;     // spectral_tail < 1e-10
  double position_commutator = 0.0; // max | [X^i, X^j] psi |, exactly 0
};

// Canonical commutator residual with X pointwise and P spectral. The check
// is meaningful only for grid-resolved states: the report flags states whose
// Fourier coefficients have not decayed below 1e-10 in the top quarter of
// the frequency band, where the finite grid aliases the product X psi.
CommutatorReport commutator_check(const WaveFunction& psi);

struct EntropyReport {
  double position_entropy = 0.0;
  double momentum_entropy = 0.0;
  double sum = 0.0;
};

// plug-in Riemann differential entropies of |psi|^2 and of the normalized
// spectral density; Gaussians give 1 + ln(pi) per axis
EntropyReport entropy_sum(const WaveFunction& psi);

struct TwoParticleReport {
  double first_intensity = 0.0;        // K(zA, zA)
  double second_intensity = 0.0;       // thinned kernel at zB
  double pair_intensity = 0.0;         // two-point intensity at (zA, zB)
  double independent_product = 0.0;    // K(zA,zA) K(zB,zB)
  double product_gap = 0.0;            // |pair - independent product|
  double probe_violation = 0.0;
  std::string probe_kind;
  std::string classification;          // "factorized" or "entangled-like"
};

// Sequential two-particle construction: condition at zA, thin, condition at
// zB. The joint pair density rho(x,y) = |psiA(x) psiB(y)|^2 + (x <-> y) is
// tested against the necessary structure of a determinantal pair density
// (rho = rho1 rho1 - |kappa|^2 for one Hermitian kappa): on every 4-point
// subset of an 8-point probe grid the implied |kappa| moduli and triangle
// phases must be mutually consistent. Any quantified failure certifies the
// non-determinantal (entangled-like) case.
TwoParticleReport two_particle_joint(const Kernel& k, const Vec& zA, const Vec& zB,
                                     const Window& w);

}  // namespace dpplab
