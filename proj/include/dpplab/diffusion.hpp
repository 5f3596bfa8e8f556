#pragma once

#include <vector>

#include "dpplab/core.hpp"

namespace dpplab {

// Interacting particle system on the line with logarithmic repulsion and
// harmonic confinement:
//
//   dx_i = [ -theta x_i + sum_{j != i} 1 / (x_i - x_j) ] dt + dW_i
//
// The stationary law has density proportional to
// prod_{i<j} (x_i - x_j)^2 * exp(-theta sum_i x_i^2), the eigenvalue law of
// a Gaussian Hermitian ensemble; nearest-neighbour spacings then follow the
// Wigner surmise closely.
struct DiffusionState {
  double time = 0.0;
  std::vector<double> x;  // strictly increasing
};

// Eigenvalues of a random Hermitian matrix drawn from the density
// exp(-tr H^2): diagonal entries N(0, 1/2), off-diagonal real and imaginary
// parts N(0, 1/4). This is the theta = 1 stationary law.
DiffusionState dyson_initial_gue(int n, RandomStream& rng);

// One Euler-Maruyama update. If the proposed move breaks the strict ordering
// of the particles, the step is retried as two halves with fresh noise,
// recursively, at most 20 levels deep; exhausting the budget raises
// "collision unresolved". Returns the deepest halving level used.
int dyson_step(DiffusionState& state, double dt, double theta, RandomStream& rng);

struct DiffusionRun {
  std::vector<DiffusionState> records;
  int max_halving_depth = 0;
  int steps = 0;
  double dt = 0.0;
  double theta = 0.0;
};

// Advance `steps` updates from `initial`, recording the state after step t
// whenever t >= burn_in and t is a multiple of record_stride (t counted from
// zero).
DiffusionRun dyson_run(const DiffusionState& initial, int steps, double dt, double theta,
                       int burn_in, int record_stride, RandomStream& rng);

double wigner_surmise_cdf(double s);

// Stationarity diagnostics for a recorded run:
//  - pooled interior nearest-neighbour spacings, each gap index normalized by
//    its ensemble mean, compared against the Wigner surmise by a KS statistic
//  - mean sum of squares against the stationary prediction n^2 / (2 theta)
//  - observed support against the semicircle edge sqrt(2 n / theta)
// The run is declared non-stationary when theta <= 0 or when the second half
// of the record drifts to more than twice (or under half) the quadratic size
// of the first half.
struct StationarityReport {
  int particles = 0;
  int records = 0;
  double ks_spacing = 0.0;
  double mean_square_observed = 0.0;
  double mean_square_model = 0.0;
  double edge_model = 0.0;
  double min_position = 0.0;
  double max_position = 0.0;
  double drift_ratio = 1.0;  // second-half to first-half mean sum of squares
  bool stationary = false;
};

StationarityReport stationarity_report(const DiffusionRun& run);

}  // namespace dpplab
