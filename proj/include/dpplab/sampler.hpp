#pragma once

#include <vector>

#include "dpplab/kernels.hpp"

namespace dpplab {

// Exact sampler for the point process described by a spectral decomposition.
//
// Stage 1 flips an independent Bernoulli coin with success probability mu_k
// for each kept mode; the selected modes span a projection subspace. Stage 2
// draws the points of the induced projection process one at a time: the next
// point has density (1/m) sum_j |<c_j, phi(x)>|^2 where the rows c_j form an
// orthonormal frame of the not-yet-pinned part of the subspace, and the draw
// is by rejection against a uniform proposal with envelope
// 1.1 * (largest frame diagonal over the quadrature nodes). After each
// acceptance the frame is rebuilt by Gram-Schmidt with the accepted direction
// first, and the single numerically null row (residual below 1e-8) is
// dropped. More than 1e6 consecutive rejections raises an error.
PointConfiguration sample(const SpectralDecomposition& sd, RandomStream& rng);

// Independent batch; sample i consumes only the i-th child stream of `rng`,
// so results are reproducible and independent of the worker count. Workers
// default to the hardware thread count, overridable with DPPLAB_THREADS.
std::vector<PointConfiguration> sample_batch(const SpectralDecomposition& sd, int count,
                                             RandomStream& rng);

// Spectral data of the kernel conditioned on the presence of a point at z
// (same window and grid resolution as `sd`). Conditioning a projection
// process yields a projection process of rank one less; the clamping rule in
// `decompose` preserves that exactly.
SpectralDecomposition thinned_decomposition(const SpectralDecomposition& sd, const Vec& z);

PointConfiguration sample_thinned(const SpectralDecomposition& sd, const Vec& z,
                                  RandomStream& rng);

// Chi-square comparison of sampled cardinalities against the model's count
// law (a sum of independent Bernoulli variables, one per eigenvalue).
// Adjacent histogram cells are merged until every expected count is at least
// 5; the report is flagged when the tail probability drops below 1e-3.
struct CountLawReport {
  std::vector<double> observed;  // merged histogram cells
  std::vector<double> expected;
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool flagged = false;
  double mean_observed = 0.0;
  double mean_model = 0.0;
  double variance_model = 0.0;
};

CountLawReport verify_count_law(const std::vector<PointConfiguration>& samples,
                                const SpectralDecomposition& sd);

}  // namespace dpplab
