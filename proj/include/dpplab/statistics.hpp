#pragma once

#include <iosfwd>

#include "dpplab/kernels.hpp"

namespace dpplab {

// n-point correlation density det[K(x_i, x_j)]
double correlation(const Kernel& k, const std::vector<Vec>& points);

// local interaction operator (I - K)^-1 K as an explicit spectral kernel with
// eigenvalues mu / (1 - mu); rejects spectra reaching 1 within 1e-9
Kernel interaction_kernel(const SpectralDecomposition& sd);

// probability that the window holds no points, from the eigenvalue product
double void_probability(const SpectralDecomposition& sd);

// n-point Janossy density: det(I - K) times the interaction determinant.
// n = 0 returns the void probability. Roundoff-negative values clamp to zero.
double janossy_density(const SpectralDecomposition& sd, const std::vector<Vec>& points);

// law of the total point count: convolution of independent Bernoulli(mu_i)
struct CountDistribution {
  std::vector<double> p;  // p[n] = P(N = n)
  double mean() const;
  double variance() const;
};
CountDistribution count_distribution(const SpectralDecomposition& sd);

// Integrals of correlation and Janossy densities over products of disjoint
// boxes inside the window. Every box integral is evaluated on a dedicated
// partition quadrature: the box-edge arrangement splits the window into cells,
// each cell carries its own Gauss-Legendre rule, so restricted sums are true
// sub-rules. The m-fold integrals reduce to sums of submatrix determinants
// over node subsets with prescribed per-box counts; a tuple with a repeated
// node has a vanishing determinant, and the orderings within each box cancel
// the factorials of the series definitions.

// E[ prod_i N(A_i)^[n_i] ]: integral of the |n|-point correlation over the
// box power product
double factorial_moment(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                        const std::vector<int>& orders, int cell_resolution = 10);

// J_|n|(A_1^(n_1) x ... x A_r^(n_r)): Janossy integral over the box powers
double janossy_box(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                   const std::vector<int>& counts, int cell_resolution = 10);

// P(N(A_1) = n_1, ..., N(A_r) = n_r): Janossy series over the complement,
// terms below 1e-10 stop the sum; exceeding max_terms raises an error
double fidi_probability(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                        const std::vector<int>& counts, int max_terms = 25,
                        int cell_resolution = 10);

// factorial moment recovered from the Janossy series over whole-window slots
double factorial_moment_from_janossy(const SpectralDecomposition& sd,
                                     const std::vector<Window>& boxes,
                                     const std::vector<int>& orders, int max_terms = 25,
                                     int cell_resolution = 10);

// Janossy box integral recovered from the alternating moment series
double janossy_from_moments(const SpectralDecomposition& sd, const std::vector<Window>& boxes,
                            const std::vector<int>& counts, int max_terms = 25,
                            int cell_resolution = 10);

// Binned correlation estimates from samples (1-D windows). order 1 bins the
// intensity, order 2 pools ordered pair counts by bin-center separation.
// stderr is the CLT standard error over samples (pairwise summation).
struct CorrelationRow {
  double box_lo = 0.0;
  double box_hi = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double analytic = 0.0;
};
struct CorrelationTable {
  int order = 1;
  std::vector<CorrelationRow> rows;
  void write_csv(std::ostream& os) const;  // header box_lo,box_hi,estimate,stderr,analytic
};
CorrelationTable empirical_correlation(const std::vector<PointConfiguration>& samples,
                                       const SpectralDecomposition& sd, int bins, int order);

}  // namespace dpplab
