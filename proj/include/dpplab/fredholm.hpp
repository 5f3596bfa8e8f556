#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dpplab/kernels.hpp"

namespace dpplab {

// integral of the kernel diagonal over the window (trace of the restriction)
double trace(const Kernel& k, const Window& w, int points_per_axis = 64);

struct DeterminantReport {
  double z = 0.0;
  // route name -> value, in evaluation order (spectral, series, plemelj)
  std::vector<std::pair<std::string, double>> values;
  double max_pairwise_gap = 0.0;
  bool routes_consistent = true;  // max_pairwise_gap <= 1e-5
  int series_terms = 0;           // highest series order evaluated

  double value(const std::string& route) const;
};

// det(I + z K) restricted to the decomposition's window, by independent routes:
//
//   spectral  product of (1 + z mu_i) over the kept eigenvalues
//   series    1 + sum_m z^m S_m with S_m the sum over m-point subsets of the
//             quadrature nodes of det of the weighted kernel submatrix; the
//             subsets are enumerated and factored by partial-pivot LU when the
//             node count allows, otherwise the same S_m come from power-sum
//             traces of the node matrix via Newton's identities. Terms stop
//             below 1e-12 in magnitude, hard cap at order 20.
//   plemelj   exp of sum_m (-1)^(m-1) z^m Tr(B^m) / m, valid for |z| tr < 1
//
// The series and plemelj routes never touch the eigensolver, so agreement with
// the spectral route is a real cross-check of quadrature plus decomposition.
// method is one of "spectral", "series", "plemelj", "all"; "all" runs the two
// unconditional routes and adds plemelj when its convergence condition holds.
DeterminantReport fredholm_det(const SpectralDecomposition& sd, double z,
                               const std::string& method = "all");

}  // namespace dpplab
