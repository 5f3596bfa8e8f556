#pragma once

#include "dpplab/core.hpp"

namespace dpplab {

// Gauss-Legendre rule on [-1, 1], nodes ascending. Newton iteration on P_n
// seeded with the Chebyshev angle estimate; exact for polynomials of degree
// 2n - 1 and spectrally accurate for smooth integrands.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Tensor-product rule over a Window, n nodes per axis (size() = n^d).
struct Quadrature {
  Window window;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  int points_per_axis = 0;

  static Quadrature tensor(const Window& w, int points_per_axis);
  std::size_t size() const { return nodes.size(); }
};

}  // namespace dpplab
