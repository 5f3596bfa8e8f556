#include "dpplab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpplab {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // three-term recurrence for P_n(x) and P_{n-1}(x)
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

Quadrature Quadrature::tensor(const Window& w, int points_per_axis) {
  if (points_per_axis < 1) throw std::invalid_argument("Quadrature: points_per_axis >= 1 required");
  const int d = w.dim();
  std::vector<double> gx, gw;
  gauss_legendre(points_per_axis, gx, gw);

  // per-axis affine map of the reference rule
  std::vector<std::vector<double>> ax(d), aw(d);
  for (int a = 0; a < d; ++a) {
    double c = 0.5 * (w.lo[a] + w.hi[a]), s = 0.5 * (w.hi[a] - w.lo[a]);
    ax[a].resize(points_per_axis);
    aw[a].resize(points_per_axis);
    for (int i = 0; i < points_per_axis; ++i) {
      ax[a][i] = c + s * gx[i];
      aw[a][i] = s * gw[i];
    }
  }

  Quadrature q{w, {}, {}, points_per_axis};
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= points_per_axis;
  q.nodes.reserve(total);
  q.weights.reserve(total);
  std::vector<int> idx(d, 0);
  for (std::size_t t = 0; t < total; ++t) {
    Vec p(d);
    double wt = 1.0;
    for (int a = 0; a < d; ++a) {
      p[a] = ax[a][idx[a]];
      wt *= aw[a][idx[a]];
    }
    q.nodes.push_back(std::move(p));
    q.weights.push_back(wt);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < points_per_axis) break;
      idx[a] = 0;
    }
  }
  return q;
}

}  // namespace dpplab
