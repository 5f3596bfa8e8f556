#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace dpplab {

using Vec = Eigen::VectorXd;

// Axis-aligned box, half-open on every axis: lo <= x < hi.
struct Window {
  Vec lo;
  Vec hi;

  Window(Vec lo_, Vec hi_);
  static Window interval(double a, double b);

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains(const Vec& x) const;
  Vec center() const { return 0.5 * (lo + hi); }
};

bool disjoint(const Window& a, const Window& b);

// Finite point set in R^d. Order of insertion is preserved.
class PointConfiguration {
 public:
  explicit PointConfiguration(int dim);
  PointConfiguration(int dim, std::vector<Vec> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const Vec& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Vec>& points() const { return points_; }
  void add(const Vec& p);

  // number of points inside w
  int count(const Window& w) const;
  // true when no two points coincide within tol (Euclidean)
  bool simple(double tol = 1e-12) const;

  // header "x1,...,xd", one row per point, %.17g so a round trip is bit exact
  void write_csv(std::ostream& os) const;
  static PointConfiguration read_csv(std::istream& is);

 private:
  int dim_;
  std::vector<Vec> points_;
};

// falling factorial x(x-1)...(x-r+1); by convention 1 for r = 0 and 0 for r > x
double factorial_power(double x, int r);

// Seeded random source. Equal seeds give bit-identical draw sequences; the
// uniform and normal transforms are written out here so the sequence does not
// depend on standard-library distribution internals. split(k) derives child
// streams from (seed, split counter, child index) only, so a child's output
// is unaffected by how much the parent or its siblings have already consumed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t bits();              // raw 64-bit word
  double uniform();                  // [0, 1)
  double uniform(double a, double b);
  double normal();                   // N(0, 1), Box-Muller
  int uniform_int(int n);            // {0, ..., n-1}

  std::vector<RandomStream> split(int k);
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t split_count_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace dpplab
