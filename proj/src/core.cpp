#include "dpplab/core.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dpplab {

Window::Window(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() == 0 || lo.size() != hi.size())
    throw std::invalid_argument("Window: lo and hi must be nonempty and of equal dimension");
  for (int i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i]))
      throw std::invalid_argument("Window: lo < hi required on every axis");
}

Window Window::interval(double a, double b) {
  Vec lo(1), hi(1);
  lo[0] = a;
  hi[0] = b;
  return Window(std::move(lo), std::move(hi));
}

double Window::volume() const {
  double v = 1.0;
  for (int i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

bool Window::contains(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (int i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] || x[i] >= hi[i]) return false;
  return true;
}

bool disjoint(const Window& a, const Window& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("disjoint: dimension mismatch");
  for (int i = 0; i < a.dim(); ++i)
    if (a.hi[i] <= b.lo[i] || b.hi[i] <= a.lo[i]) return true;
  return false;
}

PointConfiguration::PointConfiguration(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("PointConfiguration: dim >= 1 required");
}

PointConfiguration::PointConfiguration(int dim, std::vector<Vec> points) : PointConfiguration(dim) {
  for (auto& p : points) add(p);
}

void PointConfiguration::add(const Vec& p) {
  if (p.size() != dim_) throw std::invalid_argument("PointConfiguration: point dimension mismatch");
  points_.push_back(p);
}

int PointConfiguration::count(const Window& w) const {
  int n = 0;
  for (const auto& p : points_)
    if (w.contains(p)) ++n;
  return n;
}

bool PointConfiguration::simple(double tol) const {
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      if ((points_[i] - points_[j]).norm() <= tol) return false;
  return true;
}

void PointConfiguration::write_csv(std::ostream& os) const {
  for (int i = 0; i < dim_; ++i) os << (i ? ",x" : "x") << i + 1;
  os << '\n';
  char buf[32];
  for (const auto& p : points_) {
    for (int i = 0; i < dim_; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
}

PointConfiguration PointConfiguration::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_csv: missing header");
  int dim = 1;
  for (char c : line)
    if (c == ',') ++dim;
  PointConfiguration cfg(dim);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Vec p(dim);
    std::istringstream row(line);
    std::string cell;
    for (int i = 0; i < dim; ++i) {
      if (!std::getline(row, cell, ',')) throw std::invalid_argument("read_csv: short row");
      p[i] = std::stod(cell);
    }
    cfg.add(p);
  }
  return cfg;
}

double factorial_power(double x, int r) {
  if (r < 0) throw std::invalid_argument("factorial_power: r >= 0 required");
  if (r == 0) return 1.0;
  if (x < r) return 0.0;
  double v = 1.0;
  for (int i = 0; i < r; ++i) v *= x - i;
  return v;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

std::uint64_t RandomStream::bits() { return engine_(); }

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double RandomStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log1p(-u1));  // log(1 - u1), safe since u1 < 1
  double t = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(t);
  has_spare_normal_ = true;
  return r * std::cos(t);
}

int RandomStream::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int: n >= 1 required");
  return static_cast<int>(uniform() * n);
}

std::vector<RandomStream> RandomStream::split(int k) {
  if (k < 1) throw std::invalid_argument("split: k >= 1 required");
  ++split_count_;
  std::vector<RandomStream> kids;
  kids.reserve(k);
  for (int i = 0; i < k; ++i)
    kids.emplace_back(splitmix64(splitmix64(seed_ + 0x632be59bd9b4e019ULL * split_count_) +
                                 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(i + 1)));
  return kids;
}

}  // namespace dpplab
