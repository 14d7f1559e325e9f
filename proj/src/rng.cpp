#include "ddt/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ddt {

int Rng::uniform_index(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_index: n must be positive");
  int i = static_cast<int>(uniform_double() * n);
  return i < n ? i : n - 1;
}

double Rng::normal() {
  // Box-Muller, cosine branch only so each call costs a fixed two draws.
  double u1 = 1.0 - uniform_double();  // (0, 1], keeps log finite
  double u2 = uniform_double();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    double u = 1.0 - uniform_double();  // (0, 1]
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Eigen::VectorXd Rng::dirichlet(double concentration, int size) {
  if (size <= 0) throw std::invalid_argument("dirichlet: size must be positive");
  Eigen::VectorXd g(size);
  for (int i = 0; i < size; ++i) g[i] = gamma(concentration);
  double total = g.sum();
  if (total <= 0.0) {
    // All gammas underflowed; fall back to uniform.
    return Eigen::VectorXd::Constant(size, 1.0 / size);
  }
  return g / total;
}

int Rng::categorical(const Eigen::VectorXd& weights) {
  const int n = static_cast<int>(weights.size());
  if (n == 0) throw std::invalid_argument("categorical: empty weights");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (weights[i] < 0.0)
      throw std::invalid_argument("categorical: negative weight");
    total += weights[i];
  }
  if (!(total > 0.0))
    throw std::invalid_argument("categorical: weights sum to zero");
  double u = uniform_double() * total;
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  return n - 1;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto split = [](std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t state = base;
  std::uint64_t h = split(state);
  state ^= a;
  h ^= split(state);
  state ^= b;
  h ^= split(state);
  return h;
}

}  // namespace ddt
