#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace ddt {

// Deterministic random source shared by the whole library.
//
// Every draw is defined directly on the raw mt19937_64 output stream, which
// the C++ standard pins bit-for-bit. The std:: distribution adaptors are
// implementation-defined and are deliberately not used, so a given seed
// reproduces the same corpus / codebook / sampler trajectory on any
// conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53 random bits.
  double uniform_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform index in [0, n). Maps one uniform double; the floor bias is
  // below 2^-40 for any n this library uses.
  int uniform_index(int n);

  // Standard normal via Box-Muller. Consumes exactly two uniforms per call.
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze, boosted for shape < 1.
  double gamma(double shape);

  // Dirichlet with symmetric concentration over `size` categories.
  Eigen::VectorXd dirichlet(double concentration, int size);

  // Index drawn with probability weights[i] / sum(weights), by inverse-CDF
  // scan in index order. Weights must be non-negative with a positive sum.
  int categorical(const Eigen::VectorXd& weights);

 private:
  std::mt19937_64 engine_;
};

// Stable combination of a base seed with stream ids (fold, view, ...), built
// from three splitmix64 steps. Gives sub-computations independent streams
// while keeping the whole run a function of one user seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace ddt
