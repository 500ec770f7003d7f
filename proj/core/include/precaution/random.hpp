#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace precaution {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for stream `index` of a generator family rooted at `seed`. Trials
/// seeded this way give identical results whether run serially or in parallel.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Seed derived from a textual label (analysis name, parameter name, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Thin wrapper around std::mt19937_64 whose real-valued draws are computed
/// from raw bits, so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01();
  /// Uniform on (0, 1).
  double uniform_open01();
  double uniform(double lo, double hi);
  std::size_t index(std::size_t n);
  double exponential();

  /// Dirichlet(1,...,1): uniform on the probability simplex.
  std::vector<double> simplex_uniform(std::size_t m);

 private:
  std::mt19937_64 engine_;
};

}  // namespace precaution
