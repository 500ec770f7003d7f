#include "precaution/random.hpp"

#include <cmath>

namespace precaution {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  return derive_seed(seed, fnv1a64(label));
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open01() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::size_t Rng::index(std::size_t n) {
  return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
}

double Rng::exponential() { return -std::log(uniform_open01()); }

std::vector<double> Rng::simplex_uniform(std::size_t m) {
  std::vector<double> p(m);
  double total = 0.0;
  for (auto& v : p) {
    v = exponential();
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace precaution
