#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace flowsearch {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

/// Uniform in [0,1) derived from a hash value; used where results must be a
/// pure function of ids rather than of draw order.
inline double hash_unit(std::uint64_t h) {
  return static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
}

/// Deterministic random stream. Uniform doubles are produced from raw 64-bit
/// draws (not std distributions) so sequences are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Draws an index from a probability vector (entries >= 0, summing to ~1).
  /// Zero-probability entries are never returned.
  std::size_t categorical(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("categorical: empty distribution");
    double u = uniform();
    double cum = 0.0;
    std::size_t last_positive = probs.size();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last_positive = i;
      cum += probs[i];
      if (u < cum) return i;
    }
    if (last_positive == probs.size())
      throw std::invalid_argument("categorical: all probabilities are zero");
    return last_positive;  // numerical slack at the top end
  }

  /// Independent child stream; derivation depends only on this stream's seed
  /// and the label, never on draw position.
  Rng derive(std::string_view label) const { return Rng(hash_combine(seed_, fnv1a64(label))); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace flowsearch
