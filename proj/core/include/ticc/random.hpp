#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ticc {

/// Identifier written into run manifests. Bump the suffix whenever the
/// stream of values produced for a given seed changes.
inline constexpr std::string_view kPrngName =
    "mt19937_64+splitmix64-streams+polar-normal/v1";

/// SplitMix64 finalizer, used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for sub-stream `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Deterministic random source. Distributions are implemented here rather
/// than through <random> adaptors so that the value stream for a seed is
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer on [0, bound).
  std::uint64_t uniform_index(std::uint64_t bound);

  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ticc
