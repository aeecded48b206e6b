#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace barcodelab {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based engine: the k-th word of substream `stream` under master
/// seed `seed` is mix64(key + k * golden), key = mix64(seed + mix64(stream + 1)).
///
/// Every realization index of a Monte Carlo run gets its own substream, so a
/// draw depends only on (seed, realization index) and never on how work was
/// split across threads. Satisfies UniformRandomBitGenerator.
class SubstreamEngine {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

  SubstreamEngine(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(seed + mix64(stream + 1))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * golden);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Standard normal variates from a SubstreamEngine via the Marsaglia polar
/// method. Spelled out (rather than std::normal_distribution) so the stream
/// is identical across standard library implementations.
class NormalSource {
 public:
  explicit NormalSource(SubstreamEngine engine) noexcept : engine_(engine) {}

  double operator()() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

 private:
  // 53 random mantissa bits in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  SubstreamEngine engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed of an independent sub-run (e.g. one grid point of a sweep).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed ^ mix64(tag + 0x632BE59BD9B4E019ULL));
}

}  // namespace barcodelab
