#pragma once

#include <cstdint>
#include <limits>

namespace imdp {

// Purposes that get their own substream of the master seed.
enum class StreamPurpose : std::uint64_t {
  kInterior = 1,
  kBoundary = 2,
  kControls = 3,
  kExtension = 4,
  kRollouts = 5,
};

/// Counter-based generator: the n-th draw is a SplitMix64 finalizer applied
/// to key + n * golden-gamma. Substreams derive a fresh key, so any draw is
/// reproducible from (seed, stream path, counter) alone.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform in [0, 1) with 53 bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (bit-reproducible across platforms).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  RandomStream substream(std::uint64_t id) const;
  RandomStream substream(StreamPurpose purpose) const {
    return substream(static_cast<std::uint64_t>(purpose));
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace imdp
