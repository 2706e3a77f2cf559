#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mwsched {

/// What a stream is used for. Part of the stream label, so channel, arrival
/// and scheduler randomness never share a sequence.
enum class StreamPurpose : std::uint64_t {
  channel = 1,
  arrival = 2,
  tie_break = 3,
};

struct StreamLabel {
  StreamPurpose purpose;
  std::uint64_t index = 0;  // link index, or 0 for per-run streams

  friend bool operator==(const StreamLabel&, const StreamLabel&) = default;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Counter-based random stream keyed by (master seed, label).
///
/// The value at counter c is a pure function of (seed, label, c), so a
/// simulation can draw "the uniform for link i at slot t" without caring
/// in which order links or slots are visited. next_*() is a convenience
/// cursor over the same sequence.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamLabel label) noexcept;

  std::uint64_t bits_at(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * kGamma);
  }
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_at(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits_at(counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_bits() noexcept { return bits_at(counter_++); }
  double next_uniform() noexcept { return uniform_at(counter_++); }

  std::uint64_t seed() const noexcept { return seed_; }
  StreamLabel label() const noexcept { return label_; }
  std::uint64_t counter() const noexcept { return counter_; }
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t seed_;
  StreamLabel label_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

__extension__ using uint128 = unsigned __int128;

/// Maps 64 random bits to an integer uniform in [0, n). n must be > 0.
inline std::uint64_t bounded(std::uint64_t bits, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<uint128>(bits) * n) >> 64);
}

/// One stream per link for the given purpose.
std::vector<RngStream> link_streams(std::uint64_t master_seed,
                                    StreamPurpose purpose, std::size_t links);

}  // namespace mwsched
