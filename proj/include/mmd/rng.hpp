#ifndef MMD_RNG_HPP
#define MMD_RNG_HPP

#include <array>
#include <cstdint>
#include <initializer_list>

namespace mmd {

/// Counter-based pseudo-random generator (Philox4x64, 10 rounds).
///
/// Each (key0, key1) pair selects an independent stream; outputs are a pure
/// function of (key, counter), so a stream can be replayed from any point and
/// parallel consumers with distinct keys can never interleave state.
class Philox4x64 {
 public:
  using Block = std::array<std::uint64_t, 4>;

  Philox4x64(std::uint64_t key0, std::uint64_t key1) : key0_(key0), key1_(key1) {}

  /// 256-bit output block for a 128-bit counter value.
  Block operator()(std::uint64_t counter_lo, std::uint64_t counter_hi = 0) const;

 private:
  std::uint64_t key0_;
  std::uint64_t key1_;
};

/// Sequential view over one Philox stream with buffered block output.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : engine_(seed, stream), block_{}, counter_(0), index_(4) {}

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0,1): 53-bit mantissa shifted by half an ulp.
  double next_double();

  /// Standard normal via the inverse CDF.
  double next_gaussian();

  /// Exponential(1).
  double next_exponential();

 private:
  Philox4x64 engine_;
  Philox4x64::Block block_;
  std::uint64_t counter_;
  int index_;
};

/// Deterministic sub-stream id from a list of labels (SplitMix64 finalizer chain).
/// Distinct label tuples map to distinct streams for all practical purposes.
std::uint64_t derive_stream(std::initializer_list<std::uint64_t> labels);

}  // namespace mmd

#endif
