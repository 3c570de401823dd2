#include "mmd/rng.hpp"

#include <cmath>

#include "mmd/normal.hpp"

namespace mmd {
namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi) {
  const unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(product >> 64);
  return static_cast<std::uint64_t>(product);
}

inline std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Philox4x64::Block Philox4x64::operator()(std::uint64_t counter_lo,
                                         std::uint64_t counter_hi) const {
  Block ctr{counter_lo, counter_hi, 0, 0};
  std::uint64_t k0 = key0_;
  std::uint64_t k1 = key1_;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0 = 0;
    std::uint64_t hi1 = 0;
    const std::uint64_t lo0 = mulhilo(kPhiloxM0, ctr[0], hi0);
    const std::uint64_t lo1 = mulhilo(kPhiloxM1, ctr[2], hi1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

std::uint64_t RngStream::next_u64() {
  if (index_ == 4) {
    block_ = engine_(counter_++);
    index_ = 0;
  }
  return block_[index_++];
}

double RngStream::next_double() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_gaussian() { return normal_quantile(next_double()); }

double RngStream::next_exponential() { return -std::log(next_double()); }

std::uint64_t derive_stream(std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = 0x8AC7230489E7FFD9ULL;
  for (const std::uint64_t label : labels) {
    h = splitmix_finalize(h + kWeyl0 + label);
  }
  return h;
}

}  // namespace mmd
