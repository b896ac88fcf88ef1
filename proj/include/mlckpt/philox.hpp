#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace mlckpt {

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11). Streams are
/// independent by key construction: every (key0, key1) pair indexes its own
/// 2^256-long sequence, so replicas never share state no matter how seeds
/// relate arithmetically.
class Philox4x64 {
 public:
  Philox4x64(std::uint64_t key0, std::uint64_t key1) : key_{key0, key1} {}

  std::uint64_t next_u64() {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  /// Uniform draw in (0, 1]; never returns 0 so -log stays finite.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Exponential inter-arrival; +inf for rate 0.
  double next_exponential(double rate) {
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(next_unit()) / rate;
  }

  /// Index into a discrete distribution given its cumulative weights.
  std::size_t next_index(const std::vector<double>& cumulative) {
    const double u = next_unit() * cumulative.back();
    for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) {
      if (u <= cumulative[i]) return i;
    }
    return cumulative.size() - 1;
  }

 private:
  static std::uint64_t mul_hi(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) >> 64);
  }

  void refill() {
    std::array<std::uint64_t, 4> x = counter_;
    std::uint64_t k0 = key_[0];
    std::uint64_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t hi0 = mul_hi(kMul0, x[0]);
      const std::uint64_t lo0 = kMul0 * x[0];
      const std::uint64_t hi1 = mul_hi(kMul1, x[2]);
      const std::uint64_t lo1 = kMul1 * x[2];
      x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    buffer_ = x;
    index_ = 0;
    if (++counter_[0] == 0 && ++counter_[1] == 0 && ++counter_[2] == 0) ++counter_[3];
  }

  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{};
  std::array<std::uint64_t, 4> buffer_{};
  int index_ = 4;
};

/// splitmix64 finalizer; used to spread structured ids into Philox keys.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace mlckpt
