#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace stosched {

/// Philox4x32-10 counter-based generator.
///
/// Output is a pure function of (key, counter), so any (seed, job) cell can be
/// drawn independently of every other one and in any order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::string_view kName = "philox4x32-10";
  static constexpr int kVersion = 1;

  explicit constexpr Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}
  explicit constexpr Philox4x32(Key key) : key_(key) {}

  [[nodiscard]] constexpr Counter operator()(Counter ctr) const {
    Key key = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  /// 64 random bits addressed by three 32-bit coordinates.
  [[nodiscard]] constexpr std::uint64_t bits(std::uint32_t a, std::uint32_t b,
                                             std::uint32_t stream = 0) const {
    const Counter out = (*this)({a, b, stream, 0});
    return (std::uint64_t{out[0]} << 32) | out[1];
  }

  /// Uniform double strictly inside (0, 1), 53 bits of resolution.
  [[nodiscard]] constexpr double uniform(std::uint32_t a, std::uint32_t b,
                                         std::uint32_t stream = 0) const {
    return (static_cast<double>(bits(a, b, stream) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  Key key_;
};

}  // namespace stosched
