#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gaussbv {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Stream of standard normals for one sample path. The stream is a pure
// function of (seed, tag, outer, inner), so a path draws the same numbers
// no matter which thread simulates it.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t tag, std::uint64_t outer,
               std::uint32_t inner = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        tag_(tag),
        outer_(outer),
        inner_(inner) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto out = Philox4x32::block(
        {draw_++, inner_ ^ static_cast<std::uint32_t>(outer_ >> 32) * 0x9E3779B1u,
         static_cast<std::uint32_t>(outer_), tag_},
        key_);
    const double u1 = to_unit(out[0], out[1]);
    const double u2 = to_unit(out[2], out[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double uniform() {
    const auto out = Philox4x32::block(
        {draw_++, inner_ ^ static_cast<std::uint32_t>(outer_ >> 32) * 0x9E3779B1u,
         static_cast<std::uint32_t>(outer_), tag_ ^ 0x80000000u},
        key_);
    return to_unit(out[0], out[1]);
  }

  // Uniform on the open interval (0, 1) with 53 random bits.
  static double to_unit(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t k = ((std::uint64_t{a} << 32) | b) >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t tag_;
  std::uint64_t outer_;
  std::uint32_t inner_;
  std::uint32_t draw_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace gaussbv
