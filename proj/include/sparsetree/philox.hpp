#pragma once

#include <array>
#include <cstdint>

namespace sparsetree {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A pure function of
/// (counter, key): any draw can be recomputed in isolation, independent of the order in
/// which other draws were made.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(Key key) : key_(key) {}
  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const;

 private:
  Key key_;
};

/// Maps the top 52 bits of a 64-bit word to the open interval (0, 1); both ends are exact.
inline double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace sparsetree
