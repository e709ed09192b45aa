#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace asch {

// Base class for all error conditions raised by the toolkit.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace bits {

// Extract bits [hi:lo] of a 32-bit word.
constexpr uint32_t field(uint32_t w, unsigned hi, unsigned lo) {
  return (w >> lo) & ((uint32_t{1} << (hi - lo + 1)) - 1);
}

// Sign-extend the low `width` bits of v.
constexpr int64_t sext(uint64_t v, unsigned width) {
  const uint64_t sign = uint64_t{1} << (width - 1);
  const uint64_t mask = (width == 64) ? ~uint64_t{0} : (uint64_t{1} << width) - 1;
  v &= mask;
  return static_cast<int64_t>((v ^ sign) - sign);
}

// True if v fits in a signed `width`-bit field.
constexpr bool fits_signed(int64_t v, unsigned width) {
  const int64_t lo = -(int64_t{1} << (width - 1));
  const int64_t hi = (int64_t{1} << (width - 1)) - 1;
  return v >= lo && v <= hi;
}

constexpr bool fits_unsigned(uint64_t v, unsigned width) {
  return width >= 64 || v < (uint64_t{1} << width);
}

}  // namespace bits

std::string hex(uint64_t v);
std::string hex32(uint32_t v);
uint64_t parse_u64(const std::string& s);  // decimal or 0x-prefixed hex

}  // namespace asch
