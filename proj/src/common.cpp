#include "asch/common.hpp"

#include <cstdio>

namespace asch {

std::string hex(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string hex32(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

uint64_t parse_u64(const std::string& s) {
  if (s.empty()) throw Error("empty number");
  size_t pos = 0;
  uint64_t v = std::stoull(s, &pos, 0);
  if (pos != s.size()) throw Error("trailing characters in number: " + s);
  return v;
}

}  // namespace asch
