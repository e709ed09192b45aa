#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "asch/image.hpp"
#include "asch/isa.hpp"

namespace asch::scanner {

inline constexpr unsigned kDefaultWindow = 20;

enum class Screen : uint8_t {
  kClean,
  kNoAssignInWindow,
  kOpaqueBetween,
  kBranchBetween,
  kJumpTargetBetween,
  kPcRelativeAssign,
  kConfigDemoted,
};

const char* screen_name(Screen s);

// One discovered SVC paired with the nearest preceding x8 assignment.
struct SvcSite {
  uint64_t svc_addr = 0;
  std::optional<uint64_t> assign_addr;
  std::optional<isa::Instr> assign_instr;
  Screen screen = Screen::kClean;
  std::optional<uint16_t> sysno_hint;  // set when assign is movz with shift 0
};

struct ScanReport {
  std::vector<SvcSite> sites;  // sorted by svc_addr
  std::set<uint64_t> direct_branch_targets;

  std::map<Screen, size_t> counts() const;
};

class NoExecutableSegments : public Error {
public:
  explicit NoExecutableSegments(const std::string& msg) : Error(msg) {}
};

// Linear sweep of every 4-byte-aligned word in executable segments.
// Throws NoExecutableSegments.
ScanReport scan(const image::MemoryImage& img, unsigned window = kDefaultWindow);

// Backward walk of at most `window` instructions pairing an SVC with its
// x8 assignment. The returned screen encodes every failure mode; never throws.
std::pair<std::optional<std::pair<uint64_t, isa::Instr>>, Screen> find_x8_assign(
    const image::MemoryImage& img, uint64_t svc_addr, unsigned window = kDefaultWindow);

// Demotes any site whose interval (assign_addr, svc_addr] contains a direct
// branch target to JumpTargetBetween.
ScanReport mark_jump_targets(ScanReport report);

}  // namespace asch::scanner
