#include "asch/scanner.hpp"

#include <algorithm>

namespace asch::scanner {

using isa::Instr;
using isa::Op;

const char* screen_name(Screen s) {
  switch (s) {
    case Screen::kClean: return "Clean";
    case Screen::kNoAssignInWindow: return "NoAssignInWindow";
    case Screen::kOpaqueBetween: return "OpaqueBetween";
    case Screen::kBranchBetween: return "BranchBetween";
    case Screen::kJumpTargetBetween: return "JumpTargetBetween";
    case Screen::kPcRelativeAssign: return "PcRelativeAssign";
    case Screen::kConfigDemoted: return "ConfigDemoted";
  }
  return "?";
}

std::map<Screen, size_t> ScanReport::counts() const {
  std::map<Screen, size_t> c;
  for (const auto& s : sites) ++c[s.screen];
  return c;
}

namespace {

bool is_branch(const Instr& i) {
  switch (i.op) {
    case Op::kB:
    case Op::kBl:
    case Op::kBCond:
    case Op::kCbz:
    case Op::kCbnz:
    case Op::kTbz:
    case Op::kTbnz:
    case Op::kBr:
    case Op::kBlr:
    case Op::kRet:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::pair<std::optional<std::pair<uint64_t, Instr>>, Screen> find_x8_assign(
    const image::MemoryImage& img, uint64_t svc_addr, unsigned window) {
  const image::Segment* seg = img.find(svc_addr);
  if (!seg) return {std::nullopt, Screen::kNoAssignInWindow};

  bool opaque_between = false;
  bool branch_between = false;
  uint64_t addr = svc_addr;
  for (unsigned n = 0; n < window; ++n) {
    if (addr < seg->vaddr + 4) break;
    addr -= 4;
    const Instr i = isa::decode(img.read_word(addr), addr);
    if (i.op == Op::kSvc) break;  // belongs to another site's pair
    const isa::RegWrite w = isa::writes_register(i, isa::kX8);
    if (w == isa::RegWrite::kYes) {
      if (!isa::safely_reexecutable(i, isa::kX8)) return {{{addr, i}}, Screen::kPcRelativeAssign};
      if (branch_between) return {{{addr, i}}, Screen::kBranchBetween};
      if (opaque_between) return {{{addr, i}}, Screen::kOpaqueBetween};
      return {{{addr, i}}, Screen::kClean};
    }
    if (w == isa::RegWrite::kUnknown) opaque_between = true;
    if (is_branch(i)) branch_between = true;
  }
  return {std::nullopt, Screen::kNoAssignInWindow};
}

ScanReport scan(const image::MemoryImage& img, unsigned window) {
  bool any_exec = false;
  ScanReport report;
  for (const auto& seg : img.segments()) {
    if (!seg.perms.x) continue;
    any_exec = true;
    const uint64_t end = seg.vaddr + seg.bytes.size() / 4 * 4;
    for (uint64_t addr = seg.vaddr; addr + 4 <= end; addr += 4) {
      const Instr i = isa::decode(img.read_word(addr), addr);
      if (i.op == Op::kSvc) {
        SvcSite site;
        site.svc_addr = addr;
        auto [assign, screen] = find_x8_assign(img, addr, window);
        site.screen = screen;
        if (assign) {
          site.assign_addr = assign->first;
          site.assign_instr = assign->second;
          if (assign->second.op == Op::kMovz && assign->second.shift == 0)
            site.sysno_hint = static_cast<uint16_t>(assign->second.imm);
        }
        report.sites.push_back(std::move(site));
      } else if (const auto target = isa::branch_target(i)) {
        report.direct_branch_targets.insert(*target);
      }
    }
  }
  if (!any_exec) throw NoExecutableSegments("image has no executable segment");
  std::sort(report.sites.begin(), report.sites.end(),
            [](const SvcSite& a, const SvcSite& b) { return a.svc_addr < b.svc_addr; });
  return report;
}

ScanReport mark_jump_targets(ScanReport report) {
  for (auto& site : report.sites) {
    const uint64_t lo = site.assign_addr ? *site.assign_addr + 4 : site.svc_addr;
    const uint64_t hi = site.svc_addr;
    auto it = report.direct_branch_targets.lower_bound(lo);
    if (it != report.direct_branch_targets.end() && *it <= hi)
      site.screen = Screen::kJumpTargetBetween;
  }
  return report;
}

}  // namespace asch::scanner
