#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "asch/image.hpp"
#include "asch/scanner.hpp"

namespace asch::planner {
struct PlannerConfig;
struct RewritePlan;
}  // namespace asch::planner

namespace asch::completeness {

enum class Replacement : uint8_t { kBrk, kUdf };

// One user- or analyzer-provided demotion record for a site that cannot be
// rewritten safely (typically an indirect-jump target between the pair).
struct ConfigEntry {
  struct ByVaddr {
    uint64_t vaddr;
    bool operator==(const ByVaddr&) const = default;
  };
  struct BySysno {
    uint16_t sysno;
    bool operator==(const BySysno&) const = default;
  };
  struct ByLibOffset {
    std::string lib;
    uint64_t offset;
    bool operator==(const ByLibOffset&) const = default;
  };
  std::variant<ByVaddr, BySysno, ByLibOffset> selector;
  Replacement replacement = Replacement::kBrk;
  std::string note;

  bool operator==(const ConfigEntry&) const = default;
};

class MalformedEntry : public Error {
public:
  explicit MalformedEntry(const std::string& msg) : Error(msg) {}
};
class NotOurFault : public Error {
public:
  explicit NotOurFault(const std::string& msg) : Error(msg) {}
};
class LoopBound : public Error {
public:
  explicit LoopBound(const std::string& msg) : Error(msg) {}
};

// Line-based config format, one entry per line, '#' starts a comment:
//   sysno <n> <brk|udf>
//   lib <path> +<hexoff> <brk|udf>
//   vaddr <hexaddr> <brk|udf>
// A missing file parses as the empty list. Throws MalformedEntry with the
// line number. Default path "asch.conf", overridable via ASCH_CONFIG.
std::vector<ConfigEntry> parse_config(const std::string& path);
std::vector<ConfigEntry> parse_config_text(const std::string& text);
void write_config(const std::vector<ConfigEntry>& entries, const std::string& path);
void append_config(const ConfigEntry& entry, const std::string& path);
std::string format_entry(const ConfigEntry& entry);
std::string default_config_path();

// Register and mapping snapshot taken when a fault signal is delivered.
struct FaultContext {
  uint64_t pc = 0;
  std::array<uint64_t, 31> regs{};  // x0..x30
  std::vector<std::pair<uint64_t, std::string>> mappings;
  enum class Kind : uint8_t { kSegFault, kBusError } fault_kind = Kind::kSegFault;
};

// The discrimination rule for faults produced by a bypassed first patch:
// the pc both equals x8 and is a plausible syscall number.
bool is_rewriter_fault(const FaultContext& ctx, const planner::PlannerConfig& cfg);

// Recovers which site a rewriter fault came from and produces the config
// entry demoting it. `original` is the unrewritten image (site pairing and
// sysno hints come from there). Throws NotOurFault when the discrimination
// rule rejects the context.
ConfigEntry analyze_fault(const FaultContext& ctx, const image::MemoryImage& original,
                          const planner::PlannerConfig& cfg);

// One execution of a rewritten image: either it ran to completion or it
// stopped at a fault.
struct RunOutcome {
  bool completed = false;
  std::optional<FaultContext> fault;
};

using RunFn = std::function<RunOutcome(const image::MemoryImage& rewritten,
                                       const planner::RewritePlan& plan)>;

struct LoopResult {
  unsigned runs = 0;
  RunOutcome final;
  std::vector<ConfigEntry> entries_added;
};

// Scan-plan-run cycle implementing fault-driven demotion: each rewriter fault
// appends one config entry and triggers a replan and re-run. Throws LoopBound
// after `max_runs` attempts.
LoopResult rerun_loop(const image::MemoryImage& original, const planner::PlannerConfig& cfg,
                      const std::string& config_path, const RunFn& run, unsigned max_runs = 16);

}  // namespace asch::completeness
