#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "asch/isa.hpp"
#include "asch/scanner.hpp"

namespace asch::trampoline {

// Stack frame built by the generated code, offsets from sp at the hook call:
//   +0 .. +247   x0..x30 (8 bytes each, x-index order)
//   +248         nzcv slot (written/read by the execution environment)
//   +256         return address (svc_addr + 4, pushed on trampoline entry)
//   +264         claim flag: 0 = execute the real syscall, nonzero = the hook
//                supplied the result in the x0 slot
inline constexpr int64_t kFrameRegBytes = 256;
inline constexpr int64_t kFrameNzcvOff = 248;
inline constexpr int64_t kFrameRetOff = 256;
inline constexpr int64_t kFrameFlagOff = 264;

inline constexpr size_t kL1Bytes = 16;
inline constexpr size_t kL2Bytes = 24;
inline constexpr size_t kL3Instrs = 43;
inline constexpr size_t kL3Bytes = 4 * kL3Instrs;

class Unreachable : public Error {
public:
  explicit Unreachable(const std::string& msg) : Error(msg) {}
};
class PcRelativeAssign : public Error {
public:
  explicit PcRelativeAssign(const std::string& msg) : Error(msg) {}
};

struct TrampolineLayout {
  struct L1Block {
    uint64_t addr = 0;
    std::array<isa::Instr, 4> code;
  };
  struct L2Block {
    uint64_t addr = 0;
    uint64_t site_svc_addr = 0;
    std::array<isa::Instr, 6> code;
  };
  std::vector<L1Block> l1_blocks;
  std::vector<L2Block> l2_blocks;
  uint64_t l3_addr = 0;
  std::vector<isa::Instr> l3_code;
  uint64_t hook_gate_addr = 0;
};

// movz/movk/movk pair loading the low 48 bits of `value` into x8.
std::array<isa::Instr, 3> mov48_x8(uint64_t value);

// First level: 16 bytes that forward to the second level as fast as possible.
// Throws isa::OutOfRange when l2_addr needs more than 48 bits.
std::array<isa::Instr, 4> gen_l1(uint64_t l2_addr);

// Second level: pushes the return address (svc_addr + 4), re-executes the
// original x8 assignment, and branches to the shared third level.
// Throws PcRelativeAssign / Unreachable on contract violations.
std::array<isa::Instr, 6> gen_l2(const scanner::SvcSite& site, uint64_t l3_addr,
                                 uint64_t self_addr);

// Shared third level: saves the register frame, calls the hook gate,
// conditionally performs the real syscall, restores, and returns through the
// pushed address.
std::vector<isa::Instr> gen_l3(uint64_t hook_gate_addr);

}  // namespace asch::trampoline
