#include "asch/trampoline.hpp"

namespace asch::trampoline {

using namespace isa;

std::array<Instr, 3> mov48_x8(uint64_t value) {
  if (value >= (uint64_t{1} << 48))
    throw OutOfRange("address does not fit in 48 bits: " + hex(value));
  return {
      make_movz(kX8, static_cast<uint16_t>(value), 0),
      make_movk(kX8, static_cast<uint16_t>(value >> 16), 16),
      make_movk(kX8, static_cast<uint16_t>(value >> 32), 32),
  };
}

std::array<Instr, 4> gen_l1(uint64_t l2_addr) {
  const auto mv = mov48_x8(l2_addr);
  return {mv[0], mv[1], mv[2], make_br(kX8)};
}

std::array<Instr, 6> gen_l2(const scanner::SvcSite& site, uint64_t l3_addr, uint64_t self_addr) {
  if (!site.assign_instr)
    throw PcRelativeAssign("site " + hex(site.svc_addr) + " has no paired assignment");
  if (!safely_reexecutable(*site.assign_instr, kX8))
    throw PcRelativeAssign("assignment at " + hex(*site.assign_addr) +
                           " cannot be re-executed in a trampoline");
  const uint64_t ret = site.svc_addr + 4;
  const auto mv = mov48_x8(ret);

  // The branch to L3 is the 6th instruction, at self_addr + 20.
  const int64_t delta = static_cast<int64_t>(l3_addr) - static_cast<int64_t>(self_addr + 20);
  if (delta % 4 != 0 || !bits::fits_signed(delta / 4, 26))
    throw Unreachable("L3 at " + hex(l3_addr) + " unreachable from L2 at " + hex(self_addr));

  return {mv[0], mv[1], mv[2], make_str(kX8, kSp, -16, Writeback::kPre), *site.assign_instr,
          make_b(delta / 4)};
}

std::vector<Instr> gen_l3(uint64_t hook_gate_addr) {
  if (hook_gate_addr >= (uint64_t{1} << 48))
    throw OutOfRange("hook gate address does not fit in 48 bits");

  std::vector<Instr> code;
  code.reserve(kL3Instrs);

  // Push x0..x30 plus the nzcv slot, highest pair first so x0 lands at the
  // frame base. The nzcv slot is filled by the execution environment at the
  // gate call; the generated store parks zero there.
  code.push_back(make_stp_pre(kX30, kZr, kSp, -16));
  for (int r = 28; r >= 0; r -= 2)
    code.push_back(make_stp_pre(static_cast<uint8_t>(r), static_cast<uint8_t>(r + 1), kSp, -16));

  code.push_back(make_str(kZr, kSp, kFrameFlagOff));  // clear the claim flag

  // Materialize the gate address in x16 and call it. x16 and x30 are both in
  // the frame and restored below.
  code.push_back(make_movz(kX16, static_cast<uint16_t>(hook_gate_addr), 0));
  code.push_back(make_movk(kX16, static_cast<uint16_t>(hook_gate_addr >> 16), 16));
  code.push_back(make_movk(kX16, static_cast<uint16_t>(hook_gate_addr >> 32), 32));
  code.push_back(make_blr(kX16));

  // If the hook claimed the call, skip the real syscall; otherwise execute it
  // with every argument register still intact and store the result into the
  // frame's x0 slot so the restore below delivers it either way.
  code.push_back(make_ldr(kX16, kSp, kFrameFlagOff));
  code.push_back(make_cbnz(kX16, 3));
  code.push_back(make_svc(0));
  code.push_back(make_str(kX0, kSp, 0));

  for (int r = 0; r <= 28; r += 2)
    code.push_back(make_ldp_post(static_cast<uint8_t>(r), static_cast<uint8_t>(r + 1), kSp, 16));
  code.push_back(make_ldp_post(kX30, kZr, kSp, 16));

  code.push_back(make_ldr(kX8, kSp, 16, Writeback::kPost));  // pop the return address
  code.push_back(make_br(kX8));

  if (code.size() != kL3Instrs) throw Error("L3 length drifted");
  return code;
}

}  // namespace asch::trampoline
