#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "asch/common.hpp"

namespace asch::isa {

// Register numbers. 31 encodes XZR or SP depending on the instruction.
inline constexpr uint8_t kX0 = 0;
inline constexpr uint8_t kX8 = 8;
inline constexpr uint8_t kX16 = 16;
inline constexpr uint8_t kX17 = 17;
inline constexpr uint8_t kX29 = 29;
inline constexpr uint8_t kX30 = 30;
inline constexpr uint8_t kZr = 31;
inline constexpr uint8_t kSp = 31;

enum class Op : uint8_t {
  kSvc,
  kBrk,
  kUdf,
  kMovz,
  kMovk,
  kMovReg,
  kOrrImm,
  kAdrp,
  kAddImm,
  kSubImm,
  kB,
  kBl,
  kBCond,
  kCbz,
  kCbnz,
  kTbz,
  kTbnz,
  kBr,
  kBlr,
  kRet,
  kLdrImm,
  kStrImm,
  kStpPre,
  kLdpPost,
  kNop,
  kOpaque,
};

enum class Writeback : uint8_t { kNone, kPre, kPost };

// One decoded A64 instruction (64-bit register forms only).
//
// Operand storage by op:
//   Svc/Brk           imm = imm16
//   Movz/Movk         rd, imm = imm16, shift in {0,16,32,48}
//   MovReg            rd, rn = source register (ORR rd, xzr, rn alias)
//   OrrImm            rd, imm = decoded 64-bit bitmask value (MOV rd, #bimm alias)
//   Adrp              rd, imm = signed page delta (pages, not bytes)
//   AddImm/SubImm     rd, rn, imm = imm12, shift in {0,12}
//   B/Bl              imm = signed word offset (imm26)
//   BCond             cond, imm = signed word offset (imm19)
//   Cbz/Cbnz          rd = rt, imm = signed word offset (imm19)
//   Tbz/Tbnz          rd = rt, bit, imm = signed word offset (imm14)
//   Br/Blr/Ret        rn
//   LdrImm/StrImm     rd = rt, rn = base, imm = byte offset, wb mode
//                     (offset mode: unsigned multiple of 8 < 32768; pre/post: signed 9-bit)
//   StpPre/LdpPost    rd = rt1, rt2, rn = base, imm = byte offset (multiple of 8 in [-512,504])
struct Instr {
  uint64_t address = 0;
  uint32_t raw = 0;
  Op op = Op::kOpaque;
  uint8_t rd = 0;
  uint8_t rn = 0;
  uint8_t rt2 = 0;
  uint8_t shift = 0;
  uint8_t cond = 0;
  uint8_t bit = 0;
  Writeback wb = Writeback::kNone;
  int64_t imm = 0;

  bool operator==(const Instr& o) const {
    return op == o.op && rd == o.rd && rn == o.rn && rt2 == o.rt2 && shift == o.shift &&
           cond == o.cond && bit == o.bit && wb == o.wb && imm == o.imm &&
           (op != Op::kOpaque || raw == o.raw);
  }
};

class OutOfRange : public Error {
public:
  explicit OutOfRange(const std::string& msg) : Error(msg) {}
};

// Total over all 32-bit words; anything outside the subset decodes to Opaque.
Instr decode(uint32_t word, uint64_t address);

// Inverse of decode for non-Opaque kinds; Opaque re-encodes its raw word.
// Throws OutOfRange when an operand exceeds its field.
uint32_t encode(const Instr& instr);

// Static target of a direct branch; absent for everything else.
std::optional<uint64_t> branch_target(const Instr& instr);

enum class RegWrite : uint8_t { kYes, kNo, kUnknown };

// Does this instruction write general register `reg`? Opaque is unknown.
RegWrite writes_register(const Instr& instr, uint8_t reg);

// True for ADRP and direct branches; Opaque is conservatively true.
bool is_pc_relative(const Instr& instr);

// True when re-executing the instruction later, at a different address, with
// `reg` clobbered and sp moved, still yields the original value in `reg`.
// False for pc-relative writes, reads of `reg` itself, and sp-based operands.
bool safely_reexecutable(const Instr& instr, uint8_t reg);

std::string to_string(const Instr& instr);

// A64 logical-immediate (bitmask) codec, 64-bit variant.
std::optional<uint64_t> decode_bitmask(unsigned n, unsigned immr, unsigned imms);
std::optional<std::tuple<unsigned, unsigned, unsigned>> encode_bitmask(uint64_t value);

// Convenience constructors.
Instr make_svc(uint16_t imm = 0);
Instr make_brk(uint16_t imm);
Instr make_udf();
Instr make_movz(uint8_t rd, uint16_t imm, uint8_t shift = 0);
Instr make_movk(uint8_t rd, uint16_t imm, uint8_t shift);
Instr make_mov_reg(uint8_t rd, uint8_t rm);
Instr make_adrp(uint8_t rd, int64_t page_delta);
Instr make_add_imm(uint8_t rd, uint8_t rn, uint16_t imm, uint8_t shift = 0);
Instr make_sub_imm(uint8_t rd, uint8_t rn, uint16_t imm, uint8_t shift = 0);
Instr make_b(int64_t word_off);
Instr make_bl(int64_t word_off);
Instr make_b_cond(uint8_t cond, int64_t word_off);
Instr make_cbz(uint8_t rt, int64_t word_off);
Instr make_cbnz(uint8_t rt, int64_t word_off);
Instr make_tbz(uint8_t rt, uint8_t bit, int64_t word_off);
Instr make_tbnz(uint8_t rt, uint8_t bit, int64_t word_off);
Instr make_br(uint8_t rn);
Instr make_blr(uint8_t rn);
Instr make_ret(uint8_t rn = kX30);
Instr make_ldr(uint8_t rt, uint8_t rn, int64_t off, Writeback wb = Writeback::kNone);
Instr make_str(uint8_t rt, uint8_t rn, int64_t off, Writeback wb = Writeback::kNone);
Instr make_stp_pre(uint8_t rt1, uint8_t rt2, uint8_t rn, int64_t off);
Instr make_ldp_post(uint8_t rt1, uint8_t rt2, uint8_t rn, int64_t off);
Instr make_nop();

// Assembles small instruction sequences into byte blobs with label support.
// Used by trampoline generation, benches, and test fixtures.
class CodeBuilder {
public:
  explicit CodeBuilder(uint64_t base) : base_(base) {}

  uint64_t here() const { return base_ + 4 * words_.size(); }
  uint64_t base() const { return base_; }
  size_t size_bytes() const { return 4 * words_.size(); }

  CodeBuilder& emit(Instr instr);
  CodeBuilder& emit_word(uint32_t raw);

  // Marks/uses named positions; branches to labels are patched at build time.
  CodeBuilder& label(const std::string& name);
  CodeBuilder& b_to(const std::string& name);
  CodeBuilder& bl_to(const std::string& name);
  CodeBuilder& cbnz_to(uint8_t rt, const std::string& name);
  CodeBuilder& cbz_to(uint8_t rt, const std::string& name);
  CodeBuilder& b_cond_to(uint8_t cond, const std::string& name);

  uint64_t label_addr(const std::string& name) const;
  std::vector<uint8_t> bytes() const;  // resolves fixups; throws on unknown label

private:
  struct Fixup {
    size_t index;
    Op op;
    uint8_t rt = 0;
    uint8_t cond = 0;
    std::string target;
  };
  uint64_t base_;
  std::vector<uint32_t> words_;
  std::vector<Fixup> fixups_;
  std::vector<std::pair<std::string, uint64_t>> labels_;
};

}  // namespace asch::isa
