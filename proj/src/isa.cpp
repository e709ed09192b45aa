#include "asch/isa.hpp"

#include <array>
#include <bit>
#include <map>

namespace asch::isa {

using bits::field;
using bits::fits_signed;
using bits::fits_unsigned;
using bits::sext;

namespace {

constexpr uint64_t ones(unsigned n) {
  return n >= 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
}

uint64_t ror(uint64_t v, unsigned amount, unsigned size) {
  const uint64_t mask = ones(size);
  v &= mask;
  if (amount == 0) return v;
  return ((v >> amount) | (v << (size - amount))) & mask;
}

Instr base_instr(Op op, uint32_t raw, uint64_t address) {
  Instr i;
  i.op = op;
  i.raw = raw;
  i.address = address;
  return i;
}

const char* cond_names[16] = {"eq", "ne", "cs", "cc", "mi", "pl", "vs", "vc",
                              "hi", "ls", "ge", "lt", "gt", "le", "al", "nv"};

std::string reg_name(uint8_t r, bool sp_context = false) {
  if (r == 31) return sp_context ? "sp" : "xzr";
  return "x" + std::to_string(r);
}

}  // namespace

std::optional<uint64_t> decode_bitmask(unsigned n, unsigned immr, unsigned imms) {
  const unsigned pattern = (n << 6) | (~imms & 0x3F);
  if (pattern == 0) return std::nullopt;
  const unsigned len = 31 - static_cast<unsigned>(std::countl_zero(pattern));
  if (len < 1) return std::nullopt;
  const unsigned esize = 1u << len;
  const unsigned levels = esize - 1;
  const unsigned s = imms & levels;
  const unsigned r = immr & levels;
  if (s == levels) return std::nullopt;  // all-ones element is reserved
  const uint64_t welem = ones(s + 1);
  const uint64_t elem = ror(welem, r, esize);
  uint64_t result = 0;
  for (unsigned i = 0; i < 64; i += esize) result |= elem << i;
  return result;
}

std::optional<std::tuple<unsigned, unsigned, unsigned>> encode_bitmask(uint64_t value) {
  if (value == 0 || value == ~uint64_t{0}) return std::nullopt;
  for (unsigned esize = 2; esize <= 64; esize *= 2) {
    const uint64_t elem = value & ones(esize);
    // Must replicate exactly across the register.
    uint64_t repl = 0;
    for (unsigned i = 0; i < 64; i += esize) repl |= elem << i;
    if (repl != value) continue;
    const unsigned count = static_cast<unsigned>(std::popcount(elem));
    if (count == 0 || count == esize) return std::nullopt;
    const uint64_t welem = ones(count);
    for (unsigned r = 0; r < esize; ++r) {
      if (ror(welem, r, esize) == elem) {
        const unsigned s = count - 1;
        const unsigned n = esize == 64 ? 1 : 0;
        const unsigned imms = esize == 64 ? s : ((~(2 * esize - 1) & 0x3F) | s);
        return std::make_tuple(n, r, imms);
      }
    }
    return std::nullopt;
  }
  return std::nullopt;
}

Instr decode(uint32_t w, uint64_t address) {
  // Exception generation.
  if ((w & 0xFFE0001F) == 0xD4000001) {
    Instr i = base_instr(Op::kSvc, w, address);
    i.imm = field(w, 20, 5);
    return i;
  }
  if ((w & 0xFFE0001F) == 0xD4200000) {
    Instr i = base_instr(Op::kBrk, w, address);
    i.imm = field(w, 20, 5);
    return i;
  }
  if (w == 0) return base_instr(Op::kUdf, w, address);
  if (w == 0xD503201F) return base_instr(Op::kNop, w, address);

  // Wide moves, 64-bit.
  if ((w & 0xFF800000) == 0xD2800000 || (w & 0xFF800000) == 0xF2800000) {
    const bool keep = (w & 0xFF800000) == 0xF2800000;
    Instr i = base_instr(keep ? Op::kMovk : Op::kMovz, w, address);
    i.rd = w & 31;
    i.imm = field(w, 20, 5);
    i.shift = static_cast<uint8_t>(field(w, 22, 21) * 16);
    return i;
  }

  // ORR xd, xzr, xm with no shift: register MOV alias.
  if ((w & 0xFFE0FFE0) == 0xAA0003E0) {
    Instr i = base_instr(Op::kMovReg, w, address);
    i.rd = w & 31;
    i.rn = static_cast<uint8_t>(field(w, 20, 16));
    return i;
  }

  // ORR xd, xzr, #bimm: bitmask-immediate MOV alias. Other source registers
  // stay Opaque so the scanner treats them conservatively.
  if ((w & 0xFF8003E0) == 0xB20003E0) {
    const auto value = decode_bitmask(field(w, 22, 22), field(w, 21, 16), field(w, 15, 10));
    if (value) {
      Instr i = base_instr(Op::kOrrImm, w, address);
      i.rd = w & 31;
      i.imm = static_cast<int64_t>(*value);
      return i;
    }
    return base_instr(Op::kOpaque, w, address);
  }

  if ((w & 0x9F000000) == 0x90000000) {
    Instr i = base_instr(Op::kAdrp, w, address);
    i.rd = w & 31;
    i.imm = sext((static_cast<uint64_t>(field(w, 23, 5)) << 2) | field(w, 30, 29), 21);
    return i;
  }

  if ((w & 0xFF800000) == 0x91000000 || (w & 0xFF800000) == 0xD1000000) {
    Instr i = base_instr((w & 0xFF800000) == 0x91000000 ? Op::kAddImm : Op::kSubImm, w, address);
    i.rd = w & 31;
    i.rn = static_cast<uint8_t>(field(w, 9, 5));
    i.imm = field(w, 21, 10);
    i.shift = field(w, 22, 22) ? 12 : 0;
    return i;
  }

  // Direct branches.
  if ((w & 0xFC000000) == 0x14000000 || (w & 0xFC000000) == 0x94000000) {
    Instr i = base_instr((w & 0xFC000000) == 0x14000000 ? Op::kB : Op::kBl, w, address);
    i.imm = sext(field(w, 25, 0), 26);
    return i;
  }
  if ((w & 0xFF000010) == 0x54000000) {
    Instr i = base_instr(Op::kBCond, w, address);
    i.cond = w & 15;
    i.imm = sext(field(w, 23, 5), 19);
    return i;
  }
  if ((w & 0xFF000000) == 0xB4000000 || (w & 0xFF000000) == 0xB5000000) {
    Instr i = base_instr((w & 0xFF000000) == 0xB4000000 ? Op::kCbz : Op::kCbnz, w, address);
    i.rd = w & 31;
    i.imm = sext(field(w, 23, 5), 19);
    return i;
  }
  if ((w & 0x7F000000) == 0x36000000 || (w & 0x7F000000) == 0x37000000) {
    Instr i = base_instr((w & 0x7F000000) == 0x36000000 ? Op::kTbz : Op::kTbnz, w, address);
    i.rd = w & 31;
    i.bit = static_cast<uint8_t>((field(w, 31, 31) << 5) | field(w, 23, 19));
    i.imm = sext(field(w, 18, 5), 14);
    return i;
  }

  // Indirect branches.
  if ((w & 0xFFFFFC1F) == 0xD61F0000 || (w & 0xFFFFFC1F) == 0xD63F0000 ||
      (w & 0xFFFFFC1F) == 0xD65F0000) {
    Op op = Op::kBr;
    if ((w & 0xFFFFFC1F) == 0xD63F0000) op = Op::kBlr;
    if ((w & 0xFFFFFC1F) == 0xD65F0000) op = Op::kRet;
    Instr i = base_instr(op, w, address);
    i.rn = static_cast<uint8_t>(field(w, 9, 5));
    return i;
  }

  // 64-bit LDR/STR immediate, unsigned offset.
  if ((w & 0xFFC00000) == 0xF9400000 || (w & 0xFFC00000) == 0xF9000000) {
    Instr i = base_instr((w & 0xFFC00000) == 0xF9400000 ? Op::kLdrImm : Op::kStrImm, w, address);
    i.rd = w & 31;
    i.rn = static_cast<uint8_t>(field(w, 9, 5));
    i.imm = static_cast<int64_t>(field(w, 21, 10)) * 8;
    i.wb = Writeback::kNone;
    return i;
  }
  // 64-bit LDR/STR immediate, pre/post-indexed.
  if ((w & 0xFFE00400) == 0xF8400400 || (w & 0xFFE00400) == 0xF8000400) {
    const bool pre = field(w, 11, 10) == 3;
    const bool post = field(w, 11, 10) == 1;
    if (pre || post) {
      Instr i = base_instr((w & 0xFFE00400) == 0xF8400400 ? Op::kLdrImm : Op::kStrImm, w, address);
      i.rd = w & 31;
      i.rn = static_cast<uint8_t>(field(w, 9, 5));
      i.imm = sext(field(w, 20, 12), 9);
      i.wb = pre ? Writeback::kPre : Writeback::kPost;
      return i;
    }
  }

  if ((w & 0xFFC00000) == 0xA9800000 || (w & 0xFFC00000) == 0xA8C00000) {
    Instr i = base_instr((w & 0xFFC00000) == 0xA9800000 ? Op::kStpPre : Op::kLdpPost, w, address);
    i.rd = w & 31;
    i.rt2 = static_cast<uint8_t>(field(w, 14, 10));
    i.rn = static_cast<uint8_t>(field(w, 9, 5));
    i.imm = sext(field(w, 21, 15), 7) * 8;
    return i;
  }

  return base_instr(Op::kOpaque, w, address);
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw OutOfRange(what);
}

uint32_t encode_mem_single(const Instr& i, uint32_t uoff_base, uint32_t idx_base) {
  if (i.wb == Writeback::kNone) {
    require(i.imm >= 0 && i.imm % 8 == 0 && fits_unsigned(static_cast<uint64_t>(i.imm / 8), 12),
            "ldr/str unsigned offset out of range: " + std::to_string(i.imm));
    return uoff_base | (static_cast<uint32_t>(i.imm / 8) << 10) | (uint32_t{i.rn} << 5) | i.rd;
  }
  require(fits_signed(i.imm, 9), "ldr/str indexed offset out of range: " + std::to_string(i.imm));
  const uint32_t mode = i.wb == Writeback::kPre ? 3 : 1;
  return idx_base | ((static_cast<uint32_t>(i.imm) & 0x1FF) << 12) | (mode << 10) |
         (uint32_t{i.rn} << 5) | i.rd;
}

uint32_t encode_pair(const Instr& i, uint32_t base) {
  require(i.imm % 8 == 0 && fits_signed(i.imm / 8, 7),
          "stp/ldp offset out of range: " + std::to_string(i.imm));
  return base | ((static_cast<uint32_t>(i.imm / 8) & 0x7F) << 15) | (uint32_t{i.rt2} << 10) |
         (uint32_t{i.rn} << 5) | i.rd;
}

}  // namespace

uint32_t encode(const Instr& i) {
  switch (i.op) {
    case Op::kOpaque:
      return i.raw;
    case Op::kUdf:
      return 0;
    case Op::kNop:
      return 0xD503201F;
    case Op::kSvc:
    case Op::kBrk:
      require(fits_unsigned(static_cast<uint64_t>(i.imm), 16), "svc/brk imm16 out of range");
      return (i.op == Op::kSvc ? 0xD4000001u : 0xD4200000u) | (static_cast<uint32_t>(i.imm) << 5);
    case Op::kMovz:
    case Op::kMovk:
      require(fits_unsigned(static_cast<uint64_t>(i.imm), 16), "mov imm16 out of range");
      require(i.shift % 16 == 0 && i.shift <= 48, "mov shift must be 0/16/32/48");
      return (i.op == Op::kMovz ? 0xD2800000u : 0xF2800000u) | (uint32_t{i.shift} / 16 << 21) |
             (static_cast<uint32_t>(i.imm) << 5) | i.rd;
    case Op::kMovReg:
      return 0xAA0003E0u | (uint32_t{i.rn} << 16) | i.rd;
    case Op::kOrrImm: {
      const auto enc = encode_bitmask(static_cast<uint64_t>(i.imm));
      require(enc.has_value(), "value is not a valid bitmask immediate: " + hex(i.imm));
      const auto [n, immr, imms] = *enc;
      return 0xB20003E0u | (n << 22) | (immr << 16) | (imms << 10) | i.rd;
    }
    case Op::kAdrp:
      require(fits_signed(i.imm, 21), "adrp page delta out of range");
      return 0x90000000u | ((static_cast<uint32_t>(i.imm) & 3) << 29) |
             (((static_cast<uint32_t>(i.imm) >> 2) & 0x7FFFF) << 5) | i.rd;
    case Op::kAddImm:
    case Op::kSubImm:
      require(fits_unsigned(static_cast<uint64_t>(i.imm), 12), "add/sub imm12 out of range");
      require(i.shift == 0 || i.shift == 12, "add/sub shift must be 0 or 12");
      return (i.op == Op::kAddImm ? 0x91000000u : 0xD1000000u) |
             (uint32_t{i.shift == 12} << 22) | (static_cast<uint32_t>(i.imm) << 10) |
             (uint32_t{i.rn} << 5) | i.rd;
    case Op::kB:
    case Op::kBl:
      require(fits_signed(i.imm, 26), "b/bl offset out of range");
      return (i.op == Op::kB ? 0x14000000u : 0x94000000u) | (static_cast<uint32_t>(i.imm) & 0x3FFFFFF);
    case Op::kBCond:
      require(fits_signed(i.imm, 19), "b.cond offset out of range");
      require(i.cond < 16, "bad condition");
      return 0x54000000u | ((static_cast<uint32_t>(i.imm) & 0x7FFFF) << 5) | i.cond;
    case Op::kCbz:
    case Op::kCbnz:
      require(fits_signed(i.imm, 19), "cbz/cbnz offset out of range");
      return (i.op == Op::kCbz ? 0xB4000000u : 0xB5000000u) |
             ((static_cast<uint32_t>(i.imm) & 0x7FFFF) << 5) | i.rd;
    case Op::kTbz:
    case Op::kTbnz:
      require(fits_signed(i.imm, 14), "tbz/tbnz offset out of range");
      require(i.bit < 64, "tbz/tbnz bit out of range");
      return (i.op == Op::kTbz ? 0x36000000u : 0x37000000u) | (uint32_t{i.bit} >> 5 << 31) |
             ((uint32_t{i.bit} & 31) << 19) | ((static_cast<uint32_t>(i.imm) & 0x3FFF) << 5) | i.rd;
    case Op::kBr:
      return 0xD61F0000u | (uint32_t{i.rn} << 5);
    case Op::kBlr:
      return 0xD63F0000u | (uint32_t{i.rn} << 5);
    case Op::kRet:
      return 0xD65F0000u | (uint32_t{i.rn} << 5);
    case Op::kLdrImm:
      return encode_mem_single(i, 0xF9400000u, 0xF8400000u);
    case Op::kStrImm:
      return encode_mem_single(i, 0xF9000000u, 0xF8000000u);
    case Op::kStpPre:
      return encode_pair(i, 0xA9800000u);
    case Op::kLdpPost:
      return encode_pair(i, 0xA8C00000u);
  }
  throw OutOfRange("unencodable instruction kind");
}

std::optional<uint64_t> branch_target(const Instr& i) {
  switch (i.op) {
    case Op::kB:
    case Op::kBl:
    case Op::kBCond:
    case Op::kCbz:
    case Op::kCbnz:
    case Op::kTbz:
    case Op::kTbnz:
      return i.address + static_cast<uint64_t>(i.imm * 4);
    default:
      return std::nullopt;
  }
}

RegWrite writes_register(const Instr& i, uint8_t reg) {
  switch (i.op) {
    case Op::kOpaque:
      return RegWrite::kUnknown;
    case Op::kMovz:
    case Op::kMovk:
    case Op::kMovReg:
    case Op::kOrrImm:
    case Op::kAdrp:
    case Op::kAddImm:
    case Op::kSubImm:
      return i.rd == reg ? RegWrite::kYes : RegWrite::kNo;
    case Op::kLdrImm:
      if (i.rd == reg) return RegWrite::kYes;
      return (i.wb != Writeback::kNone && i.rn == reg) ? RegWrite::kYes : RegWrite::kNo;
    case Op::kLdpPost:
      if (i.rd == reg || i.rt2 == reg || i.rn == reg) return RegWrite::kYes;
      return RegWrite::kNo;
    case Op::kStrImm:
    case Op::kStpPre:
      return (i.wb != Writeback::kNone || i.op == Op::kStpPre) && i.rn == reg && i.rn != kSp
                 ? RegWrite::kYes
                 : RegWrite::kNo;
    case Op::kBl:
    case Op::kBlr:
      return reg == kX30 ? RegWrite::kYes : RegWrite::kNo;
    default:
      return RegWrite::kNo;
  }
}

bool is_pc_relative(const Instr& i) {
  switch (i.op) {
    case Op::kAdrp:
    case Op::kB:
    case Op::kBl:
    case Op::kBCond:
    case Op::kCbz:
    case Op::kCbnz:
    case Op::kTbz:
    case Op::kTbnz:
    case Op::kOpaque:
      return true;
    default:
      return false;
  }
}

bool safely_reexecutable(const Instr& i, uint8_t reg) {
  if (writes_register(i, reg) != RegWrite::kYes) return false;
  switch (i.op) {
    case Op::kMovz:
    case Op::kOrrImm:
      return true;
    case Op::kMovReg:
      return i.rn != reg;
    case Op::kMovk:
      return false;  // reads its own destination
    case Op::kAddImm:
    case Op::kSubImm:
      return i.rn != reg && i.rn != kSp;
    case Op::kLdrImm:
      return i.rn != reg && i.rn != kSp;
    default:
      return false;  // pc-relative or not a full, context-free write
  }
}

std::string to_string(const Instr& i) {
  auto imm_str = [&](int64_t v) { return "#" + std::to_string(v); };
  switch (i.op) {
    case Op::kSvc:
      return "svc " + imm_str(i.imm);
    case Op::kBrk:
      return "brk " + imm_str(i.imm);
    case Op::kUdf:
      return "udf";
    case Op::kNop:
      return "nop";
    case Op::kMovz:
    case Op::kMovk: {
      std::string s = (i.op == Op::kMovz ? "movz " : "movk ") + reg_name(i.rd) + ", " + imm_str(i.imm);
      if (i.shift) s += ", lsl #" + std::to_string(i.shift);
      return s;
    }
    case Op::kMovReg:
      return "mov " + reg_name(i.rd) + ", " + reg_name(i.rn);
    case Op::kOrrImm:
      return "mov " + reg_name(i.rd) + ", #" + hex(static_cast<uint64_t>(i.imm));
    case Op::kAdrp:
      return "adrp " + reg_name(i.rd) + ", " + imm_str(i.imm);
    case Op::kAddImm:
    case Op::kSubImm: {
      std::string s = (i.op == Op::kAddImm ? "add " : "sub ") + reg_name(i.rd, true) + ", " +
                      reg_name(i.rn, true) + ", " + imm_str(i.imm);
      if (i.shift) s += ", lsl #12";
      return s;
    }
    case Op::kB:
      return "b " + imm_str(i.imm * 4);
    case Op::kBl:
      return "bl " + imm_str(i.imm * 4);
    case Op::kBCond:
      return std::string("b.") + cond_names[i.cond] + " " + imm_str(i.imm * 4);
    case Op::kCbz:
      return "cbz " + reg_name(i.rd) + ", " + imm_str(i.imm * 4);
    case Op::kCbnz:
      return "cbnz " + reg_name(i.rd) + ", " + imm_str(i.imm * 4);
    case Op::kTbz:
      return "tbz " + reg_name(i.rd) + ", #" + std::to_string(i.bit) + ", " + imm_str(i.imm * 4);
    case Op::kTbnz:
      return "tbnz " + reg_name(i.rd) + ", #" + std::to_string(i.bit) + ", " + imm_str(i.imm * 4);
    case Op::kBr:
      return "br " + reg_name(i.rn);
    case Op::kBlr:
      return "blr " + reg_name(i.rn);
    case Op::kRet:
      return "ret " + reg_name(i.rn);
    case Op::kLdrImm:
    case Op::kStrImm: {
      std::string m = i.op == Op::kLdrImm ? "ldr " : "str ";
      m += reg_name(i.rd) + ", [" + reg_name(i.rn, true);
      if (i.wb == Writeback::kPost) return m + "], " + imm_str(i.imm);
      if (i.imm) m += ", " + imm_str(i.imm);
      m += "]";
      if (i.wb == Writeback::kPre) m += "!";
      return m;
    }
    case Op::kStpPre:
      return "stp " + reg_name(i.rd) + ", " + reg_name(i.rt2) + ", [" + reg_name(i.rn, true) +
             ", " + imm_str(i.imm) + "]!";
    case Op::kLdpPost:
      return "ldp " + reg_name(i.rd) + ", " + reg_name(i.rt2) + ", [" + reg_name(i.rn, true) +
             "], " + imm_str(i.imm);
    case Op::kOpaque:
      return ".word " + hex32(i.raw);
  }
  return "?";
}

namespace {
Instr mk(Op op) {
  Instr i;
  i.op = op;
  return i;
}
}  // namespace

Instr make_svc(uint16_t imm) {
  Instr i = mk(Op::kSvc);
  i.imm = imm;
  return i;
}
Instr make_brk(uint16_t imm) {
  Instr i = mk(Op::kBrk);
  i.imm = imm;
  return i;
}
Instr make_udf() { return mk(Op::kUdf); }
Instr make_movz(uint8_t rd, uint16_t imm, uint8_t shift) {
  Instr i = mk(Op::kMovz);
  i.rd = rd;
  i.imm = imm;
  i.shift = shift;
  return i;
}
Instr make_movk(uint8_t rd, uint16_t imm, uint8_t shift) {
  Instr i = mk(Op::kMovk);
  i.rd = rd;
  i.imm = imm;
  i.shift = shift;
  return i;
}
Instr make_mov_reg(uint8_t rd, uint8_t rm) {
  Instr i = mk(Op::kMovReg);
  i.rd = rd;
  i.rn = rm;
  return i;
}
Instr make_adrp(uint8_t rd, int64_t page_delta) {
  Instr i = mk(Op::kAdrp);
  i.rd = rd;
  i.imm = page_delta;
  return i;
}
Instr make_add_imm(uint8_t rd, uint8_t rn, uint16_t imm, uint8_t shift) {
  Instr i = mk(Op::kAddImm);
  i.rd = rd;
  i.rn = rn;
  i.imm = imm;
  i.shift = shift;
  return i;
}
Instr make_sub_imm(uint8_t rd, uint8_t rn, uint16_t imm, uint8_t shift) {
  Instr i = mk(Op::kSubImm);
  i.rd = rd;
  i.rn = rn;
  i.imm = imm;
  i.shift = shift;
  return i;
}
Instr make_b(int64_t word_off) {
  Instr i = mk(Op::kB);
  i.imm = word_off;
  return i;
}
Instr make_bl(int64_t word_off) {
  Instr i = mk(Op::kBl);
  i.imm = word_off;
  return i;
}
Instr make_b_cond(uint8_t cond, int64_t word_off) {
  Instr i = mk(Op::kBCond);
  i.cond = cond;
  i.imm = word_off;
  return i;
}
Instr make_cbz(uint8_t rt, int64_t word_off) {
  Instr i = mk(Op::kCbz);
  i.rd = rt;
  i.imm = word_off;
  return i;
}
Instr make_cbnz(uint8_t rt, int64_t word_off) {
  Instr i = mk(Op::kCbnz);
  i.rd = rt;
  i.imm = word_off;
  return i;
}
Instr make_tbz(uint8_t rt, uint8_t bit, int64_t word_off) {
  Instr i = mk(Op::kTbz);
  i.rd = rt;
  i.bit = bit;
  i.imm = word_off;
  return i;
}
Instr make_tbnz(uint8_t rt, uint8_t bit, int64_t word_off) {
  Instr i = mk(Op::kTbnz);
  i.rd = rt;
  i.bit = bit;
  i.imm = word_off;
  return i;
}
Instr make_br(uint8_t rn) {
  Instr i = mk(Op::kBr);
  i.rn = rn;
  return i;
}
Instr make_blr(uint8_t rn) {
  Instr i = mk(Op::kBlr);
  i.rn = rn;
  return i;
}
Instr make_ret(uint8_t rn) {
  Instr i = mk(Op::kRet);
  i.rn = rn;
  return i;
}
Instr make_ldr(uint8_t rt, uint8_t rn, int64_t off, Writeback wb) {
  Instr i = mk(Op::kLdrImm);
  i.rd = rt;
  i.rn = rn;
  i.imm = off;
  i.wb = wb;
  return i;
}
Instr make_str(uint8_t rt, uint8_t rn, int64_t off, Writeback wb) {
  Instr i = mk(Op::kStrImm);
  i.rd = rt;
  i.rn = rn;
  i.imm = off;
  i.wb = wb;
  return i;
}
Instr make_stp_pre(uint8_t rt1, uint8_t rt2, uint8_t rn, int64_t off) {
  Instr i = mk(Op::kStpPre);
  i.rd = rt1;
  i.rt2 = rt2;
  i.rn = rn;
  i.imm = off;
  return i;
}
Instr make_ldp_post(uint8_t rt1, uint8_t rt2, uint8_t rn, int64_t off) {
  Instr i = mk(Op::kLdpPost);
  i.rd = rt1;
  i.rt2 = rt2;
  i.rn = rn;
  i.imm = off;
  return i;
}
Instr make_nop() { return mk(Op::kNop); }

CodeBuilder& CodeBuilder::emit(Instr instr) {
  instr.address = here();
  words_.push_back(encode(instr));
  return *this;
}

CodeBuilder& CodeBuilder::emit_word(uint32_t raw) {
  words_.push_back(raw);
  return *this;
}

CodeBuilder& CodeBuilder::label(const std::string& name) {
  labels_.emplace_back(name, here());
  return *this;
}

CodeBuilder& CodeBuilder::b_to(const std::string& name) {
  fixups_.push_back({words_.size(), Op::kB, 0, 0, name});
  words_.push_back(0);
  return *this;
}

CodeBuilder& CodeBuilder::bl_to(const std::string& name) {
  fixups_.push_back({words_.size(), Op::kBl, 0, 0, name});
  words_.push_back(0);
  return *this;
}

CodeBuilder& CodeBuilder::cbnz_to(uint8_t rt, const std::string& name) {
  fixups_.push_back({words_.size(), Op::kCbnz, rt, 0, name});
  words_.push_back(0);
  return *this;
}

CodeBuilder& CodeBuilder::cbz_to(uint8_t rt, const std::string& name) {
  fixups_.push_back({words_.size(), Op::kCbz, rt, 0, name});
  words_.push_back(0);
  return *this;
}

CodeBuilder& CodeBuilder::b_cond_to(uint8_t cond, const std::string& name) {
  fixups_.push_back({words_.size(), Op::kBCond, 0, cond, name});
  words_.push_back(0);
  return *this;
}

uint64_t CodeBuilder::label_addr(const std::string& name) const {
  for (const auto& [n, a] : labels_)
    if (n == name) return a;
  throw Error("unknown label: " + name);
}

std::vector<uint8_t> CodeBuilder::bytes() const {
  std::vector<uint32_t> words = words_;
  for (const auto& f : fixups_) {
    const uint64_t at = base_ + 4 * f.index;
    const int64_t off = (static_cast<int64_t>(label_addr(f.target)) - static_cast<int64_t>(at)) / 4;
    Instr i;
    i.op = f.op;
    i.rd = f.rt;
    i.cond = f.cond;
    i.imm = off;
    words[f.index] = encode(i);
  }
  std::vector<uint8_t> out;
  out.reserve(words.size() * 4);
  for (uint32_t w : words) {
    out.push_back(static_cast<uint8_t>(w));
    out.push_back(static_cast<uint8_t>(w >> 8));
    out.push_back(static_cast<uint8_t>(w >> 16));
    out.push_back(static_cast<uint8_t>(w >> 24));
  }
  return out;
}

}  // namespace asch::isa
