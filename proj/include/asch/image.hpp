#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asch/common.hpp"

namespace asch::image {

struct Perms {
  bool r = false;
  bool w = false;
  bool x = false;

  bool operator==(const Perms&) const = default;
  std::string to_string() const;
  static Perms parse(const std::string& s);  // string over {r,w,x}, '-' ignored
};

struct Segment {
  uint64_t vaddr = 0;
  std::vector<uint8_t> bytes;
  Perms perms;
  std::string source;  // file path or "synthesized:<what>"

  uint64_t end() const { return vaddr + bytes.size(); }
  bool contains(uint64_t addr) const { return addr >= vaddr && addr < end(); }
};

class MalformedElf : public Error {
public:
  explicit MalformedElf(const std::string& msg) : Error(msg) {}
};
class OverlappingSegments : public Error {
public:
  explicit OverlappingSegments(const std::string& msg) : Error(msg) {}
};
class MissingFile : public Error {
public:
  explicit MissingFile(const std::string& msg) : Error(msg) {}
};
class Unmapped : public Error {
public:
  explicit Unmapped(const std::string& msg) : Error(msg) {}
};
class Misaligned : public Error {
public:
  explicit Misaligned(const std::string& msg) : Error(msg) {}
};
class WriteProtected : public Error {
public:
  explicit WriteProtected(const std::string& msg) : Error(msg) {}
};

// Ordered, non-overlapping segments plus an optional entry point.
class MemoryImage {
public:
  // Throws OverlappingSegments; executable segments must be 4-byte aligned.
  void add_segment(Segment seg);

  const std::vector<Segment>& segments() const { return segments_; }
  std::optional<uint64_t> entry() const { return entry_; }
  void set_entry(uint64_t e) { entry_ = e; }

  const Segment* find(uint64_t addr) const;
  Segment* find(uint64_t addr);
  bool mapped(uint64_t addr, uint64_t len = 1) const;

  // Little-endian word access. Throws Unmapped/Misaligned/WriteProtected.
  // write_word on a non-writable segment requires rewrite_mode.
  uint32_t read_word(uint64_t addr) const;
  void write_word(uint64_t addr, uint32_t value, bool rewrite_mode = false);

  // Non-throwing byte access for the emulator. Returns false when any byte
  // of the range is unmapped (or not writable, for writes).
  bool try_read(uint64_t addr, uint64_t len, uint64_t& out) const;
  bool try_write(uint64_t addr, uint64_t len, uint64_t value);

  // Base address of the lowest segment with the given source label.
  std::optional<uint64_t> object_base(const std::string& source) const;

private:
  std::vector<Segment> segments_;  // sorted by vaddr
  std::optional<uint64_t> entry_;
};

// ELF64 little-endian AArch64 program-header loader: one segment per PT_LOAD,
// bytes zero-padded to p_memsz, entry from e_entry. Throws MalformedElf.
MemoryImage load_elf(const std::string& path);

// Loads a JSON manifest: array of {"vaddr", "perms", "file"} records with
// addresses in decimal or "0x" hex strings. Throws MissingFile and
// OverlappingSegments.
MemoryImage load_manifest(const std::string& path);

// Writes `img` as manifest.json plus one blob per segment under `dir`.
// Blob names derive from segment addresses, so output is reproducible.
void write_manifest(const MemoryImage& img, const std::string& dir);

}  // namespace asch::image
