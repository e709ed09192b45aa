#include "asch/image.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace asch::image {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Perms::to_string() const {
  std::string s;
  s += r ? 'r' : '-';
  s += w ? 'w' : '-';
  s += x ? 'x' : '-';
  return s;
}

Perms Perms::parse(const std::string& s) {
  Perms p;
  for (char c : s) {
    switch (c) {
      case 'r': p.r = true; break;
      case 'w': p.w = true; break;
      case 'x': p.x = true; break;
      case '-': break;
      case 'p': break;  // procfs private flag, irrelevant here
      default: throw Error(std::string("bad permission flag '") + c + "'");
    }
  }
  return p;
}

void MemoryImage::add_segment(Segment seg) {
  if (seg.perms.x && seg.vaddr % 4 != 0)
    throw Misaligned("executable segment at unaligned address " + hex(seg.vaddr));
  for (const auto& s : segments_) {
    const bool disjoint = seg.end() <= s.vaddr || seg.vaddr >= s.end();
    if (!disjoint)
      throw OverlappingSegments("segment at " + hex(seg.vaddr) + " overlaps segment at " +
                                hex(s.vaddr));
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), seg.vaddr,
                             [](uint64_t a, const Segment& s) { return a < s.vaddr; });
  segments_.insert(it, std::move(seg));
}

const Segment* MemoryImage::find(uint64_t addr) const {
  for (const auto& s : segments_)
    if (s.contains(addr)) return &s;
  return nullptr;
}

Segment* MemoryImage::find(uint64_t addr) {
  for (auto& s : segments_)
    if (s.contains(addr)) return &s;
  return nullptr;
}

bool MemoryImage::mapped(uint64_t addr, uint64_t len) const {
  const Segment* s = find(addr);
  return s && addr + len <= s->end();
}

uint32_t MemoryImage::read_word(uint64_t addr) const {
  if (addr % 4 != 0) throw Misaligned("word read at " + hex(addr));
  const Segment* s = find(addr);
  if (!s || addr + 4 > s->end()) throw Unmapped("word read at " + hex(addr));
  const size_t off = addr - s->vaddr;
  return static_cast<uint32_t>(s->bytes[off]) | (static_cast<uint32_t>(s->bytes[off + 1]) << 8) |
         (static_cast<uint32_t>(s->bytes[off + 2]) << 16) |
         (static_cast<uint32_t>(s->bytes[off + 3]) << 24);
}

void MemoryImage::write_word(uint64_t addr, uint32_t value, bool rewrite_mode) {
  if (addr % 4 != 0) throw Misaligned("word write at " + hex(addr));
  Segment* s = find(addr);
  if (!s || addr + 4 > s->end()) throw Unmapped("word write at " + hex(addr));
  if (!s->perms.w && !rewrite_mode) throw WriteProtected("word write at " + hex(addr));
  const size_t off = addr - s->vaddr;
  s->bytes[off] = static_cast<uint8_t>(value);
  s->bytes[off + 1] = static_cast<uint8_t>(value >> 8);
  s->bytes[off + 2] = static_cast<uint8_t>(value >> 16);
  s->bytes[off + 3] = static_cast<uint8_t>(value >> 24);
}

bool MemoryImage::try_read(uint64_t addr, uint64_t len, uint64_t& out) const {
  const Segment* s = find(addr);
  if (!s || addr + len > s->end() || !s->perms.r) return false;
  const size_t off = addr - s->vaddr;
  uint64_t v = 0;
  for (uint64_t i = 0; i < len; ++i) v |= static_cast<uint64_t>(s->bytes[off + i]) << (8 * i);
  out = v;
  return true;
}

bool MemoryImage::try_write(uint64_t addr, uint64_t len, uint64_t value) {
  Segment* s = find(addr);
  if (!s || addr + len > s->end() || !s->perms.w) return false;
  const size_t off = addr - s->vaddr;
  for (uint64_t i = 0; i < len; ++i) s->bytes[off + i] = static_cast<uint8_t>(value >> (8 * i));
  return true;
}

std::optional<uint64_t> MemoryImage::object_base(const std::string& source) const {
  std::optional<uint64_t> base;
  for (const auto& s : segments_)
    if (s.source == source && (!base || s.vaddr < *base)) base = s.vaddr;
  return base;
}

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

template <typename T>
T read_at(const std::vector<uint8_t>& d, size_t off, const char* what) {
  if (off + sizeof(T) > d.size()) throw MalformedElf(std::string("truncated ") + what);
  T v;
  std::memcpy(&v, d.data() + off, sizeof(T));
  return v;
}

}  // namespace

MemoryImage load_elf(const std::string& path) {
  const auto d = read_file(path);
  if (d.size() < 64) throw MalformedElf("file too small for ELF64 header");
  if (d[0] != 0x7F || d[1] != 'E' || d[2] != 'L' || d[3] != 'F')
    throw MalformedElf("bad ELF magic");
  if (d[4] != 2) throw MalformedElf("not ELFCLASS64");
  if (d[5] != 1) throw MalformedElf("not little-endian");
  const uint16_t machine = read_at<uint16_t>(d, 0x12, "e_machine");
  if (machine != 183) throw MalformedElf("machine is not AArch64");
  const uint64_t e_entry = read_at<uint64_t>(d, 0x18, "e_entry");
  const uint64_t e_phoff = read_at<uint64_t>(d, 0x20, "e_phoff");
  const uint16_t e_phentsize = read_at<uint16_t>(d, 0x36, "e_phentsize");
  const uint16_t e_phnum = read_at<uint16_t>(d, 0x38, "e_phnum");
  if (e_phentsize < 56) throw MalformedElf("bad e_phentsize");

  MemoryImage img;
  for (uint16_t i = 0; i < e_phnum; ++i) {
    const size_t ph = e_phoff + static_cast<size_t>(i) * e_phentsize;
    const uint32_t p_type = read_at<uint32_t>(d, ph, "p_type");
    if (p_type != 1) continue;  // PT_LOAD
    const uint32_t p_flags = read_at<uint32_t>(d, ph + 4, "p_flags");
    const uint64_t p_offset = read_at<uint64_t>(d, ph + 8, "p_offset");
    const uint64_t p_vaddr = read_at<uint64_t>(d, ph + 16, "p_vaddr");
    const uint64_t p_filesz = read_at<uint64_t>(d, ph + 32, "p_filesz");
    const uint64_t p_memsz = read_at<uint64_t>(d, ph + 40, "p_memsz");
    if (p_offset + p_filesz > d.size()) throw MalformedElf("PT_LOAD exceeds file");
    if (p_filesz > p_memsz) throw MalformedElf("p_filesz > p_memsz");

    Segment seg;
    seg.vaddr = p_vaddr;
    seg.perms = {.r = (p_flags & 4) != 0, .w = (p_flags & 2) != 0, .x = (p_flags & 1) != 0};
    seg.source = path;
    seg.bytes.assign(d.begin() + p_offset, d.begin() + p_offset + p_filesz);
    seg.bytes.resize(p_memsz, 0);
    img.add_segment(std::move(seg));
  }
  img.set_entry(e_entry);
  return img;
}

MemoryImage load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path);
  json doc = json::parse(in);
  if (!doc.is_array()) throw Error("manifest must be a JSON array");

  const fs::path dir = fs::path(path).parent_path();
  MemoryImage img;
  for (const auto& rec : doc) {
    Segment seg;
    const auto& va = rec.at("vaddr");
    seg.vaddr = va.is_string() ? parse_u64(va.get<std::string>()) : va.get<uint64_t>();
    seg.perms = Perms::parse(rec.at("perms").get<std::string>());
    const std::string file = rec.at("file").get<std::string>();
    seg.source = file;
    seg.bytes = read_file((dir / file).string());
    img.add_segment(std::move(seg));
  }
  return img;
}

void write_manifest(const MemoryImage& img, const std::string& dir) {
  fs::create_directories(dir);
  json doc = json::array();
  for (const auto& seg : img.segments()) {
    const std::string name = "seg_" + hex(seg.vaddr) + ".bin";
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    out.write(reinterpret_cast<const char*>(seg.bytes.data()),
              static_cast<std::streamsize>(seg.bytes.size()));
    doc.push_back({{"vaddr", hex(seg.vaddr)}, {"perms", seg.perms.to_string()}, {"file", name}});
  }
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << doc.dump(2) << "\n";
}

}  // namespace asch::image
