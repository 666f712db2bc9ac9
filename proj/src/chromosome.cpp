#include "codemin/chromosome.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "codemin/error.hpp"

namespace codemin {

const char* to_string(Representation r) { return r == Representation::BlockWise ? "block" : "bit"; }

Representation parse_representation(const std::string& s) {
  if (s == "block" || s == "block-wise" || s == "blockwise") return Representation::BlockWise;
  if (s == "bit" || s == "bit-wise" || s == "bitwise") return Representation::BitWise;
  throw Error(ErrorKind::Invalid, "unknown representation '" + s + "' (expected block|bit)");
}

Layout::Layout(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  // FNV-1a over the structural fields
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::int64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= static_cast<std::uint8_t>(v >> (8 * i));
      h *= 0x100000001b3ULL;
    }
  };
  for (Block& b : blocks_) {
    b.offset = bits_;
    bits_ += b.length;
    feed(b.node);
    feed(b.out_link);
    for (LinkId e : b.in_links) feed(e);
  }
  feed(bits_);
  hash_ = h;
}

Layout layout_of(const DecomposedGraph& dg) {
  std::vector<Block> blocks;
  for (const InterAuxLink& x : dg.inter_aux_links) {
    if (blocks.empty() || blocks.back().node != x.node || blocks.back().out_link != x.out_link) {
      blocks.push_back({x.node, x.out_link, 0, 0, {}});
    }
    blocks.back().in_links.push_back(x.in_link);
    ++blocks.back().length;
  }
  return Layout(std::move(blocks));
}

Layout layout_of(const MulticastInstance& g) { return layout_of(decompose(g)); }

int Chromosome::popcount() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string Chromosome::to_bitstring() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

Chromosome Chromosome::from_bitstring(const std::string& s) {
  std::vector<std::uint8_t> bits;
  for (char c : s) {
    if (c != '0' && c != '1') throw Error(ErrorKind::Invalid, "bit string may only contain 0/1");
    bits.push_back(c == '1');
  }
  return Chromosome(std::move(bits));
}

std::string to_hex(const Chromosome& c, const Layout& l) {
  char prefix[20];
  std::snprintf(prefix, sizeof prefix, "%016llx", static_cast<unsigned long long>(l.hash()));
  std::string out(prefix);
  out.push_back(':');
  static constexpr char kDigits[] = "0123456789abcdef";
  for (std::size_t i = 0; i < c.size(); i += 4) {
    int nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < c.size() && c[i + j]) nibble |= 1;
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

Chromosome from_hex(const std::string& text, const Layout& l) {
  const auto colon = text.find(':');
  if (colon != 16) throw Error(ErrorKind::Invalid, "chromosome hex must look like <16 hex>:<bits>");
  const std::uint64_t h = std::stoull(text.substr(0, 16), nullptr, 16);
  if (h != l.hash()) {
    throw Error(ErrorKind::Invalid, "chromosome was serialized for a different topology layout");
  }
  const std::string body = text.substr(17);
  const auto m = static_cast<std::size_t>(l.bit_count());
  if (body.size() != (m + 3) / 4) {
    throw Error(ErrorKind::Invalid, "chromosome hex has wrong length for this layout");
  }
  Chromosome c(m);
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char ch = body[i];
    int v;
    if (ch >= '0' && ch <= '9') v = ch - '0';
    else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
    else throw Error(ErrorKind::Invalid, "chromosome hex has a non-hex digit");
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t bit = 4 * i + j;
      const bool set = (v >> (3 - j)) & 1;
      if (bit < m) c[bit] = set;
      else if (set) throw Error(ErrorKind::Invalid, "chromosome hex has padding bits set");
    }
  }
  return c;
}

int count_coding_links(const Chromosome& c, const Layout& l) {
  int coding = 0;
  for (const Block& b : l.blocks()) {
    auto block = c.block(b);
    if (std::count(block.begin(), block.end(), std::uint8_t{1}) >= 2) ++coding;
  }
  return coding;
}

int allowed_block_strings(int length) { return length + 2; }

void write_block_string(std::span<std::uint8_t> block, int index) {
  const int k = static_cast<int>(block.size());
  if (index == k + 1) {
    std::fill(block.begin(), block.end(), std::uint8_t{1});
    return;
  }
  std::fill(block.begin(), block.end(), std::uint8_t{0});
  if (index >= 1) block[index - 1] = 1;
}

std::optional<int> block_string_index(std::span<const std::uint8_t> block) {
  const int k = static_cast<int>(block.size());
  int ones = 0, last = -1;
  for (int i = 0; i < k; ++i) {
    if (block[i]) {
      ++ones;
      last = i;
    }
  }
  if (ones == 0) return 0;
  if (ones == k) return k + 1;
  if (ones == 1) return last + 1;
  return std::nullopt;
}

bool is_block_valid(const Chromosome& c, const Layout& l) {
  if (c.size() != static_cast<std::size_t>(l.bit_count())) return false;
  return std::all_of(l.blocks().begin(), l.blocks().end(),
                     [&](const Block& b) { return block_string_index(c.block(b)).has_value(); });
}

Chromosome sample_chromosome(const Layout& l, Representation repr, Rng& rng) {
  Chromosome c(l.bit_count());
  if (repr == Representation::BitWise) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<std::uint8_t>(rng.below(2));
    return c;
  }
  for (const Block& b : l.blocks()) {
    write_block_string(c.block(b), static_cast<int>(rng.below(allowed_block_strings(b.length))));
  }
  return c;
}

std::uint64_t search_space_size(const Layout& l, Representation repr) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t size = 1;
  for (const Block& b : l.blocks()) {
    const std::uint64_t factor =
        repr == Representation::BlockWise
            ? static_cast<std::uint64_t>(b.length + 2)
            : (b.length >= 64 ? kMax : (std::uint64_t{1} << b.length));
    if (size > kMax / factor) return kMax;
    size *= factor;
  }
  return size;
}

}  // namespace codemin
