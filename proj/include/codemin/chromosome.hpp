#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codemin/rng.hpp"
#include "codemin/topology.hpp"

namespace codemin {

enum class Representation { BlockWise, BitWise };

const char* to_string(Representation r);
Representation parse_representation(const std::string& s);

/// One outgoing link of a merging node: `length` bits, one per incoming link.
struct Block {
  NodeId node;
  LinkId out_link;
  int length;
  int offset;
  std::vector<LinkId> in_links;  // bit i of the block refers to in_links[i]
};

/// Block structure shared by all chromosomes of one instance. Blocks are
/// sorted by (merging node, outgoing link); bits inside a block by incoming
/// link. Link ids refer to with_virtual_sinks(instance).
class Layout {
 public:
  Layout() = default;
  explicit Layout(std::vector<Block> blocks);

  std::span<const Block> blocks() const { return blocks_; }
  const Block& block(int i) const { return blocks_[i]; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  int bit_count() const { return bits_; }
  /// Fingerprint of the block structure, used to tag serialized chromosomes.
  std::uint64_t hash() const { return hash_; }

  friend bool operator==(const Layout& a, const Layout& b) { return a.blocks_.size() == b.blocks_.size() && a.hash_ == b.hash_; }

 private:
  std::vector<Block> blocks_;
  int bits_ = 0;
  std::uint64_t hash_ = 0;
};

Layout layout_of(const MulticastInstance& g);
Layout layout_of(const DecomposedGraph& dg);

class Chromosome {
 public:
  Chromosome() = default;
  explicit Chromosome(std::size_t bits, std::uint8_t value = 0) : bits_(bits, value) {}
  explicit Chromosome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

  static Chromosome all_one(const Layout& l) { return Chromosome(l.bit_count(), 1); }

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::uint8_t& operator[](std::size_t i) { return bits_[i]; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }
  std::span<const std::uint8_t> block(const Block& b) const {
    return std::span<const std::uint8_t>(bits_).subspan(b.offset, b.length);
  }
  std::span<std::uint8_t> block(const Block& b) {
    return std::span<std::uint8_t>(bits_).subspan(b.offset, b.length);
  }
  int popcount() const;

  /// "0101..." form, one character per bit.
  std::string to_bitstring() const;
  static Chromosome from_bitstring(const std::string& s);

  friend bool operator==(const Chromosome&, const Chromosome&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Hex encoding prefixed with the layout fingerprint: "<16 hex>:<bits hex>".
std::string to_hex(const Chromosome& c, const Layout& l);
/// Throws Error(Invalid) when the fingerprint or length does not match.
Chromosome from_hex(const std::string& text, const Layout& l);

/// Fitness value: number of coding links, or infeasible. Infeasible
/// orders after every finite value.
class Fitness {
 public:
  constexpr Fitness() = default;
  static constexpr Fitness finite(int count) { return Fitness(count); }
  static constexpr Fitness infeasible() { return Fitness(); }

  constexpr bool feasible() const { return value_.has_value(); }
  constexpr int count() const { return *value_; }

  friend constexpr bool operator==(const Fitness&, const Fitness&) = default;
  friend constexpr std::strong_ordering operator<=>(const Fitness& a, const Fitness& b) {
    if (a.feasible() != b.feasible()) {
      return a.feasible() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (!a.feasible()) return std::strong_ordering::equal;
    return a.count() <=> b.count();
  }

  std::string to_string() const { return feasible() ? std::to_string(count()) : "inf"; }

 private:
  constexpr explicit Fitness(int v) : value_(v) {}
  std::optional<int> value_;
};

int count_coding_links(const Chromosome& c, const Layout& l);

// Block strings allowed under the block-wise representation, indexed
// 0 = all zero, 1..k = unit vector at bit (index-1), k+1 = all one.
int allowed_block_strings(int length);
void write_block_string(std::span<std::uint8_t> block, int index);
/// Index of the block's string, or nullopt when it is not an allowed string.
std::optional<int> block_string_index(std::span<const std::uint8_t> block);
bool is_block_valid(const Chromosome& c, const Layout& l);

Chromosome sample_chromosome(const Layout& l, Representation repr, Rng& rng);

/// prod (k_i + 2) for block-wise, 2^m for bit-wise. Saturates at UINT64_MAX.
std::uint64_t search_space_size(const Layout& l, Representation repr);

}  // namespace codemin
