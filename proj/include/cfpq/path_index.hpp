#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cfpq/ids.hpp"

namespace cfpq {

/// A (state, vertex) pair: one row or column of the path index.
struct Point {
  StateId state;
  VertexId vertex;

  friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

/// Matched range R^{from}_{to}, or the empty range.
struct Range {
  bool empty = true;
  Point from;
  Point to;

  static Range epsilon() { return {}; }
  static Range of(Point from, Point to) { return {false, from, to}; }

  friend constexpr auto operator<=>(const Range&, const Range&) = default;
};

struct Cell {
  Point from;
  Point to;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

struct IndexEntry {
  enum class Kind : std::uint8_t { Terminal, Nonterminal, Epsilon, Intermediate };

  Kind kind = Kind::Epsilon;
  std::uint32_t value = 0;  // LabelId for Terminal, box index for Nonterminal
  Point point;              // Intermediate only

  static IndexEntry terminal(LabelId l) { return {Kind::Terminal, l.value, {}}; }
  static IndexEntry nonterminal(std::size_t box) {
    return {Kind::Nonterminal, static_cast<std::uint32_t>(box), {}};
  }
  static IndexEntry epsilon() { return {}; }
  static IndexEntry intermediate(Point p) { return {Kind::Intermediate, 0, p}; }

  friend constexpr auto operator<=>(const IndexEntry&, const IndexEntry&) = default;
};

inline std::size_t hash_value(const Point& p) { return hash_mix(0, pack(p.state.value, p.vertex.value)); }
inline std::size_t hash_value(const Cell& c) { return hash_mix(hash_value(c.from), pack(c.to.state.value, c.to.vertex.value)); }
inline std::size_t hash_value(const Range& r) {
  return r.empty ? 0x51ed27u : hash_value(Cell{r.from, r.to});
}

struct PointHash {
  std::size_t operator()(const Point& p) const noexcept { return hash_value(p); }
};
struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept { return hash_value(c); }
};
struct RangeHash {
  std::size_t operator()(const Range& r) const noexcept { return hash_value(r); }
};

/// Sparse path index: each non-empty cell holds the set of ways its range was built.
/// Entries keep insertion order; equality is set equality per cell.
class PathIndex {
 public:
  /// Returns false when the entry was already present.
  bool add(const Cell& cell, const IndexEntry& entry);

  std::span<const IndexEntry> entries(const Cell& cell) const;
  bool contains(const Cell& cell) const { return cells_.contains(cell); }
  bool contains(const Cell& cell, const IndexEntry& entry) const;
  std::size_t cell_count() const { return cells_.size(); }
  std::size_t entry_count() const { return entry_count_; }

  /// Non-empty cells in ascending order.
  std::vector<Cell> cells() const;

  friend bool operator==(const PathIndex& a, const PathIndex& b);

 private:
  struct EntryKey {
    Cell cell;
    IndexEntry entry;
    friend bool operator==(const EntryKey&, const EntryKey&) = default;
  };
  struct EntryKeyHash {
    std::size_t operator()(const EntryKey& k) const noexcept;
  };

  std::unordered_map<Cell, std::vector<IndexEntry>, CellHash> cells_;
  std::unordered_set<EntryKey, EntryKeyHash> seen_;
  std::size_t entry_count_ = 0;
};

}  // namespace cfpq
