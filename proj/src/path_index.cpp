#include "cfpq/path_index.hpp"

#include <algorithm>

namespace cfpq {

std::size_t PathIndex::EntryKeyHash::operator()(const EntryKey& k) const noexcept {
  std::size_t h = hash_value(k.cell);
  h = hash_mix(h, pack(static_cast<std::uint32_t>(k.entry.kind), k.entry.value));
  return hash_mix(h, pack(k.entry.point.state.value, k.entry.point.vertex.value));
}

bool PathIndex::add(const Cell& cell, const IndexEntry& entry) {
  if (!seen_.insert({cell, entry}).second) return false;
  cells_[cell].push_back(entry);
  ++entry_count_;
  return true;
}

std::span<const IndexEntry> PathIndex::entries(const Cell& cell) const {
  auto it = cells_.find(cell);
  if (it == cells_.end()) return {};
  return it->second;
}

bool PathIndex::contains(const Cell& cell, const IndexEntry& entry) const {
  return seen_.contains({cell, entry});
}

std::vector<Cell> PathIndex::cells() const {
  std::vector<Cell> out;
  out.reserve(cells_.size());
  for (const auto& [cell, _] : cells_) out.push_back(cell);
  std::sort(out.begin(), out.end());
  return out;
}

bool operator==(const PathIndex& a, const PathIndex& b) {
  if (a.entry_count_ != b.entry_count_ || a.cells_.size() != b.cells_.size()) return false;
  // same entry count and a is a subset of b
  return std::all_of(a.seen_.begin(), a.seen_.end(),
                     [&](const PathIndex::EntryKey& k) { return b.seen_.contains(k); });
}

}  // namespace cfpq
