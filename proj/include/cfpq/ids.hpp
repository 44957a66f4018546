#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace cfpq {

// Dense integer handle that does not mix with handles of other kinds.
template <class Tag>
struct StrongId {
  std::uint32_t value{};

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
};

using VertexId = StrongId<struct VertexTag>;
using LabelId = StrongId<struct LabelTag>;
using StateId = StrongId<struct StateTag>;

inline constexpr std::uint64_t pack(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

inline std::size_t hash_mix(std::size_t seed, std::uint64_t v) {
  // splitmix64 finalizer folded into a running seed
  v += 0x9e3779b97f4a7c15ULL + seed;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return static_cast<std::size_t>(v ^ (v >> 31));
}

}  // namespace cfpq

template <class Tag>
struct std::hash<cfpq::StrongId<Tag>> {
  std::size_t operator()(cfpq::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
