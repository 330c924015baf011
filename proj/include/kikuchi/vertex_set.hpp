#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace kikuchi {

using Vertex = std::uint32_t;

/// Bitmask view of a subset of a ground set with at most 64 elements.
using Mask = std::uint64_t;

/// A finite set of 0-based vertex indices, stored sorted and duplicate free.
///
/// Ordering is lexicographic on the sorted element list, which is the order
/// used wherever the library has to pick "the smallest" set deterministically.
class VertexSet {
public:
    VertexSet() = default;
    VertexSet(std::initializer_list<Vertex> vs) : elems_(vs) { normalize(); }
    explicit VertexSet(std::vector<Vertex> vs) : elems_(std::move(vs)) { normalize(); }

    static VertexSet from_mask(Mask m);

    [[nodiscard]] std::size_t size() const noexcept { return elems_.size(); }
    [[nodiscard]] bool empty() const noexcept { return elems_.empty(); }
    [[nodiscard]] auto begin() const noexcept { return elems_.begin(); }
    [[nodiscard]] auto end() const noexcept { return elems_.end(); }
    [[nodiscard]] Vertex operator[](std::size_t i) const { return elems_[i]; }
    [[nodiscard]] const std::vector<Vertex>& elements() const noexcept { return elems_; }

    [[nodiscard]] bool contains(Vertex v) const { return std::binary_search(elems_.begin(), elems_.end(), v); }
    [[nodiscard]] bool is_subset_of(const VertexSet& other) const;
    [[nodiscard]] std::size_t intersection_size(const VertexSet& other) const;
    [[nodiscard]] bool disjoint_from(const VertexSet& other) const { return intersection_size(other) == 0; }

    /// Requires every element < 64.
    [[nodiscard]] Mask to_mask() const;

    [[nodiscard]] std::string to_string() const;

    friend auto operator<=>(const VertexSet&, const VertexSet&) = default;
    friend bool operator==(const VertexSet&, const VertexSet&) = default;

private:
    void normalize();
    std::vector<Vertex> elems_;
};

[[nodiscard]] VertexSet symmetric_difference(const VertexSet& s, const VertexSet& t);
[[nodiscard]] VertexSet set_union(const VertexSet& s, const VertexSet& t);
[[nodiscard]] VertexSet set_difference(const VertexSet& s, const VertexSet& t);

/// Number of hyperedges in `edges` containing `q`, counted with multiplicity.
[[nodiscard]] std::size_t degree(std::span<const VertexSet> edges, const VertexSet& q);

struct VertexSetHash {
    std::size_t operator()(const VertexSet& s) const noexcept;
};

inline int popcount(Mask m) noexcept { return __builtin_popcountll(m); }

} // namespace kikuchi
