#include "kikuchi/vertex_set.hpp"

#include <iterator>
#include <stdexcept>

namespace kikuchi {

void VertexSet::normalize() {
    std::sort(elems_.begin(), elems_.end());
    elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

VertexSet VertexSet::from_mask(Mask m) {
    VertexSet s;
    s.elems_.reserve(static_cast<std::size_t>(popcount(m)));
    while (m != 0) {
        s.elems_.push_back(static_cast<Vertex>(__builtin_ctzll(m)));
        m &= m - 1;
    }
    return s;
}

bool VertexSet::is_subset_of(const VertexSet& other) const {
    return std::includes(other.elems_.begin(), other.elems_.end(), elems_.begin(), elems_.end());
}

std::size_t VertexSet::intersection_size(const VertexSet& other) const {
    std::size_t count = 0;
    auto a = elems_.begin();
    auto b = other.elems_.begin();
    while (a != elems_.end() && b != other.elems_.end()) {
        if (*a < *b) {
            ++a;
        } else if (*b < *a) {
            ++b;
        } else {
            ++count;
            ++a;
            ++b;
        }
    }
    return count;
}

Mask VertexSet::to_mask() const {
    Mask m = 0;
    for (Vertex v : elems_) {
        if (v >= 64) {
            throw std::out_of_range("vertex " + std::to_string(v) + " does not fit a 64-bit mask");
        }
        m |= Mask{1} << v;
    }
    return m;
}

std::string VertexSet::to_string() const {
    std::string out = "{";
    for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i != 0) {
            out += ',';
        }
        out += std::to_string(elems_[i] + 1);
    }
    out += '}';
    return out;
}

VertexSet symmetric_difference(const VertexSet& s, const VertexSet& t) {
    std::vector<Vertex> out;
    std::set_symmetric_difference(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(out));
    return VertexSet(std::move(out));
}

VertexSet set_union(const VertexSet& s, const VertexSet& t) {
    std::vector<Vertex> out;
    std::set_union(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(out));
    return VertexSet(std::move(out));
}

VertexSet set_difference(const VertexSet& s, const VertexSet& t) {
    std::vector<Vertex> out;
    std::set_difference(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(out));
    return VertexSet(std::move(out));
}

std::size_t degree(std::span<const VertexSet> edges, const VertexSet& q) {
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [&](const VertexSet& c) { return q.is_subset_of(c); }));
}

std::size_t VertexSetHash::operator()(const VertexSet& s) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (Vertex v : s) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

} // namespace kikuchi
