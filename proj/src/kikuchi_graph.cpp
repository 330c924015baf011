#include "kikuchi/kikuchi_graph.hpp"

#include <stdexcept>

namespace kikuchi {

std::string to_string(Variant v) {
    switch (v) {
    case Variant::basic_even:
        return "basic_even";
    case Variant::naive_odd:
        return "naive_odd";
    case Variant::regular_cs:
        return "regular_cs";
    case Variant::bipartite:
        return "bipartite";
    }
    return "unknown";
}

Variant variant_from_string(const std::string& s) {
    for (auto v : {Variant::basic_even, Variant::naive_odd, Variant::regular_cs, Variant::bipartite}) {
        if (to_string(v) == s) {
            return v;
        }
    }
    throw std::invalid_argument("unknown Kikuchi variant '" + s + "'");
}

VertexSpace::VertexSpace(std::vector<SpaceComponent> components) : components_(std::move(components)) {
    for (const auto& c : components_) {
        if (c.ground < 0 || c.ground > 64) {
            throw std::invalid_argument("vertex space ground sets must have at most 64 elements");
        }
        const BigInt count = binomial(c.ground, c.size);
        cardinality_ *= count;
        radix_.push_back(count > std::numeric_limits<std::uint64_t>::max() ? 0 : to_u64(count));
    }
}

std::uint64_t VertexSpace::size_u64() const { return to_u64(cardinality_); }

std::uint64_t VertexSpace::rank(std::span<const Mask> parts) const {
    if (parts.size() != components_.size()) {
        throw std::invalid_argument("vertex tuple has the wrong number of components");
    }
    (void)size_u64();
    std::uint64_t r = 0;
    std::uint64_t scale = 1;
    for (std::size_t c = 0; c < parts.size(); ++c) {
        r += rank_subset(parts[c]) * scale;
        scale *= radix_[c];
    }
    return r;
}

std::vector<Mask> VertexSpace::unrank(std::uint64_t r) const {
    std::vector<Mask> parts;
    parts.reserve(components_.size());
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const std::uint64_t local = radix_[c] == 0 ? 0 : r % radix_[c];
        r = radix_[c] == 0 ? 0 : r / radix_[c];
        parts.push_back(unrank_subset(local, components_[c].size, components_[c].ground));
    }
    return parts;
}

int KikuchiGraph::label_sign(std::size_t l, const Signs& b) const {
    const auto& lab = labels[l];
    int sign = b.at(lab.group);
    if (lab.partner != kNoPartner) {
        sign *= b.at(lab.partner);
    }
    return sign;
}

void KikuchiGraph::add_label(EdgeLabel label, std::span<const Edge> label_edges) {
    labels.push_back(std::move(label));
    edges.insert(edges.end(), label_edges.begin(), label_edges.end());
    offsets.push_back(edges.size());
}

BigInt edge_count_basic_even(int q, int n, int ell) {
    return binomial(q, q / 2) * binomial(n - q, ell - q / 2);
}

BigInt edge_count_naive_odd(int q, int n, int ell) {
    return binomial(q, (q - 1) / 2) * binomial(n - q, ell - (q - 1) / 2);
}

BigInt edge_count_regular_cs(int q, int n, int ell) {
    const BigInt one = binomial(q - 1, (q - 1) / 2) * binomial(n - (q - 1), ell - (q - 1) / 2);
    return one * one;
}

BigInt edge_count_bipartite(int q, int s, int n, int ell, std::size_t registry_size) {
    if (registry_size == 0) {
        return 0;
    }
    return binomial(q - s, (q - 1) / 2) * binomial(n - (q - s), ell - (q - 1) / 2) *
           binomial(static_cast<std::int64_t>(registry_size) - 1, ell);
}

std::pair<VertexSpace, VertexSpace> spaces_basic_even(int n, int ell) {
    return {VertexSpace({{n, ell}}), VertexSpace({{n, ell}})};
}

std::pair<VertexSpace, VertexSpace> spaces_naive_odd(int n, int ell) {
    return {VertexSpace({{n, ell}}), VertexSpace({{n, ell + 1}})};
}

std::pair<VertexSpace, VertexSpace> spaces_regular_cs(int n, int ell) {
    VertexSpace pair({{n, ell}, {n, ell}});
    return {pair, pair};
}

std::pair<VertexSpace, VertexSpace> spaces_bipartite(int n, int s, int ell, std::size_t registry_size) {
    const int p = static_cast<int>(registry_size);
    return {VertexSpace({{n, ell}, {p, ell, Domain::y}}),
            VertexSpace({{n, std::max(ell + 1 - s, 0)}, {p, ell + 1, Domain::y}})};
}

namespace {

void require_ground(int n) {
    if (n < 0 || n > 64) {
        throw std::invalid_argument("Kikuchi builders need 0 <= n <= 64");
    }
}

// All (S, S ⊕ C) with |S ∩ C| = inside and |S| = ell, as masks.
template <typename F>
void for_each_split(Mask c, int n, int ell, int inside, F&& f) {
    const Mask outside_pool = full_mask(n) & ~c;
    const int outside = ell - inside;
    if (inside < 0 || outside < 0) {
        return;
    }
    for_each_subset_of(c, inside, [&](Mask a) {
        for_each_subset_of(outside_pool, outside, [&](Mask r) { f(a | r, (c & ~a) | r); });
    });
}

} // namespace

EdgeList build_basic_even(const VertexSet& c, int n, int ell) {
    require_ground(n);
    if (c.size() % 2 != 0) {
        throw std::invalid_argument("basic Kikuchi graph needs an even-size constraint; odd |C| has no edges");
    }
    EdgeList out;
    for_each_split(c.to_mask(), n, ell, static_cast<int>(c.size() / 2), [&](Mask s, Mask t) {
        out.push_back({rank_subset(s), rank_subset(t)});
    });
    return out;
}

EdgeList build_naive_odd(const VertexSet& c, int n, int ell) {
    require_ground(n);
    if (c.size() % 2 == 0) {
        throw std::invalid_argument("naive odd Kikuchi graph needs an odd-size constraint");
    }
    EdgeList out;
    for_each_split(c.to_mask(), n, ell, static_cast<int>((c.size() - 1) / 2), [&](Mask s, Mask t) {
        out.push_back({rank_subset(s), rank_subset(t)});
    });
    return out;
}

EdgeList build_regular_cs(const VertexSet& c1, const VertexSet& c2, int n, int ell) {
    require_ground(n);
    if (c1.size() != c2.size() || c1.size() % 2 != 0) {
        throw std::invalid_argument("regular Kikuchi labels need |C1| = |C2| = q-1 (even)");
    }
    const VertexSpace space = spaces_regular_cs(n, ell).first;
    const int half = static_cast<int>(c1.size() / 2);
    std::vector<std::pair<Mask, Mask>> first;
    std::vector<std::pair<Mask, Mask>> second;
    for_each_split(c1.to_mask(), n, ell, half, [&](Mask s, Mask t) { first.emplace_back(s, t); });
    for_each_split(c2.to_mask(), n, ell, half, [&](Mask s, Mask t) { second.emplace_back(s, t); });
    EdgeList out;
    out.reserve(first.size() * second.size());
    for (const auto& [s1, t1] : first) {
        for (const auto& [s2, t2] : second) {
            const std::array<Mask, 2> l{s1, s2};
            const std::array<Mask, 2> r{t1, t2};
            out.push_back({space.rank(l), space.rank(r)});
        }
    }
    return out;
}

EdgeList build_bipartite(const VertexSet& c, std::uint32_t p, int q, int s, int n, int ell,
                         std::size_t registry_size) {
    require_ground(n);
    if (registry_size > 64) {
        throw std::invalid_argument("bipartite Kikuchi builder needs at most 64 labels");
    }
    if (p >= registry_size) {
        throw std::invalid_argument("bipartite label is not registered");
    }
    if (c.size() != static_cast<std::size_t>(q - s)) {
        throw std::invalid_argument("bipartite constraint must have q-s left vertices");
    }
    EdgeList out;
    if (ell + 1 - s < 0) {
        return out;
    }
    const auto [lspace, rspace] = spaces_bipartite(n, s, ell, registry_size);
    const Mask p_bit = Mask{1} << p;
    const Mask others = full_mask(static_cast<int>(registry_size)) & ~p_bit;
    std::vector<Mask> s2_choices;
    for_each_subset_of(others, ell, [&](Mask s2) { s2_choices.push_back(s2); });
    for_each_split(c.to_mask(), n, ell, (q - 1) / 2, [&](Mask s1, Mask t1) {
        for (Mask s2 : s2_choices) {
            const std::array<Mask, 2> l{s1, s2};
            const std::array<Mask, 2> r{t1, s2 | p_bit};
            out.push_back({lspace.rank(l), rspace.rank(r)});
        }
    });
    return out;
}

KikuchiGraph assemble_basic_even(const XorInstance& inst, int ell) {
    KikuchiGraph g;
    g.variant = Variant::basic_even;
    g.n = inst.n;
    g.q = inst.q;
    g.ell = ell;
    g.num_groups = inst.k();
    std::tie(g.left, g.right) = spaces_basic_even(inst.n, ell);
    g.D = edge_count_basic_even(inst.q, inst.n, ell);
    for (std::size_t i = 0; i < inst.k(); ++i) {
        for (const auto& c : inst.hypergraphs[i]) {
            EdgeLabel lab;
            lab.group = static_cast<std::uint32_t>(i);
            lab.c1 = c;
            const auto e = build_basic_even(c, inst.n, ell);
            g.add_label(std::move(lab), e);
        }
    }
    return g;
}

KikuchiGraph assemble_naive_odd(const XorInstance& inst, int ell) {
    KikuchiGraph g;
    g.variant = Variant::naive_odd;
    g.n = inst.n;
    g.q = inst.q;
    g.ell = ell;
    g.num_groups = inst.k();
    std::tie(g.left, g.right) = spaces_naive_odd(inst.n, ell);
    g.D = edge_count_naive_odd(inst.q, inst.n, ell);
    for (std::size_t i = 0; i < inst.k(); ++i) {
        for (const auto& c : inst.hypergraphs[i]) {
            EdgeLabel lab;
            lab.group = static_cast<std::uint32_t>(i);
            lab.c1 = c;
            const auto e = build_naive_odd(c, inst.n, ell);
            g.add_label(std::move(lab), e);
        }
    }
    return g;
}

KikuchiGraph assemble_regular_cs(int n, int q, int ell, std::size_t k, const std::vector<EdgeLabel>& labels) {
    KikuchiGraph g;
    g.variant = Variant::regular_cs;
    g.n = n;
    g.q = q;
    g.ell = ell;
    g.num_groups = k;
    std::tie(g.left, g.right) = spaces_regular_cs(n, ell);
    g.D = edge_count_regular_cs(q, n, ell);
    for (const auto& lab : labels) {
        if (lab.group == lab.partner) {
            throw std::invalid_argument("regular Kikuchi labels need i != j");
        }
        const auto e = build_regular_cs(lab.c1, lab.c2, n, ell);
        g.add_label(lab, e);
    }
    return g;
}

KikuchiGraph assemble_bipartite(const BipartiteXorInstance& inst, int ell) {
    KikuchiGraph g;
    g.variant = Variant::bipartite;
    g.n = inst.n;
    g.q = inst.q;
    g.s = inst.s;
    g.ell = ell;
    g.num_groups = inst.k();
    g.registry_size = inst.num_labels();
    std::tie(g.left, g.right) = spaces_bipartite(inst.n, inst.s, ell, inst.num_labels());
    g.D = edge_count_bipartite(inst.q, inst.s, inst.n, ell, inst.num_labels());
    for (std::size_t i = 0; i < inst.k(); ++i) {
        for (const auto& e : inst.hypergraphs[i]) {
            EdgeLabel lab;
            lab.group = static_cast<std::uint32_t>(i);
            lab.c1 = e.left;
            lab.p = e.label;
            const auto edges = build_bipartite(e.left, e.label, inst.q, inst.s, inst.n, ell, inst.num_labels());
            g.add_label(std::move(lab), edges);
        }
    }
    return g;
}

int lift_assignment(const VertexSpace& space, std::uint64_t vertex, const Signs& x, const Signs& y) {
    const auto parts = space.unrank(vertex);
    int sign = 1;
    for (std::size_t c = 0; c < parts.size(); ++c) {
        const Signs& a = space.components()[c].domain == Domain::x ? x : y;
        Mask m = parts[c];
        while (m != 0) {
            const auto v = static_cast<std::size_t>(__builtin_ctzll(m));
            sign *= a.at(v);
            m &= m - 1;
        }
    }
    return sign;
}

int label_monomial(const KikuchiGraph& g, std::size_t l, const Signs& x, const Signs& y) {
    const auto& lab = g.labels[l];
    int m = monomial(x, lab.c1);
    if (g.variant == Variant::regular_cs) {
        m *= monomial(x, lab.c2);
    } else if (g.variant == Variant::bipartite) {
        m *= y.at(lab.p);
    }
    return m;
}

QuadraticForm quadratic_form(const KikuchiGraph& g, const Signs& b, const Signs& x, const Signs& y) {
    QuadraticForm out;
    out.per_label.reserve(g.labels.size());
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        std::int64_t sum = 0;
        for (const auto& e : g.label_edges(l)) {
            sum += lift_assignment(g.left, e.left, x, y) * lift_assignment(g.right, e.right, x, y);
        }
        sum *= g.label_sign(l, b);
        out.per_label.push_back(sum);
        out.total += sum;
    }
    return out;
}

bool check_quadratic_form(const KikuchiGraph& g, const Signs& b, const Signs& x, const Signs& y) {
    const auto form = quadratic_form(g, b, x, y);
    const auto d = static_cast<std::int64_t>(to_u64(g.D));
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        if (form.per_label[l] != d * g.label_sign(l, b) * label_monomial(g, l, x, y)) {
            return false;
        }
    }
    return true;
}

namespace {

bool split_ok(Mask s, Mask t, Mask c, int inside) {
    return (s ^ t) == c && popcount(s & c) == inside;
}

} // namespace

std::size_t count_predicate_violations(const KikuchiGraph& g) {
    std::size_t bad = 0;
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        const auto& lab = g.labels[l];
        for (const auto& e : g.label_edges(l)) {
            const auto left = g.left.unrank(e.left);
            const auto right = g.right.unrank(e.right);
            bool ok = false;
            const Mask c1 = lab.c1.to_mask();
            switch (g.variant) {
            case Variant::basic_even:
            case Variant::naive_odd:
                ok = (left[0] ^ right[0]) == c1;
                break;
            case Variant::regular_cs:
                ok = (left[0] ^ right[0]) == c1 && (left[1] ^ right[1]) == lab.c2.to_mask() && left != right;
                break;
            case Variant::bipartite:
                ok = split_ok(left[0], right[0], c1, (g.q - 1) / 2) && (left[1] ^ right[1]) == (Mask{1} << lab.p) &&
                     (right[1] & (Mask{1} << lab.p)) != 0;
                break;
            }
            bad += ok ? 0 : 1;
        }
    }
    return bad;
}

std::size_t count_edge_count_mismatches(const KikuchiGraph& g) {
    std::size_t bad = 0;
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        if (BigInt(g.label_edges(l).size()) != g.D) {
            ++bad;
        }
    }
    return bad;
}

std::vector<double> matvec(const KikuchiGraph& g, const Signs& b, std::span<const double> v, Side side) {
    const auto in_size = side == Side::forward ? g.right.size_u64() : g.left.size_u64();
    const auto out_size = side == Side::forward ? g.left.size_u64() : g.right.size_u64();
    if (v.size() != in_size) {
        throw std::invalid_argument("matvec: vector length does not match the vertex space");
    }
    std::vector<double> out(out_size, 0.0);
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        const double w = g.label_sign(l, b);
        for (const auto& e : g.label_edges(l)) {
            if (side == Side::forward) {
                out[e.left] += w * v[e.right];
            } else {
                out[e.right] += w * v[e.left];
            }
        }
    }
    return out;
}

SparseVector matvec_sparse(const KikuchiGraph& g, const Signs& b, const SparseVector& v, Side side) {
    SparseVector out;
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        const double w = g.label_sign(l, b);
        for (const auto& e : g.label_edges(l)) {
            const auto from = side == Side::forward ? e.right : e.left;
            const auto to = side == Side::forward ? e.left : e.right;
            if (auto it = v.find(from); it != v.end()) {
                out[to] += w * it->second;
            }
        }
    }
    return out;
}

} // namespace kikuchi
