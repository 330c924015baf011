#include "kikuchi/prune.hpp"

#include "kikuchi/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace kikuchi {

TargetDegrees target_degrees_regular(int n, int q, int ell, std::size_t k, std::size_t delta_n, const BigInt& D) {
    TargetDegrees t;
    t.delta_n = delta_n;
    const BigInt side = binomial(n, ell);
    const BigInt N = side * side;
    t.left = Rational(BigInt(delta_n) * BigInt(k) * D, N);
    t.right = t.left;
    t.analytic_left = std::pow(static_cast<double>(ell) / n, q - 1) * static_cast<double>(delta_n) * static_cast<double>(k);
    t.analytic_right = t.analytic_left;
    return t;
}

TargetDegrees target_degrees_bipartite(int n, int q, int s, int ell, std::size_t registry_size, std::size_t delta_n,
                                       const BigInt& D) {
    TargetDegrees t;
    t.delta_n = delta_n;
    const auto p = static_cast<std::int64_t>(registry_size);
    const BigInt nl = binomial(n, ell) * binomial(p, ell);
    const BigInt nr = binomial(n, ell + 1 - s) * binomial(p, ell + 1);
    t.left = nl == 0 ? Rational(0) : Rational(BigInt(delta_n) * D, nl);
    t.right = nr == 0 ? Rational(0) : Rational(BigInt(delta_n) * D, nr);
    const double ratio = static_cast<double>(ell) / n;
    t.analytic_left = std::pow(ratio, (q - 1) / 2.0) * static_cast<double>(delta_n);
    t.analytic_right = registry_size == 0 ? 0.0
                                          : std::pow(ratio, (q + 1) / 2.0 - s) *
                                                (static_cast<double>(ell) / static_cast<double>(registry_size)) *
                                                static_cast<double>(delta_n);
    return t;
}

DegreeProfile degree_profile(const KikuchiGraph& g) {
    DegreeProfile prof;
    prof.left.resize(g.num_groups);
    prof.right.resize(g.num_groups);
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        const auto grp = g.labels[l].group;
        auto& lm = prof.left.at(grp);
        auto& rm = prof.right.at(grp);
        for (const auto& e : g.label_edges(l)) {
            prof.max_left = std::max(prof.max_left, ++lm[e.left]);
            prof.max_right = std::max(prof.max_right, ++rm[e.right]);
        }
    }
    return prof;
}

MomentEstimate conditional_degree_moment(const KikuchiGraph& g, const DegreeProfile& profile, std::size_t label,
                                         Endpoint side, std::size_t samples, std::uint64_t seed,
                                         std::size_t exhaustive_limit) {
    const auto edges = g.label_edges(label);
    if (edges.empty()) {
        throw std::invalid_argument("conditional_degree_moment: label has no edges");
    }
    const auto grp = g.labels[label].group;
    const auto& map = side == Endpoint::left ? profile.left.at(grp) : profile.right.at(grp);
    auto deg_of = [&](const Edge& e) {
        return static_cast<double>(map.at(side == Endpoint::left ? e.left : e.right));
    };
    MomentEstimate out;
    double sum = 0.0;
    double sq = 0.0;
    if (edges.size() <= exhaustive_limit) {
        out.exhaustive = true;
        out.samples = edges.size();
        for (const auto& e : edges) {
            const double d = deg_of(e);
            sum += d;
            sq += d * d;
        }
    } else {
        out.samples = std::max<std::size_t>(samples, 1);
        Rng rng(seed);
        for (std::size_t t = 0; t < out.samples; ++t) {
            const double d = deg_of(edges[rng.below(edges.size())]);
            sum += d;
            sq += d * d;
        }
    }
    const auto m = static_cast<double>(out.samples);
    out.mean = sum / m;
    if (!out.exhaustive && out.samples > 1) {
        const double var = std::max(0.0, (sq - m * out.mean * out.mean) / (m - 1));
        out.stderr_ = std::sqrt(var / m);
    }
    return out;
}

namespace {

using HeavySet = std::unordered_set<std::uint64_t>;

std::vector<HeavySet> heavy_vertices(const std::vector<DegreeMap>& maps, const Rational& cap, std::size_t& count) {
    std::vector<HeavySet> out(maps.size());
    for (std::size_t i = 0; i < maps.size(); ++i) {
        for (const auto& [v, d] : maps[i]) {
            if (Rational(d) > cap) {
                out[i].insert(v);
                ++count;
            }
        }
    }
    return out;
}

std::pair<std::uint64_t, std::uint64_t> canonical(const Edge& e) {
    return {std::min(e.left, e.right), std::max(e.left, e.right)};
}

} // namespace

PrunedGraph prune(const KikuchiGraph& g, const TargetDegrees& target, const Rational& gamma) {
    PrunedGraph out;
    out.gamma = gamma;
    out.target = target;
    out.report.D = g.D;

    const auto prof = degree_profile(g);
    auto heavy_l = heavy_vertices(prof.left, gamma * target.left, out.report.heavy_left);
    auto heavy_r = heavy_vertices(prof.right, gamma * target.right, out.report.heavy_right);
    if (g.symmetric()) {
        // one vertex set on both sides; dropping by the union keeps swapped pairs together
        for (std::size_t i = 0; i < heavy_l.size(); ++i) {
            heavy_l[i].insert(heavy_r[i].begin(), heavy_r[i].end());
            heavy_r[i] = heavy_l[i];
        }
    }

    std::vector<std::vector<Edge>> survivors(g.labels.size());
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        const auto grp = g.labels[l].group;
        for (const auto& e : g.label_edges(l)) {
            if (heavy_l[grp].count(e.left) != 0 || heavy_r[grp].count(e.right) != 0) {
                ++out.report.dropped_heavy;
            } else {
                survivors[l].push_back(e);
            }
        }
    }

    std::uint64_t d_prime = g.labels.empty() ? to_u64(g.D) : std::numeric_limits<std::uint64_t>::max();
    for (const auto& s : survivors) {
        d_prime = std::min<std::uint64_t>(d_prime, s.size());
    }
    if (!g.labels.empty() && d_prime == 0) {
        throw PruneError("pruning left a label with no edges (D' = 0) at gamma = " + gamma.str() +
                         "; no certificate is possible at this cap");
    }

    out.graph = g;
    out.graph.edges.clear();
    out.graph.offsets.assign(1, 0);
    out.graph.labels.clear();
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        auto& kept = survivors[l];
        if (g.symmetric()) {
            std::sort(kept.begin(), kept.end(), [](const Edge& a, const Edge& b) {
                return std::pair(canonical(a), a) < std::pair(canonical(b), b);
            });
        } else {
            std::sort(kept.begin(), kept.end());
        }
        out.report.dropped_trim += kept.size() - d_prime;
        kept.resize(d_prime);
        out.graph.add_label(g.labels[l], kept);
    }

    out.d_prime = d_prime;
    out.report.d_prime = d_prime;
    out.report.ratio = g.D == 0 ? 0.0 : static_cast<double>(d_prime) / g.D.convert_to<double>();
    out.report.half_guarantee = BigInt(d_prime) * 2 >= g.D;
    const auto after = degree_profile(out.graph);
    out.report.max_left_degree = after.max_left;
    out.report.max_right_degree = after.max_right;
    return out;
}

PruneCheck check_pruned(const KikuchiGraph& original, const PrunedGraph& pruned) {
    PruneCheck c;
    const auto& b = pruned.graph;
    if (b.labels.size() != original.labels.size()) {
        c.subgraph = false;
        c.equalized = false;
        return c;
    }
    for (std::size_t l = 0; l < b.labels.size(); ++l) {
        const auto be = b.label_edges(l);
        if (be.size() != pruned.d_prime) {
            c.equalized = false;
        }
        const auto ae = original.label_edges(l);
        std::set<Edge> a_set(ae.begin(), ae.end());
        std::set<Edge> b_set(be.begin(), be.end());
        if (b_set.size() != be.size() || b.labels[l].group != original.labels[l].group ||
            b.labels[l].c1 != original.labels[l].c1 || b.labels[l].c2 != original.labels[l].c2 ||
            b.labels[l].partner != original.labels[l].partner || b.labels[l].p != original.labels[l].p) {
            c.subgraph = false;
        }
        for (const auto& e : be) {
            if (a_set.count(e) == 0) {
                c.subgraph = false;
            }
            if (b.symmetric() && b_set.count(Edge{e.right, e.left}) == 0) {
                c.symmetric = false;
            }
        }
    }
    const auto prof = degree_profile(b);
    const Rational cap_l = pruned.gamma * pruned.target.left;
    const Rational cap_r = pruned.gamma * pruned.target.right;
    for (std::size_t i = 0; i < prof.left.size(); ++i) {
        for (const auto& [v, d] : prof.left[i]) {
            if (Rational(d) > cap_l) {
                c.capped = false;
            }
        }
        for (const auto& [v, d] : prof.right[i]) {
            if (Rational(d) > cap_r) {
                c.capped = false;
            }
        }
    }
    return c;
}

} // namespace kikuchi
