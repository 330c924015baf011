#include "kikuchi/decompose.hpp"

#include <cmath>
#include <set>
#include <unordered_map>

namespace kikuchi {

int kikuchi_level(int n, int q, double delta) {
    const long double x = std::pow(static_cast<long double>(n), 1.0L - 2.0L / q) *
                          std::pow(static_cast<long double>(delta), -2.0L / q);
    long double fl = std::floor(x);
    if (x - fl > 1.0L - 1e-9L) {
        fl += 1.0L;
    }
    return static_cast<int>(fl);
}

Thresholds compute_thresholds(int n, std::size_t k, int q, double delta, std::optional<int> ell_override) {
    if (n < 1 || k < 1 || q < 3 || q % 2 == 0 || !(delta > 0.0) || delta > 1.0) {
        throw InstanceError("compute_thresholds: need n, k >= 1, odd q >= 3, delta in (0, 1]");
    }
    Thresholds thr;
    thr.q = q;
    thr.ell = ell_override ? *ell_override : std::clamp(kikuchi_level(n, q, delta), 1, n);
    if (thr.ell < 1) {
        throw InstanceError("compute_thresholds: ell must be positive");
    }
    const double ratio = static_cast<double>(thr.ell) / n;
    for (int t = 2; t <= thr.max_level(); ++t) {
        thr.d[t] = std::pow(ratio, t - 1.5) * static_cast<double>(k);
    }
    thr.k_at_least_4ell = static_cast<long long>(k) >= 4LL * thr.ell;
    thr.smallest_at_least_one = thr.d.at(thr.max_level()) >= 1.0;
    return thr;
}

namespace {

struct EdgeRecord {
    std::size_t hypergraph;
    std::size_t position;
    const VertexSet* vertices;
    bool alive = true;
};

using DegreeMap = std::unordered_map<VertexSet, std::size_t, VertexSetHash>;

} // namespace

DecomposedInstance decompose(const XorInstance& inst, const Thresholds& thr) {
    inst.validate(true);
    if (thr.q != inst.q) {
        throw InstanceError("decompose: thresholds were computed for a different q");
    }
    const int top = thr.max_level();

    std::vector<EdgeRecord> edges;
    for (std::size_t i = 0; i < inst.k(); ++i) {
        for (std::size_t pos = 0; pos < inst.hypergraphs[i].size(); ++pos) {
            edges.push_back({i, pos, &inst.hypergraphs[i][pos]});
        }
    }

    // Per level: degree of every occurring t-set and the ids of edges containing it.
    std::map<int, DegreeMap> deg;
    std::map<int, std::unordered_map<VertexSet, std::vector<std::size_t>, VertexSetHash>> containing;
    std::map<int, std::set<VertexSet>> heavy;
    for (int t = 2; t <= top; ++t) {
        for (std::size_t id = 0; id < edges.size(); ++id) {
            for (auto& sub : subsets_of_size(*edges[id].vertices, static_cast<std::size_t>(t))) {
                ++deg[t][sub];
                containing[t][sub].push_back(id);
            }
        }
        for (const auto& [set, count] : deg[t]) {
            if (static_cast<double>(count) > thr.at(t)) {
                heavy[t].insert(set);
            }
        }
    }

    DecomposedInstance out;
    for (int s = 2; s <= top; ++s) {
        auto& piece = out.pieces[s];
        piece.n = inst.n;
        piece.q = inst.q;
        piece.s = s;
        piece.hypergraphs.resize(inst.k());
        piece.signs = inst.signs;
    }
    std::vector<std::pair<int, std::size_t>> moved_to(edges.size(), {0, 0});

    for (int t = top; t >= 2; --t) {
        const double dt = thr.at(t);
        const auto take = static_cast<std::size_t>(std::floor(dt)) + 1;
        auto& piece = out.pieces[t];
        while (!heavy[t].empty()) {
            const VertexSet q_set = *heavy[t].begin();
            const auto label = static_cast<std::uint32_t>(piece.labels.size());
            piece.labels.push_back(q_set);
            std::vector<std::size_t> chosen;
            for (std::size_t id : containing[t][q_set]) {
                if (edges[id].alive) {
                    chosen.push_back(id);
                    if (chosen.size() == take) {
                        break;
                    }
                }
            }
            for (std::size_t id : chosen) {
                auto& e = edges[id];
                e.alive = false;
                auto& dest = piece.hypergraphs[e.hypergraph];
                moved_to[id] = {t, dest.size()};
                dest.push_back({set_difference(*e.vertices, q_set), label});
                for (int u = 2; u <= top; ++u) {
                    for (auto& sub : subsets_of_size(*e.vertices, static_cast<std::size_t>(u))) {
                        auto& c = deg[u][sub];
                        --c;
                        if (static_cast<double>(c) <= thr.at(u)) {
                            heavy[u].erase(sub);
                        }
                    }
                }
            }
        }
    }

    out.leftover.n = inst.n;
    out.leftover.q = inst.q;
    out.leftover.delta = inst.delta;
    out.leftover.signs = inst.signs;
    out.leftover.hypergraphs.resize(inst.k());
    for (std::size_t id = 0; id < edges.size(); ++id) {
        const auto& e = edges[id];
        Provenance prov{e.hypergraph, e.position, 0, 0};
        if (e.alive) {
            auto& dest = out.leftover.hypergraphs[e.hypergraph];
            prov.index = dest.size();
            dest.push_back(*e.vertices);
        } else {
            prov.piece = moved_to[id].first;
            prov.index = moved_to[id].second;
        }
        out.provenance.push_back(prov);
    }
    return out;
}

DecompositionReport verify_decomposition(const XorInstance& original, const DecomposedInstance& dec,
                                         const Thresholds& thr) {
    DecompositionReport rep;
    const int q = original.q;
    const int top = (q + 1) / 2;
    auto fail = [&](bool& flag, std::string msg) {
        flag = false;
        rep.violations.push_back(std::move(msg));
    };

    if (dec.leftover.k() != original.k()) {
        fail(rep.leftover_subset, "(2) leftover has " + std::to_string(dec.leftover.k()) + " hypergraphs, expected " +
                                      std::to_string(original.k()));
        return rep;
    }

    // (1) shape of every bipartite hyperedge and its label
    for (const auto& [s, piece] : dec.pieces) {
        if (s < 2 || s > top) {
            fail(rep.bipartite_shape, "(1) piece s=" + std::to_string(s) + " outside 2..(q+1)/2");
            continue;
        }
        if (piece.k() != original.k()) {
            fail(rep.bipartite_shape, "(1) piece s=" + std::to_string(s) + " has the wrong number of hypergraphs");
            continue;
        }
        for (const auto& p : piece.labels) {
            if (p.size() != static_cast<std::size_t>(s)) {
                fail(rep.bipartite_shape, "(1) label " + p.to_string() + " is not an s-set");
            }
        }
        for (std::size_t i = 0; i < piece.k(); ++i) {
            for (const auto& e : piece.hypergraphs[i]) {
                if (e.left.size() != static_cast<std::size_t>(q - s)) {
                    fail(rep.bipartite_shape, "(1) H^(" + std::to_string(s) + ")_" + std::to_string(i + 1) +
                                                  " edge has " + std::to_string(e.left.size()) + " left vertices");
                }
                if (e.label >= piece.labels.size()) {
                    fail(rep.bipartite_shape, "(1) unregistered label " + std::to_string(e.label + 1));
                } else if (!e.left.disjoint_from(piece.labels[e.label])) {
                    fail(rep.bipartite_shape, "(1) left side overlaps its label");
                }
            }
        }
        const double ds = thr.d.count(s) != 0 ? thr.at(s) : 0.0;
        const double total = static_cast<double>(original.total_edges());
        const double ratio =
            total > 0 ? static_cast<double>(piece.labels.size()) * ds / (std::pow(2.0, q) * total) : 0.0;
        rep.registry_ratio[s] = ratio;
        if (ratio > 1.0) {
            rep.registry_bound = false;
        }
    }

    // (2) and (3): multiset reconstruction per i plus the provenance bijection
    for (std::size_t i = 0; i < original.k(); ++i) {
        std::multiset<VertexSet> source(original.hypergraphs[i].begin(), original.hypergraphs[i].end());
        std::multiset<VertexSet> rebuilt;
        for (const auto& c : dec.leftover.hypergraphs[i]) {
            if (source.find(c) == source.end()) {
                fail(rep.leftover_subset, "(2) H'_" + std::to_string(i + 1) + " edge " + c.to_string() +
                                              " is not in H_" + std::to_string(i + 1));
            }
            rebuilt.insert(c);
        }
        std::size_t piece_count = 0;
        for (const auto& [s, piece] : dec.pieces) {
            if (i >= piece.k()) {
                continue;
            }
            for (const auto& e : piece.hypergraphs[i]) {
                if (e.label < piece.labels.size()) {
                    rebuilt.insert(set_union(e.left, piece.labels[e.label]));
                }
                ++piece_count;
            }
        }
        if (original.hypergraphs[i].size() != dec.leftover.hypergraphs[i].size() + piece_count) {
            fail(rep.correspondence, "(3) conservation fails for i=" + std::to_string(i + 1) + ": " +
                                         std::to_string(original.hypergraphs[i].size()) + " != " +
                                         std::to_string(dec.leftover.hypergraphs[i].size()) + " + " +
                                         std::to_string(piece_count));
        }
        if (rebuilt != source) {
            fail(rep.correspondence, "(3) reconstructed hyperedges differ from H_" + std::to_string(i + 1));
        }
    }
    if (dec.provenance.size() != original.total_edges()) {
        fail(rep.correspondence, "(3) provenance has " + std::to_string(dec.provenance.size()) + " records for " +
                                     std::to_string(original.total_edges()) + " hyperedges");
    } else {
        std::set<std::tuple<int, std::size_t, std::size_t>> targets;
        for (const auto& pr : dec.provenance) {
            if (pr.hypergraph >= original.k() || pr.position >= original.hypergraphs[pr.hypergraph].size()) {
                fail(rep.correspondence, "(3) provenance points outside the input");
                continue;
            }
            const auto& c = original.hypergraphs[pr.hypergraph][pr.position];
            bool matches = false;
            if (pr.piece == 0) {
                const auto& h = dec.leftover.hypergraphs[pr.hypergraph];
                matches = pr.index < h.size() && h[pr.index] == c;
            } else if (auto it = dec.pieces.find(pr.piece); it != dec.pieces.end()) {
                const auto& h = it->second.hypergraphs[pr.hypergraph];
                matches = pr.index < h.size() && h[pr.index].label < it->second.labels.size() &&
                          set_union(h[pr.index].left, it->second.labels[h[pr.index].label]) == c;
            }
            if (!matches || !targets.emplace(pr.piece, pr.hypergraph, pr.index).second) {
                fail(rep.correspondence, "(3) provenance of H_" + std::to_string(pr.hypergraph + 1) + " edge " +
                                             c.to_string() + " is not a bijective reconstruction");
            }
        }
    }

    // (4) exhaustive degree scan over subsets occurring in leftover edges
    std::map<VertexSet, std::size_t> counts;
    for (const auto& h : dec.leftover.hypergraphs) {
        for (const auto& c : h) {
            for (int t = 2; t <= top; ++t) {
                for (auto& sub : subsets_of_size(c, static_cast<std::size_t>(t))) {
                    ++counts[sub];
                }
            }
        }
    }
    for (const auto& [set, count] : counts) {
        const int t = static_cast<int>(set.size());
        if (static_cast<double>(count) > thr.at(t)) {
            fail(rep.no_heavy_sets, "(4) " + set.to_string() + " has leftover degree " + std::to_string(count) +
                                        " > d_" + std::to_string(t));
        }
    }

    // (5)
    for (std::size_t i = 0; i < original.k(); ++i) {
        if (!validate_matching(original.hypergraphs[i]).ok) {
            continue;
        }
        if (!validate_matching(dec.leftover.hypergraphs[i]).ok) {
            fail(rep.matchings_preserved, "(5) H'_" + std::to_string(i + 1) + " is not a matching");
        }
        for (const auto& [s, piece] : dec.pieces) {
            if (i < piece.k() && !validate_bipartite_matching(piece.hypergraphs[i]).ok) {
                fail(rep.matchings_preserved,
                     "(5) H^(" + std::to_string(s) + ")_" + std::to_string(i + 1) + " is not a matching");
            }
        }
    }
    return rep;
}

Signs lift_labels(const BipartiteXorInstance& piece, const Signs& x) {
    Signs y;
    y.reserve(piece.labels.size());
    for (const auto& p : piece.labels) {
        y.push_back(monomial(x, p));
    }
    return y;
}

bool recombination_check(const XorInstance& original, const DecomposedInstance& dec, const Signs& b, const Signs& x) {
    const std::int64_t phi = eval_phi(original, b, x);
    std::int64_t sum = eval_phi(dec.leftover, b, x);
    for (const auto& [s, piece] : dec.pieces) {
        sum += eval_psi_bipartite(piece, b, x, lift_labels(piece, x));
    }
    return phi == sum;
}

} // namespace kikuchi
