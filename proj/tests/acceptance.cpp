// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "kikuchi/decompose.hpp"
#include "kikuchi/io.hpp"
#include "kikuchi/kikuchi_graph.hpp"
#include "kikuchi/parallel.hpp"
#include "kikuchi/prune.hpp"
#include "kikuchi/random.hpp"
#include "kikuchi/refute.hpp"
#include "kikuchi/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace kikuchi;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

Signs random_pm(Rng& rng, std::size_t n) {
    Signs v(n);
    for (auto& s : v) s = rng.sign();
    return v;
}

VertexSet random_subset(Rng& rng, int n, int size, const VertexSet& avoid = {}) {
    std::vector<Vertex> pool;
    for (int v = 0; v < n; ++v)
        if (!avoid.contains(static_cast<Vertex>(v))) pool.push_back(static_cast<Vertex>(v));
    rng.shuffle(pool);
    pool.resize(static_cast<std::size_t>(size));
    return VertexSet(pool);
}

VertexSet unite(const VertexSet& a, const VertexSet& b) {
    std::vector<Vertex> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    return VertexSet(all);
}

// Pushes several hypergraphs through a common t-set so decomposition has
// something to promote. Edges colliding with the new one are dropped, which
// keeps every H_i a matching.
void inject_heavy(XorInstance& inst, Rng& rng) {
    const int t = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>((inst.q + 1) / 2 - 1)));
    const auto hot = random_subset(rng, inst.n, t);
    std::vector<std::size_t> order(inst.k());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t count = std::min(order.size(), 2 + static_cast<std::size_t>(rng.below(inst.k())));
    for (std::size_t j = 0; j < count; ++j) {
        auto& h = inst.hypergraphs[order[j]];
        const auto c = unite(hot, random_subset(rng, inst.n, inst.q - t, hot));
        std::erase_if(h, [&](const VertexSet& e) { return !e.disjoint_from(c); });
        h.push_back(c);
    }
    inst.delta = static_cast<double>(inst.max_matching_size()) / inst.n;
}

XorInstance random_instance(Rng& rng, int q, int n_lo, int n_hi, std::size_t k_lo, std::size_t k_hi, bool heavy) {
    const int n = n_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_hi - n_lo + 1)));
    const std::size_t k = k_lo + rng.below(k_hi - k_lo + 1);
    const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / q)));
    auto inst = generate_random_matching_instance(n, q, k, static_cast<double>(m) / n, rng.next());
    if (heavy) inject_heavy(inst, rng);
    return inst;
}

// Sign of a lifted vertex: product of x over x-components and y over
// label components of the unranked tuple.
int lift(const VertexSpace& space, std::uint64_t v, const Signs& x, const Signs& y) {
    const auto parts = space.unrank(v);
    int out = 1;
    for (std::size_t c = 0; c < parts.size(); ++c) {
        const auto& src = space.components()[c].domain == Domain::x ? x : y;
        for (Mask m = parts[c]; m != 0; m &= m - 1) out *= src[static_cast<std::size_t>(__builtin_ctzll(m))];
    }
    return out;
}

// The per-label value a correct Kikuchi form must equal, up to the factor D.
int expected_label_value(const KikuchiGraph& g, const EdgeLabel& lab, const Signs& b, const Signs& x, const Signs& y) {
    int v = b[lab.group];
    for (auto u : lab.c1) v *= x[u];
    switch (g.variant) {
    case Variant::regular_cs:
        v *= b[lab.partner];
        for (auto u : lab.c2) v *= x[u];
        break;
    case Variant::bipartite:
        v *= y[lab.p];
        break;
    default:
        break;
    }
    return v;
}

// ---------------------------------------------------------------- criterion 1

Outcome edge_counts() {
    Rng rng(101);
    const Variant variants[] = {Variant::basic_even, Variant::naive_odd, Variant::regular_cs, Variant::bipartite};
    std::size_t checked = 0;
    std::size_t nonzero = 0;
    std::size_t bad = 0;
    for (std::size_t trial = 0; trial < 600; ++trial) {
        const Variant var = variants[trial % 4];
        const int q = 3 + 2 * static_cast<int>(rng.below(3));
        const int ell = 1 + static_cast<int>(rng.below(3));
        const int n = q + static_cast<int>(rng.below(static_cast<std::uint64_t>(15 - q)));
        EdgeList edges;
        BigInt D = 0;
        switch (var) {
        case Variant::basic_even:
            edges = build_basic_even(random_subset(rng, n, q - 1), n, ell);
            D = edge_count_basic_even(q - 1, n, ell);
            break;
        case Variant::naive_odd:
            edges = build_naive_odd(random_subset(rng, n, q), n, ell);
            D = edge_count_naive_odd(q, n, ell);
            break;
        case Variant::regular_cs:
            edges = build_regular_cs(random_subset(rng, n, q - 1), random_subset(rng, n, q - 1), n, ell);
            D = edge_count_regular_cs(q, n, ell);
            break;
        case Variant::bipartite: {
            const int s = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>((q + 1) / 2 - 1)));
            const std::size_t reg = 1 + rng.below(8);
            const auto p = static_cast<std::uint32_t>(rng.below(reg));
            edges = build_bipartite(random_subset(rng, n, q - s), p, q, s, n, ell, reg);
            D = edge_count_bipartite(q, s, n, ell, reg);
            break;
        }
        }
        std::set<std::pair<std::uint64_t, std::uint64_t>> distinct;
        for (const auto& e : edges) distinct.insert({e.left, e.right});
        ++checked;
        if (D != 0) ++nonzero;
        if (BigInt(distinct.size()) != D || distinct.size() != edges.size()) ++bad;
    }
    return {bad == 0, std::to_string(checked) + " constraints (" + std::to_string(nonzero) + " with D > 0), " +
                          std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------- criterion 2

struct FormCase {
    KikuchiGraph graph;
    std::function<std::int64_t(const Signs&, const Signs&, const Signs&)> total;
    std::size_t k = 0;
    std::size_t registry = 0;
};

std::vector<FormCase> form_cases() {
    Rng rng(202);
    std::vector<FormCase> out;
    for (int t = 0; t < 8; ++t) {
        const int qe = 2 + 2 * (t % 3);
        auto even = std::make_shared<XorInstance>(random_instance(rng, qe, qe + 4, 10, 2, 5, false));
        FormCase c{assemble_basic_even(*even, qe / 2 + static_cast<int>(rng.below(2))), {}, even->k(), 0};
        c.total = [even](const Signs& b, const Signs& x, const Signs&) { return eval_phi(*even, b, x); };
        out.push_back(std::move(c));

        const int qo = 3 + 2 * (t % 3);
        auto odd = std::make_shared<XorInstance>(random_instance(rng, qo, qo + 3, 10, 2, 5, false));
        FormCase d{assemble_naive_odd(*odd, (qo - 1) / 2 + static_cast<int>(rng.below(2))), {}, odd->k(), 0};
        d.total = [odd](const Signs& b, const Signs& x, const Signs&) { return eval_phi(*odd, b, x); };
        out.push_back(std::move(d));

        const int qr = t % 2 == 0 ? 3 : 5;
        auto reg = std::make_shared<XorInstance>(random_instance(rng, qr, qr + 5, 10, 3, 5, true));
        const auto parts = partition_family(reg->k(), PartitionScheme::pairwise, 0, 0);
        const auto part = parts[rng.below(parts.size())];
        const int ell = (qr - 1) / 2 + static_cast<int>(rng.below(2));
        FormCase e{assemble_regular_cs(reg->n, qr, ell, reg->k(), cauchy_schwarz_pairs(*reg, part)), {}, reg->k(), 0};
        e.total = [reg, part](const Signs& b, const Signs& x, const Signs&) { return eval_f(*reg, part, b, x); };
        out.push_back(std::move(e));
    }
    // Bipartite pieces straight out of the decomposition.
    std::size_t pieces = 0;
    for (std::uint64_t seed = 1; pieces < 8 && seed < 200; ++seed) {
        const int q = seed % 3 == 0 ? 5 : 3;
        auto inst = random_instance(rng, q, q + 5, 10, 3, 6, true);
        const auto thr = compute_thresholds(inst.n, inst.k(), q, inst.delta, 1 + static_cast<int>(rng.below(2)));
        const auto dec = decompose(inst, thr);
        for (const auto& [s, piece] : dec.pieces) {
            auto pc = std::make_shared<BipartiteXorInstance>(piece);
            FormCase f{assemble_bipartite(*pc, thr.ell), {}, pc->k(), pc->num_labels()};
            f.total = [pc](const Signs& b, const Signs& x, const Signs& y) { return eval_psi_bipartite(*pc, b, x, y); };
            out.push_back(std::move(f));
            ++pieces;
        }
    }
    return out;
}

Outcome quadratic_forms() {
    Rng rng(203);
    const auto cases = form_cases();
    std::size_t graphs = 0;
    std::size_t assignments = 0;
    std::size_t bad = 0;
    std::set<Variant> seen;
    for (const auto& c : cases) {
        const auto& g = c.graph;
        if (g.edges.empty()) continue;
        ++graphs;
        seen.insert(g.variant);
        const auto D = static_cast<std::int64_t>(to_u64(g.D));
        for (int t = 0; t < 100; ++t) {
            const auto b = random_pm(rng, c.k);
            const auto x = random_pm(rng, static_cast<std::size_t>(g.n));
            const auto y = random_pm(rng, c.registry);
            const auto lib = quadratic_form(g, b, x, y);
            std::int64_t total = 0;
            for (std::size_t l = 0; l < g.labels.size(); ++l) {
                const std::int64_t sign = g.label_sign(l, b);
                std::int64_t form = 0;
                for (const auto& e : g.label_edges(l)) form += sign * lift(g.left, e.left, x, y) * lift(g.right, e.right, x, y);
                const std::int64_t want = D * expected_label_value(g, g.labels[l], b, x, y);
                if (form != want || lib.per_label[l] != want) ++bad;
                total += form;
            }
            if (total != D * c.total(b, x, y) || lib.total != total) ++bad;
            ++assignments;
        }
    }
    return {bad == 0 && seen.size() == 4, std::to_string(graphs) + " graphs over " + std::to_string(seen.size()) +
                                              " variants, " + std::to_string(assignments) + " assignments, " +
                                              std::to_string(bad) + " mismatches"};
}

// ---------------------------------------------------------------- criterion 3

Outcome decomposition() {
    Rng rng(303);
    std::size_t bad = 0;
    std::size_t with_pieces = 0;
    std::size_t checks = 0;
    for (int t = 0; t < 200; ++t) {
        const int q = 3 + 2 * (t % 3);
        const int n_lo = q == 7 ? 14 : 2 * q + 2;
        auto inst = random_instance(rng, q, n_lo, n_lo + 6, 3, 10, t % 4 != 0);
        const auto thr = compute_thresholds(inst.n, inst.k(), q, inst.delta, 1 + static_cast<int>(rng.below(3)));
        const auto dec = decompose(inst, thr);
        const auto rep = verify_decomposition(inst, dec, thr);
        bool ok = rep.ok();
        for (std::size_t i = 0; i < inst.k(); ++i) {
            std::size_t sum = dec.leftover.hypergraphs[i].size();
            for (const auto& [s, piece] : dec.pieces) sum += piece.hypergraphs[i].size();
            ok = ok && sum == inst.hypergraphs[i].size();
        }
        std::size_t piece_edges = 0;
        for (const auto& [s, piece] : dec.pieces) piece_edges += piece.total_edges();
        if (piece_edges > 0) ++with_pieces;
        for (int r = 0; r < 100; ++r) {
            const auto b = random_pm(rng, inst.k());
            const auto x = random_pm(rng, static_cast<std::size_t>(inst.n));
            ok = ok && recombination_check(inst, dec, b, x);
            ++checks;
        }
        if (!ok) ++bad;
    }
    return {bad == 0, "200 instances (" + std::to_string(with_pieces) + " with promoted sets), " +
                          std::to_string(checks) + " recombination checks, " + std::to_string(bad) + " failures"};
}

// ------------------------------------------------------- criteria 4, 6, 7, 10

struct Run {
    XorInstance inst;
    RefuteOptions opts;
    bool planted = false;
    Certificate cert;
    std::string dump;
};

RefuteOptions run_options(int ell) {
    RefuteOptions o;
    o.ell = ell;
    o.oracle = true;
    o.seed = 11;
    return o;
}

std::vector<Run> soundness_runs() {
    Rng rng(404);
    std::vector<Run> runs;
    for (int t = 0; t < 50; ++t) {
        Run r;
        r.inst = random_instance(rng, 3, 9, 14, 2, 6, t % 3 != 0);
        r.opts = run_options(1 + t % 2);
        runs.push_back(std::move(r));
    }
    for (int t = 0; t < 10; ++t) {
        Run r;
        r.inst = random_instance(rng, 5, 10, 12, 2, 6, t % 2 == 0);
        r.opts = run_options(2);
        runs.push_back(std::move(r));
    }
    return runs;
}

std::vector<Run> planted_runs() {
    Rng rng(606);
    std::vector<Run> runs;
    for (int t = 0; t < 20; ++t) {
        Run r;
        for (;;) {
            // Planting fails for some dense parameter draws; draw again.
            const int n = 9 + static_cast<int>(rng.below(4));
            const std::size_t k = 3 + rng.below(4);
            const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 3)));
            try {
                r.inst = generate_planted_linear_instance(n, 3, k, static_cast<double>(m) / n, rng.next()).instance;
                break;
            } catch (const InstanceError&) {
            }
        }
        r.opts = run_options(1 + t % 2);
        r.planted = true;
        runs.push_back(std::move(r));
    }
    return runs;
}

void execute(std::vector<Run>& runs) {
    for (auto& r : runs) {
        r.cert = refute_full(r.inst, r.opts);
        r.dump = to_json(r.cert).dump();
    }
}

Outcome certificate_soundness(const std::vector<Run>& runs) {
    std::size_t signs = 0;
    std::size_t bad = 0;
    std::size_t with_pieces = 0;
    double worst = 0.0;
    for (const auto& r : runs) {
        if (r.planted) continue;
        bool pieces = false;
        for (const auto& p : r.cert.pieces) pieces = pieces || p.term.edges > 0;
        if (pieces) ++with_pieces;
        if (!r.cert.exhaustive_signs || r.cert.per_sign.size() != (std::size_t{1} << r.inst.k())) ++bad;
        for (const auto& s : r.cert.per_sign) {
            ++signs;
            const auto val = static_cast<double>(*s.val);
            if (s.bound * (1 + kSoundnessGuard) < val) ++bad;
            if (s.bound > 0) worst = std::max(worst, val / s.bound);
        }
    }
    return {bad == 0, std::to_string(runs.size() - 20) + " instances (" + std::to_string(with_pieces) +
                          " with bipartite pieces), " + std::to_string(signs) + " sign vectors, " +
                          std::to_string(bad) + " violations, max val/bound " + fmt(worst)};
}

Outcome planted(const std::vector<Run>& runs) {
    std::size_t bad = 0;
    std::size_t signs = 0;
    for (const auto& r : runs) {
        if (!r.planted) continue;
        const auto total = static_cast<std::int64_t>(r.inst.total_edges());
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << r.inst.k()); ++i) {
            ++signs;
            if (brute_force_val(r.inst, signs_from_index(i, r.inst.k())).value != total) ++bad;
        }
        if (r.cert.refuted) ++bad;
    }
    return {bad == 0, "20 instances, " + std::to_string(signs) + " sign vectors, " + std::to_string(bad) + " failures"};
}

// Rebuilds a run's refuters from its certificate parameters.
struct Rebuilt {
    std::optional<RegularRefuter> regular;
    std::vector<std::unique_ptr<BipartiteRefuter>> pieces;
    DecomposedInstance dec;
};

std::unique_ptr<Rebuilt> rebuild(const Run& r) {
    auto out = std::make_unique<Rebuilt>();
    const auto& p = r.cert.params;
    const auto thr = compute_thresholds(p.n, p.k, p.q, p.delta, p.ell);
    out->dec = decompose(r.inst, thr);
    const auto opts = options_from(p);
    out->regular.emplace(out->dec.leftover, thr, p.delta_n, opts);
    for (const auto& [s, piece] : out->dec.pieces) {
        out->pieces.push_back(std::make_unique<BipartiteRefuter>(piece, thr.ell, p.delta_n, opts));
    }
    return out;
}

// Pruning contract written against the definitions: label-wise subset,
// exactly D' edges per label, per-group degrees within Γ times the target.
bool contract_holds(const KikuchiGraph& a, const PrunedGraph& pg) {
    const auto& b = pg.graph;
    if (b.labels.size() != a.labels.size()) return false;
    std::vector<std::map<std::uint64_t, std::uint64_t>> left(a.num_groups);
    std::vector<std::map<std::uint64_t, std::uint64_t>> right(a.num_groups);
    for (std::size_t l = 0; l < b.labels.size(); ++l) {
        const auto kept = b.label_edges(l);
        if (kept.size() != pg.d_prime) return false;
        const auto orig = a.label_edges(l);
        std::set<Edge> pool(orig.begin(), orig.end());
        for (const auto& e : kept) {
            if (!pool.contains(e)) return false;
            ++left[b.labels[l].group][e.left];
            ++right[b.labels[l].group][e.right];
        }
    }
    const Rational cap_l = pg.gamma * pg.target.left;
    const Rational cap_r = pg.gamma * pg.target.right;
    for (std::size_t i = 0; i < a.num_groups; ++i) {
        for (const auto& [v, d] : left[i])
            if (Rational(d) > cap_l) return false;
        for (const auto& [v, d] : right[i])
            if (Rational(d) > cap_r) return false;
    }
    return true;
}

struct PruneStats {
    std::size_t graphs = 0;
    std::size_t bad = 0;
    std::size_t failures = 0;
    std::size_t below_half = 0;
    double min_ratio = 1.0;
    double sum_ratio = 0.0;
    std::vector<std::vector<SparseMatrix>> families;
};

void note_pruned(PruneStats& st, const KikuchiGraph& a, const std::optional<PrunedGraph>& pg) {
    if (!pg) {
        if (!a.edges.empty()) ++st.failures;
        return;
    }
    ++st.graphs;
    if (!contract_holds(a, *pg) || !check_pruned(a, *pg).ok()) ++st.bad;
    const double ratio = static_cast<double>(pg->d_prime) / static_cast<double>(to_u64(a.D));
    st.min_ratio = std::min(st.min_ratio, ratio);
    st.sum_ratio += ratio;
    if (2 * pg->d_prime < to_u64(a.D)) ++st.below_half;
    if (st.families.size() < 50 && !pg->graph.edges.empty()) {
        std::vector<double> ones(pg->graph.labels.size(), 1.0);
        st.families.push_back(group_matrices(pg->graph, ones).groups);
    }
}

PruneStats pruning(const std::vector<Run>& runs) {
    PruneStats st;
    for (const auto& r : runs) {
        const auto rb = rebuild(r);
        for (const auto& p : rb->regular->partitions()) note_pruned(st, p.graph, p.pruned);
        for (const auto& p : rb->pieces) note_pruned(st, p->graph(), p->pruned());
    }
    return st;
}

Outcome pruning_contract(const PruneStats& st) {
    return {st.bad == 0 && st.graphs > 0,
            std::to_string(st.graphs) + " pruned graphs, " + std::to_string(st.bad) + " contract violations; D'/D min " +
                fmt(st.min_ratio) + " mean " + fmt(st.sum_ratio / std::max<std::size_t>(st.graphs, 1)) + ", " +
                std::to_string(st.below_half) + " below 1/2, " + std::to_string(st.failures) +
                " prune failures (trivial fallback)"};
}

// ---------------------------------------------------------------- criterion 5

Outcome khintchine(const PruneStats& st) {
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t f = 0; f < st.families.size(); ++f) {
        const auto& groups = st.families[f];
        const auto sigma = khintchine_sigma(groups);
        const auto mean = estimate_expected_norm(groups, 200, mix_seed(505, f));
        const double d = static_cast<double>(groups.front().rows() + groups.front().cols());
        const double bound = std::sqrt(2 * sigma.sigma2 * std::log(d));
        if (mean.mean > bound * (1 + 1e-9)) ++bad;
        worst = std::max(worst, mean.mean / bound);
    }
    return {bad == 0 && st.families.size() == 50, std::to_string(st.families.size()) + " families, " +
                                                      std::to_string(bad) + " violations, max mean/bound " + fmt(worst)};
}

// ---------------------------------------------------------------- criterion 8

BipartiteXorInstance random_piece(Rng& rng) {
    for (;;) {
        BipartiteXorInstance piece;
        piece.n = 10 + static_cast<int>(rng.below(3));
        piece.q = 3;
        piece.s = 2;
        const std::size_t reg = 5 + rng.below(4);
        std::set<VertexSet> labels;
        while (labels.size() < reg) labels.insert(random_subset(rng, piece.n, 2));
        piece.labels.assign(labels.begin(), labels.end());
        const std::size_t k = 3 + rng.below(4);
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<std::uint32_t> order(reg);
            for (std::size_t p = 0; p < reg; ++p) order[p] = static_cast<std::uint32_t>(p);
            rng.shuffle(order);
            BipartiteHypergraph h;
            VertexSet used;
            const std::size_t m = 2 + rng.below(3);
            for (std::size_t j = 0; j < m; ++j) {
                const auto p = order[j];
                const auto v = random_subset(rng, piece.n, 1, unite(used, piece.labels[p]));
                used = unite(used, unite(v, piece.labels[p]));
                h.push_back({v, p});
            }
            piece.hypergraphs.push_back(std::move(h));
        }
        try {
            piece.validate();
            return piece;
        } catch (const InstanceError&) {
        }
    }
}

Outcome moments() {
    Rng rng(808);
    std::size_t cases = 0;
    std::size_t within = 0;
    double worst = 0.0;
    std::string failures;
    while (cases < 20) {
        const auto piece = random_piece(rng);
        const int ell = 3;
        const auto g = assemble_bipartite(piece, ell);
        const auto t = target_degrees_bipartite(piece.n, piece.q, piece.s, ell, piece.num_labels(),
                                                piece.max_matching_size(), g.D);
        if (std::max(t.analytic_left, t.analytic_right) <= 1.0) continue;
        const auto prof = degree_profile(g);
        double constant = 0.0;
        for (std::size_t l = 0; l < g.labels.size(); ++l) {
            for (auto [side, analytic] : {std::pair{Endpoint::left, t.analytic_left}, std::pair{Endpoint::right, t.analytic_right}}) {
                if (analytic <= 1.0) continue;
                const auto m = conditional_degree_moment(g, prof, l, side, 0, 1);
                constant = std::max(constant, (m.mean - 1) / analytic);
            }
        }
        ++cases;
        worst = std::max(worst, constant);
        if (constant <= 32) {
            ++within;
        } else {
            failures += " " + fmt(constant);
        }
    }
    std::string detail = std::to_string(within) + "/20 pieces within factor 32, max measured constant " + fmt(worst);
    if (!failures.empty()) detail += ", outside:" + failures;
    return {within * 100 >= 95 * cases, detail};
}

// ---------------------------------------------------------------- criterion 9

Outcome spectral_oracle() {
    Rng rng(909);
    std::size_t bad_lanczos = 0;
    std::size_t bad_power = 0;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t rows = 1 + rng.below(250);
        const std::size_t cols = 1 + rng.below(250);
        const std::size_t nnz = 1 + rng.below(std::min<std::size_t>(10000, rows * cols));
        std::vector<Triplet> entries;
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t e = 0; e < nnz; ++e) {
            const auto r = static_cast<std::uint32_t>(rng.below(rows));
            const auto c = static_cast<std::uint32_t>(rng.below(cols));
            const double v = t % 2 == 0 ? rng.normal() : static_cast<double>(rng.sign());
            entries.push_back({r, c, v});
            dense(r, c) += v;
        }
        const SparseMatrix a(rows, cols, std::move(entries));
        const double truth = Eigen::BDCSVD<Eigen::MatrixXd>(dense).singularValues()(0);
        PowerOptions opts;
        opts.dense_limit = 0;
        const double lz = spectral_norm(a, opts).value;
        opts.krylov = false;
        opts.max_iterations = 200000;
        opts.tolerance = 1e-12;
        const double pw = spectral_norm(a, opts).value;
        const auto rel = [&](double v) { return truth == 0 ? std::abs(v) : std::abs(v - truth) / truth; };
        if (rel(lz) > 1e-7) ++bad_lanczos;
        if (rel(pw) > 1e-7) ++bad_power;
        worst = std::max({worst, rel(lz), rel(pw)});
    }
    return {bad_lanczos == 0 && bad_power == 0,
            "100 matrices, " + std::to_string(bad_lanczos) + " Lanczos and " + std::to_string(bad_power) +
                " power-iteration disagreements, max relative error " + fmt(worst)};
}

// --------------------------------------------------------------- criterion 10

Outcome determinism(const std::vector<Run>& first, std::vector<Run> second) {
    set_thread_count(thread_count() == 1 ? 2 : 1);
    execute(second);
    std::size_t differ = 0;
    for (std::size_t i = 0; i < first.size(); ++i) differ += first[i].dump != second[i].dump ? 1 : 0;
    return {differ == 0, std::to_string(first.size()) + " certificates re-run with " + std::to_string(thread_count()) +
                             " worker(s), " + std::to_string(differ) + " differ"};
}

} // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    std::vector<Outcome> results(11);
    auto timed = [](const char* what, auto&& f) {
        const auto t0 = Clock::now();
        auto r = f();
        std::fprintf(stderr, "  [%s %.1fs]\n", what, std::chrono::duration<double>(Clock::now() - t0).count());
        return r;
    };

    results[1] = timed("edge counts", edge_counts);
    results[2] = timed("quadratic forms", quadratic_forms);
    results[3] = timed("decomposition", decomposition);

    auto runs = soundness_runs();
    auto planted_set = planted_runs();
    runs.insert(runs.end(), std::make_move_iterator(planted_set.begin()), std::make_move_iterator(planted_set.end()));
    std::vector<Run> fresh = runs;
    timed("certificates", [&] { execute(runs); return 0; });
    results[4] = certificate_soundness(runs);
    results[6] = timed("planted", [&] { return planted(runs); });
    const auto stats = timed("pruning", [&] { return pruning(runs); });
    results[7] = pruning_contract(stats);
    results[5] = timed("khintchine", [&] { return khintchine(stats); });
    results[8] = timed("moments", moments);
    results[9] = timed("spectral", spectral_oracle);
    results[10] = timed("determinism", [&] { return determinism(runs, std::move(fresh)); });

    bool all = true;
    for (int c = 1; c <= 10; ++c) {
        std::cout << "criterion " << c << ": " << (results[c].pass ? "PASS" : "FAIL") << "  " << results[c].detail
                  << '\n';
        all = all && results[c].pass;
    }
    std::cout << "total " << fmt(std::chrono::duration<double>(Clock::now() - start).count()) << "s\n";
    return all ? 0 : 1;
}
