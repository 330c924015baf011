#include "kikuchi/instance.hpp"

#include "kikuchi/random.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace kikuchi {

double Rng::normal() {
    double u = uniform();
    while (u <= 0.0) {
        u = uniform();
    }
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.14159265358979323846 * v);
}

MatchingCheck validate_matching(std::span<const VertexSet> edges) {
    for (std::size_t a = 0; a < edges.size(); ++a) {
        for (std::size_t b = a + 1; b < edges.size(); ++b) {
            const auto& s = edges[a];
            const auto& t = edges[b];
            auto it = std::find_first_of(s.begin(), s.end(), t.begin(), t.end());
            if (it != s.end()) {
                return {false, MatchingViolation{a, b, *it}};
            }
        }
    }
    return {};
}

MatchingCheck validate_bipartite_matching(const BipartiteHypergraph& h) {
    for (std::size_t a = 0; a < h.size(); ++a) {
        for (std::size_t b = a + 1; b < h.size(); ++b) {
            const auto& s = h[a].left;
            const auto& t = h[b].left;
            auto it = std::find_first_of(s.begin(), s.end(), t.begin(), t.end());
            if (it != s.end()) {
                return {false, MatchingViolation{a, b, *it}};
            }
            if (h[a].label == h[b].label) {
                // labels live outside [n]; report the label index as the collision
                return {false, MatchingViolation{a, b, h[a].label}};
            }
        }
    }
    return {};
}

std::size_t XorInstance::total_edges() const noexcept {
    std::size_t t = 0;
    for (const auto& h : hypergraphs) {
        t += h.size();
    }
    return t;
}

std::size_t XorInstance::max_matching_size() const noexcept {
    std::size_t m = 0;
    for (const auto& h : hypergraphs) {
        m = std::max(m, h.size());
    }
    return m;
}

Rational XorInstance::measured_delta() const {
    if (n <= 0) {
        return Rational(0);
    }
    return Rational(static_cast<long long>(max_matching_size()), n);
}

namespace {

void check_signs(const std::optional<Signs>& signs, std::size_t k) {
    if (!signs) {
        return;
    }
    if (signs->size() != k) {
        throw InstanceError("sign vector has length " + std::to_string(signs->size()) + ", expected " +
                            std::to_string(k));
    }
    for (int b : *signs) {
        if (b != 1 && b != -1) {
            throw InstanceError("signs must be +1 or -1");
        }
    }
}

void check_vertex_range(const VertexSet& c, int n) {
    if (!c.empty() && static_cast<long long>(c.elements().back()) >= n) {
        throw InstanceError("hyperedge " + c.to_string() + " has a vertex outside [n]");
    }
}

} // namespace

void XorInstance::validate(bool require_matching) const {
    if (n <= 0 || q <= 0) {
        throw InstanceError("n and q must be positive");
    }
    for (std::size_t i = 0; i < hypergraphs.size(); ++i) {
        for (const auto& c : hypergraphs[i]) {
            if (c.size() != static_cast<std::size_t>(q)) {
                throw InstanceError("hyperedge " + c.to_string() + " in H_" + std::to_string(i + 1) +
                                    " is not of size q=" + std::to_string(q));
            }
            check_vertex_range(c, n);
        }
        if (require_matching) {
            const auto check = validate_matching(hypergraphs[i]);
            if (!check.ok) {
                throw InstanceError("H_" + std::to_string(i + 1) + " is not a matching: edges " +
                                    std::to_string(check.violation->first + 1) + " and " +
                                    std::to_string(check.violation->second + 1) + " share vertex " +
                                    std::to_string(check.violation->vertex + 1));
            }
        }
    }
    check_signs(signs, k());
}

std::size_t BipartiteXorInstance::total_edges() const noexcept {
    std::size_t t = 0;
    for (const auto& h : hypergraphs) {
        t += h.size();
    }
    return t;
}

std::size_t BipartiteXorInstance::max_matching_size() const noexcept {
    std::size_t m = 0;
    for (const auto& h : hypergraphs) {
        m = std::max(m, h.size());
    }
    return m;
}

void BipartiteXorInstance::validate(bool require_matching) const {
    if (n <= 0 || q <= 0 || s < 1) {
        throw InstanceError("bipartite instance needs positive n, q, s");
    }
    for (const auto& p : labels) {
        if (p.size() != static_cast<std::size_t>(s)) {
            throw InstanceError("label " + p.to_string() + " is not an s-subset");
        }
        check_vertex_range(p, n);
    }
    for (std::size_t i = 0; i < hypergraphs.size(); ++i) {
        for (const auto& e : hypergraphs[i]) {
            if (e.left.size() != static_cast<std::size_t>(q - s)) {
                throw InstanceError("bipartite hyperedge left side must have q-s vertices");
            }
            check_vertex_range(e.left, n);
            if (e.label >= labels.size()) {
                throw InstanceError("unknown label index " + std::to_string(e.label + 1));
            }
        }
        if (require_matching && !validate_bipartite_matching(hypergraphs[i]).ok) {
            throw InstanceError("bipartite H_" + std::to_string(i + 1) + " is not a matching");
        }
    }
    check_signs(signs, k());
}

int monomial(const Signs& x, const VertexSet& c) {
    int v = 1;
    for (Vertex u : c) {
        v *= x[u];
    }
    return v;
}

std::int64_t eval_phi(const XorInstance& inst, const Signs& b, const Signs& x) {
    if (b.size() != inst.k() || x.size() != static_cast<std::size_t>(inst.n)) {
        throw InstanceError("eval_phi: dimension mismatch");
    }
    std::int64_t total = 0;
    for (std::size_t i = 0; i < inst.k(); ++i) {
        for (const auto& c : inst.hypergraphs[i]) {
            total += b[i] * monomial(x, c);
        }
    }
    return total;
}

std::int64_t eval_psi_bipartite(const BipartiteXorInstance& inst, const Signs& b, const Signs& x, const Signs& y) {
    if (b.size() != inst.k() || x.size() != static_cast<std::size_t>(inst.n) || y.size() != inst.num_labels()) {
        throw InstanceError("eval_psi_bipartite: dimension mismatch");
    }
    std::int64_t total = 0;
    for (std::size_t i = 0; i < inst.k(); ++i) {
        for (const auto& e : inst.hypergraphs[i]) {
            if (e.label >= y.size()) {
                throw InstanceError("eval_psi_bipartite: unknown label");
            }
            total += b[i] * y[e.label] * monomial(x, e.left);
        }
    }
    return total;
}

namespace {

// Signed multilinear polynomial over `num_vars` ±1 variables.
struct MonomialSystem {
    int num_vars = 0;
    std::vector<std::vector<int>> vars;
    std::vector<int> coeff;
};

OracleResult maximize(const MonomialSystem& sys, int limit) {
    if (sys.num_vars > limit) {
        throw OracleLimitExceeded("exhaustive oracle refused: " + std::to_string(sys.num_vars) +
                                  " variables exceed the limit of " + std::to_string(limit));
    }
    const int nv = sys.num_vars;
    std::vector<std::vector<std::size_t>> touching(static_cast<std::size_t>(nv));
    for (std::size_t m = 0; m < sys.vars.size(); ++m) {
        for (int v : sys.vars[m]) {
            touching[static_cast<std::size_t>(v)].push_back(m);
        }
    }
    std::vector<int> term(sys.coeff);
    std::int64_t value = std::accumulate(term.begin(), term.end(), std::int64_t{0});
    std::int64_t best = value;
    std::uint64_t best_state = 0;
    std::uint64_t state = 0;
    const std::uint64_t count = std::uint64_t{1} << nv;
    // Gray-code walk: one variable flips per step.
    for (std::uint64_t g = 1; g < count; ++g) {
        const int flip = __builtin_ctzll(g);
        state ^= std::uint64_t{1} << flip;
        for (std::size_t m : touching[static_cast<std::size_t>(flip)]) {
            term[m] = -term[m];
            value += 2 * term[m];
        }
        if (value > best) {
            best = value;
            best_state = state;
        }
    }
    OracleResult r;
    r.value = best;
    r.argmax.x.resize(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        r.argmax.x[static_cast<std::size_t>(v)] = ((best_state >> v) & 1U) != 0 ? -1 : 1;
    }
    return r;
}

} // namespace

OracleResult brute_force_val(const XorInstance& inst, const Signs& b, int limit) {
    if (b.size() != inst.k()) {
        throw InstanceError("brute_force_val: sign vector length mismatch");
    }
    MonomialSystem sys;
    sys.num_vars = inst.n;
    for (std::size_t i = 0; i < inst.k(); ++i) {
        for (const auto& c : inst.hypergraphs[i]) {
            sys.vars.emplace_back(c.begin(), c.end());
            sys.coeff.push_back(b[i]);
        }
    }
    return maximize(sys, limit);
}

OracleResult brute_force_val(const BipartiteXorInstance& inst, const Signs& b, int limit) {
    if (b.size() != inst.k()) {
        throw InstanceError("brute_force_val: sign vector length mismatch");
    }
    MonomialSystem sys;
    sys.num_vars = inst.n + static_cast<int>(inst.num_labels());
    for (std::size_t i = 0; i < inst.k(); ++i) {
        for (const auto& e : inst.hypergraphs[i]) {
            std::vector<int> vs(e.left.begin(), e.left.end());
            vs.push_back(inst.n + static_cast<int>(e.label));
            sys.vars.push_back(std::move(vs));
            sys.coeff.push_back(b[i]);
        }
    }
    auto r = maximize(sys, limit);
    r.argmax.y.assign(r.argmax.x.begin() + inst.n, r.argmax.x.end());
    r.argmax.x.resize(static_cast<std::size_t>(inst.n));
    return r;
}

Signs signs_from_index(std::uint64_t index, std::size_t k) {
    Signs b(k, 1);
    for (std::size_t r = 0; r < k; ++r) {
        if (((index >> r) & 1U) != 0) {
            b[r] = -1;
        }
    }
    return b;
}

Signs random_signs(std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    Signs b(k);
    for (auto& v : b) {
        v = rng.sign();
    }
    return b;
}

ExpectedValue expected_val(const XorInstance& inst, std::size_t trials, std::uint64_t seed, std::size_t exhaustive_k,
                           int limit) {
    ExpectedValue ev;
    std::vector<double> vals;
    if (inst.k() <= exhaustive_k && inst.k() < 63) {
        const std::uint64_t count = std::uint64_t{1} << inst.k();
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            vals.push_back(static_cast<double>(brute_force_val(inst, signs_from_index(idx, inst.k()), limit).value));
        }
        ev.exhaustive = true;
    } else {
        for (std::size_t t = 0; t < trials; ++t) {
            const auto b = random_signs(inst.k(), mix_seed(seed, t));
            vals.push_back(static_cast<double>(brute_force_val(inst, b, limit).value));
        }
    }
    ev.samples = vals.size();
    if (vals.empty()) {
        return ev;
    }
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
    ev.mean = mean;
    if (!ev.exhaustive && vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) {
            ss += (v - mean) * (v - mean);
        }
        ev.stderr_ = std::sqrt(ss / static_cast<double>(vals.size() - 1) / static_cast<double>(vals.size()));
    }
    return ev;
}

namespace {

std::size_t checked_matching_size(int n, int q, double delta) {
    if (n <= 0 || q <= 0 || !(delta > 0.0) || delta > 1.0) {
        throw InstanceError("need n, q > 0 and delta in (0, 1]");
    }
    const auto m = static_cast<std::size_t>(std::floor(delta * n + 1e-9));
    if (m * static_cast<std::size_t>(q) > static_cast<std::size_t>(n)) {
        throw InstanceError("infeasible: floor(delta n) * q = " + std::to_string(m * q) + " exceeds n = " +
                            std::to_string(n));
    }
    return m;
}

} // namespace

XorInstance generate_random_matching_instance(int n, int q, std::size_t k, double delta, std::uint64_t seed) {
    const std::size_t m = checked_matching_size(n, q, delta);
    Rng rng(seed);
    XorInstance inst;
    inst.n = n;
    inst.q = q;
    inst.delta = delta;
    std::vector<Vertex> perm(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < k; ++i) {
        std::iota(perm.begin(), perm.end(), Vertex{0});
        rng.shuffle(perm);
        Hypergraph h;
        for (std::size_t e = 0; e < m; ++e) {
            auto first = perm.begin() + static_cast<std::ptrdiff_t>(e * q);
            h.emplace_back(std::vector<Vertex>(first, first + q));
        }
        inst.hypergraphs.push_back(std::move(h));
    }
    return inst;
}

Signs LinearCode::encode(const Signs& b) const {
    if (b.size() != k) {
        throw InstanceError("encode: message length mismatch");
    }
    std::uint64_t negative = 0;
    for (std::size_t r = 0; r < k; ++r) {
        if (b[r] == -1) {
            negative |= std::uint64_t{1} << r;
        }
    }
    Signs x(columns.size());
    for (std::size_t v = 0; v < columns.size(); ++v) {
        x[v] = (popcount(columns[v] & negative) % 2 == 1) ? -1 : 1;
    }
    return x;
}

std::size_t LinearCode::rank() const {
    std::vector<std::uint64_t> basis;
    for (auto col : columns) {
        for (auto b : basis) {
            col = std::min(col, col ^ b);
        }
        if (col != 0) {
            basis.push_back(col);
            std::sort(basis.rbegin(), basis.rend());
        }
    }
    return basis.size();
}

namespace {

std::optional<PlantedInstance> try_planted(int n, int q, std::size_t k, std::size_t m, Rng& rng) {
    const auto nn = static_cast<std::size_t>(n);
    const std::uint64_t msg_mask = k == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << k) - 1);
    std::vector<std::optional<std::uint64_t>> col(nn);
    std::vector<std::vector<bool>> used(k, std::vector<bool>(nn, false));
    std::vector<Hypergraph> hs(k);

    auto random_column = [&] { return rng.next() & msg_mask; };

    for (std::size_t round = 0; round < m; ++round) {
        for (std::size_t i = 0; i < k; ++i) {
            const std::uint64_t target = std::uint64_t{1} << i;
            std::vector<Vertex> assigned;
            std::vector<Vertex> fresh;
            for (std::size_t v = 0; v < nn; ++v) {
                if (used[i][v]) {
                    continue;
                }
                (col[v] ? assigned : fresh).push_back(static_cast<Vertex>(v));
            }
            rng.shuffle(assigned);
            rng.shuffle(fresh);
            std::vector<Vertex> edge;
            if (!fresh.empty()) {
                // q-1 partners (reuse assigned columns first), then solve one fresh column
                const Vertex solved = fresh.back();
                fresh.pop_back();
                for (std::size_t t = 0; t + 1 < static_cast<std::size_t>(q); ++t) {
                    if (t < assigned.size()) {
                        edge.push_back(assigned[t]);
                    } else if (!fresh.empty()) {
                        const Vertex v = fresh.back();
                        fresh.pop_back();
                        col[v] = random_column();
                        edge.push_back(v);
                    } else {
                        return std::nullopt;
                    }
                }
                std::uint64_t acc = target;
                for (Vertex v : edge) {
                    acc ^= *col[v];
                }
                col[solved] = acc;
                edge.push_back(solved);
            } else {
                // every column is fixed: search for q columns summing to e_i
                std::sort(assigned.begin(), assigned.end());
                VertexSet pool(assigned);
                bool found = false;
                for (const auto& cand : subsets_of_size(pool, static_cast<std::size_t>(q))) {
                    std::uint64_t acc = 0;
                    for (Vertex v : cand) {
                        acc ^= *col[v];
                    }
                    if (acc == target) {
                        edge = cand.elements();
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    return std::nullopt;
                }
            }
            for (Vertex v : edge) {
                used[i][v] = true;
            }
            hs[i].emplace_back(std::move(edge));
        }
    }
    PlantedInstance out;
    out.code.k = k;
    for (std::size_t v = 0; v < nn; ++v) {
        out.code.columns.push_back(col[v] ? *col[v] : random_column());
    }
    if (out.code.rank() != k) {
        return std::nullopt;
    }
    out.instance.n = n;
    out.instance.q = q;
    out.instance.hypergraphs = std::move(hs);
    return out;
}

} // namespace

PlantedInstance generate_planted_linear_instance(int n, int q, std::size_t k, double delta, std::uint64_t seed) {
    const std::size_t m = checked_matching_size(n, q, delta);
    if (k == 0 || k > 63 || k > static_cast<std::size_t>(n)) {
        throw InstanceError("planted code needs 1 <= k <= min(n, 63)");
    }
    Rng rng(seed);
    constexpr int kAttempts = 2000;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        if (auto planted = try_planted(n, q, k, m, rng)) {
            planted->instance.delta = delta;
            return std::move(*planted);
        }
    }
    throw InstanceError("infeasible: could not plant a linear code with these parameters");
}

} // namespace kikuchi
