#pragma once

#include "kikuchi/instance.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kikuchi {

/// Kikuchi level ℓ and heavy-set thresholds d_t = (ℓ/n)^(t-3/2) k for
/// t = 2..(q+1)/2.
struct Thresholds {
    int q = 0;
    int ell = 1;
    std::map<int, double> d;
    /// k >= 4ℓ, the hypothesis under which the refutation theorems apply.
    bool k_at_least_4ell = false;
    /// d_{(q+1)/2} >= 1.
    bool smallest_at_least_one = false;

    [[nodiscard]] int max_level() const { return (q + 1) / 2; }
    [[nodiscard]] double at(int t) const { return d.at(t); }
};

/// ℓ = floor(n^(1-2/q) δ^(-2/q)) clamped to [1, n], unless overridden.
[[nodiscard]] Thresholds compute_thresholds(int n, std::size_t k, int q, double delta,
                                            std::optional<int> ell_override = std::nullopt);

/// The floor formula alone, robust to pow() landing just below an integer.
[[nodiscard]] int kikuchi_level(int n, int q, double delta);

struct Provenance {
    std::size_t hypergraph = 0;
    std::size_t position = 0;
    /// 0 when the hyperedge stayed in the leftover H'_i, else the piece s.
    int piece = 0;
    /// Position inside H'_i or H^(s)_i.
    std::size_t index = 0;
};

struct DecomposedInstance {
    /// H'_1..H'_k, same n, q and signs as the input.
    XorInstance leftover;
    /// s -> bipartite piece on H^(s)_i and registry P_s, for every s in 2..(q+1)/2.
    std::map<int, BipartiteXorInstance> pieces;
    /// One record per input hyperedge, in (i, position) order.
    std::vector<Provenance> provenance;
};

/// Greedy heavy-set decomposition. Levels t run from (q+1)/2 down to 2; at
/// each level the lexicographically smallest heavy set is promoted and the
/// floor(d_t)+1 hyperedges containing it with smallest (i, position) move to
/// the bipartite piece as (C \ Q, p_Q).
[[nodiscard]] DecomposedInstance decompose(const XorInstance& inst, const Thresholds& thr);

struct DecompositionReport {
    bool bipartite_shape = true;   // (1)
    bool leftover_subset = true;   // (2)
    bool correspondence = true;    // (3), including |H_i| = |H'_i| + sum_s |H^(s)_i|
    bool no_heavy_sets = true;     // (4)
    bool matchings_preserved = true; // (5)
    /// |P_s| * d_s / (2^q |H|) per s; the loose registry bound holds when <= 1.
    std::map<int, double> registry_ratio;
    bool registry_bound = true;
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const {
        return bipartite_shape && leftover_subset && correspondence && no_heavy_sets && matchings_preserved;
    }
};

[[nodiscard]] DecompositionReport verify_decomposition(const XorInstance& original, const DecomposedInstance& dec,
                                                       const Thresholds& thr);

/// y_p = prod_{v in p} x_v for every registered label of a piece.
[[nodiscard]] Signs lift_labels(const BipartiteXorInstance& piece, const Signs& x);

/// Phi_b(x) == Psi_b(x) + sum_s Psi^(s)_b(x, y(x)), exactly.
[[nodiscard]] bool recombination_check(const XorInstance& original, const DecomposedInstance& dec, const Signs& b,
                                       const Signs& x);

} // namespace kikuchi
