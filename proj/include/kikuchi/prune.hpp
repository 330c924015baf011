#pragma once

#include "kikuchi/kikuchi_graph.hpp"

#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace kikuchi {

/// d for the regular graph (left == right), or (d_L, d_R) for bipartite
/// graphs, as exact rationals. The analytic fields are the degree-bound
/// shapes evaluated with constant 1; they are reported, never asserted.
struct TargetDegrees {
    Rational left = 0;
    Rational right = 0;
    std::size_t delta_n = 0;
    double analytic_left = 0.0;
    double analytic_right = 0.0;
};

/// d = δn k D / N with N = C(n, ℓ)^2.
[[nodiscard]] TargetDegrees target_degrees_regular(int n, int q, int ell, std::size_t k, std::size_t delta_n,
                                                   const BigInt& D);
/// d_L = δn D / N_L, d_R = δn D / N_R.
[[nodiscard]] TargetDegrees target_degrees_bipartite(int n, int q, int s, int ell, std::size_t registry_size,
                                                     std::size_t delta_n, const BigInt& D);

using DegreeMap = std::unordered_map<std::uint64_t, std::uint32_t>;

/// Per group i, how many edges of A_i meet each vertex (signs ignored).
struct DegreeProfile {
    std::vector<DegreeMap> left;
    std::vector<DegreeMap> right;
    std::uint32_t max_left = 0;
    std::uint32_t max_right = 0;
};

[[nodiscard]] DegreeProfile degree_profile(const KikuchiGraph& g);

enum class Endpoint { left, right };

struct MomentEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    bool exhaustive = false;
    std::size_t samples = 0;
};

inline constexpr std::size_t kExhaustiveMomentLimit = 100000;

/// Mean over uniformly random edges of `label` of the group degree at the
/// chosen endpoint. Exhaustive when the label has at most `exhaustive_limit`
/// edges, otherwise `samples` uniform draws.
[[nodiscard]] MomentEstimate conditional_degree_moment(const KikuchiGraph& g, const DegreeProfile& profile,
                                                       std::size_t label, Endpoint side, std::size_t samples,
                                                       std::uint64_t seed,
                                                       std::size_t exhaustive_limit = kExhaustiveMomentLimit);

class PruneError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PruneReport {
    BigInt D = 0;
    std::uint64_t d_prime = 0;
    double ratio = 0.0;
    /// D' >= D/2, the asymptotic guarantee; recorded, not required.
    bool half_guarantee = false;
    std::size_t heavy_left = 0;
    std::size_t heavy_right = 0;
    std::size_t dropped_heavy = 0;
    std::size_t dropped_trim = 0;
    std::uint32_t max_left_degree = 0;
    std::uint32_t max_right_degree = 0;
};

struct PrunedGraph {
    /// Same labels as the input, each with exactly d_prime edges.
    KikuchiGraph graph;
    std::uint64_t d_prime = 0;
    Rational gamma = 8;
    TargetDegrees target;
    PruneReport report;
};

inline const Rational kDefaultGamma = 8;

/// Single pass: per group mark vertices with degree > Γ·d (per side), drop
/// label edges meeting them, then trim every label to the global minimum
/// survivor count D' by dropping its lexicographically largest edges.
/// Symmetric variants drop edges in swapped pairs. Throws PruneError when
/// D' = 0.
[[nodiscard]] PrunedGraph prune(const KikuchiGraph& g, const TargetDegrees& target, const Rational& gamma = kDefaultGamma);

struct PruneCheck {
    bool subgraph = true;
    bool equalized = true;
    bool capped = true;
    bool symmetric = true;

    [[nodiscard]] bool ok() const { return subgraph && equalized && capped && symmetric; }
};

/// Re-checks B ⊆ A label by label, |B_label| = D', the degree caps and (for
/// symmetric variants) closure under endpoint swap.
[[nodiscard]] PruneCheck check_pruned(const KikuchiGraph& original, const PrunedGraph& pruned);

} // namespace kikuchi
