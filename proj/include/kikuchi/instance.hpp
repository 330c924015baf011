#pragma once

#include "kikuchi/combinatorics.hpp"
#include "kikuchi/vertex_set.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kikuchi {

/// ±1 vectors. Entries are always exactly -1 or +1.
using Signs = std::vector<int>;
using Hypergraph = std::vector<VertexSet>;

class InstanceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct MatchingViolation {
    std::size_t first = 0;
    std::size_t second = 0;
    Vertex vertex = 0;
};

struct MatchingCheck {
    bool ok = true;
    std::optional<MatchingViolation> violation;
};

/// True iff the edges are pairwise disjoint; otherwise names the first
/// colliding pair (by edge position) and a shared vertex.
[[nodiscard]] MatchingCheck validate_matching(std::span<const VertexSet> edges);

/// k hypergraph matchings over [n] plus optional right-hand sides b.
struct XorInstance {
    int n = 0;
    int q = 0;
    double delta = 0.0;
    std::vector<Hypergraph> hypergraphs;
    std::optional<Signs> signs;

    [[nodiscard]] std::size_t k() const noexcept { return hypergraphs.size(); }
    [[nodiscard]] std::size_t total_edges() const noexcept;
    [[nodiscard]] std::size_t max_matching_size() const noexcept;
    /// max_i |H_i| / n, measured rather than trusted from metadata.
    [[nodiscard]] Rational measured_delta() const;

    /// Checks indices, uniformity and (optionally) the matching property.
    void validate(bool require_matching = true) const;
};

/// Hyperedge (C, p) with C ⊆ [n] and p an index into the label registry.
struct BipartiteEdge {
    VertexSet left;
    std::uint32_t label = 0;

    friend auto operator<=>(const BipartiteEdge&, const BipartiteEdge&) = default;
    friend bool operator==(const BipartiteEdge&, const BipartiteEdge&) = default;
};

using BipartiteHypergraph = std::vector<BipartiteEdge>;

struct BipartiteXorInstance {
    int n = 0;
    int q = 0;
    int s = 0;
    /// Registry P_s: label index -> originating s-subset of [n].
    std::vector<VertexSet> labels;
    std::vector<BipartiteHypergraph> hypergraphs;
    std::optional<Signs> signs;

    [[nodiscard]] std::size_t k() const noexcept { return hypergraphs.size(); }
    [[nodiscard]] std::size_t num_labels() const noexcept { return labels.size(); }
    [[nodiscard]] std::size_t total_edges() const noexcept;
    [[nodiscard]] std::size_t max_matching_size() const noexcept;

    void validate(bool require_matching = true) const;
};

/// Disjoint left sets and distinct labels within each hypergraph.
[[nodiscard]] MatchingCheck validate_bipartite_matching(const BipartiteHypergraph& h);

struct Assignment {
    Signs x;
    Signs y;
};

[[nodiscard]] int monomial(const Signs& x, const VertexSet& c);

[[nodiscard]] std::int64_t eval_phi(const XorInstance& inst, const Signs& b, const Signs& x);
[[nodiscard]] std::int64_t eval_psi_bipartite(const BipartiteXorInstance& inst, const Signs& b, const Signs& x,
                                              const Signs& y);

class OracleLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultExhaustiveLimit = 24;

struct OracleResult {
    std::int64_t value = 0;
    Assignment argmax;
};

/// Exact max over all ±1 assignments (x, and y jointly for bipartite
/// instances). Refuses with OracleLimitExceeded past `limit` variables.
[[nodiscard]] OracleResult brute_force_val(const XorInstance& inst, const Signs& b,
                                           int limit = kDefaultExhaustiveLimit);
[[nodiscard]] OracleResult brute_force_val(const BipartiteXorInstance& inst, const Signs& b,
                                           int limit = kDefaultExhaustiveLimit);

struct ExpectedValue {
    double mean = 0.0;
    double stderr_ = 0.0;
    bool exhaustive = false;
    std::size_t samples = 0;
};

/// E_b[val] over uniform b. Exhaustive over all 2^k sign vectors when
/// k <= exhaustive_k, Monte Carlo with `trials` draws otherwise.
[[nodiscard]] ExpectedValue expected_val(const XorInstance& inst, std::size_t trials, std::uint64_t seed,
                                         std::size_t exhaustive_k = 16, int limit = kDefaultExhaustiveLimit);

/// Sign vector number `index` of the 2^k enumeration (bit r set -> b_r = -1).
[[nodiscard]] Signs signs_from_index(std::uint64_t index, std::size_t k);
[[nodiscard]] Signs random_signs(std::size_t k, std::uint64_t seed);

[[nodiscard]] XorInstance generate_random_matching_instance(int n, int q, std::size_t k, double delta,
                                                            std::uint64_t seed);

/// k x n generator matrix over GF(2); column v is a bitmask over message
/// coordinates. C(b)_v = prod_{r in column v} b_r.
struct LinearCode {
    std::size_t k = 0;
    std::vector<std::uint64_t> columns;

    [[nodiscard]] Signs encode(const Signs& b) const;
    [[nodiscard]] std::size_t rank() const;
};

struct PlantedInstance {
    XorInstance instance;
    LinearCode code;
};

/// Random full-rank linear code together with matchings whose constraints
/// the codeword satisfies for every message b.
[[nodiscard]] PlantedInstance generate_planted_linear_instance(int n, int q, std::size_t k, double delta,
                                                               std::uint64_t seed);

} // namespace kikuchi
