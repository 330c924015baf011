#pragma once

#include "kikuchi/decompose.hpp"
#include "kikuchi/kikuchi_graph.hpp"
#include "kikuchi/prune.hpp"
#include "kikuchi/spectral.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kikuchi {

/// L and R split [k]; both sorted.
struct Partition {
    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    std::uint64_t seed = 0;
};

enum class PartitionScheme {
    /// L_a = {i : <a, i+1> odd} for every a in GF(2)^m, 2^m >= k+1. Each
    /// ordered pair i != j lands in L x R for exactly a quarter of the family.
    pairwise,
    /// Independent fair coins per index; the cross-term average is only
    /// approximate, so the per-b chain is not guaranteed.
    random,
};

[[nodiscard]] std::string to_string(PartitionScheme s);
[[nodiscard]] PartitionScheme partition_scheme_from_string(const std::string& s);

/// `count` and `seed` only matter for the random scheme.
[[nodiscard]] std::vector<Partition> partition_family(std::size_t k, PartitionScheme scheme, std::size_t count,
                                                      std::uint64_t seed);

/// Labels (i, j, u, C1, C2) for i in L, j in R and every pair of hyperedges
/// (u, C1) in H_i, (u, C2) in H_j sharing the vertex u.
[[nodiscard]] std::vector<EdgeLabel> cauchy_schwarz_pairs(const XorInstance& inst, const Partition& partition);

/// f_{L,R}(x) = sum over those labels of b_i b_j x_{C1} x_{C2}.
[[nodiscard]] std::int64_t eval_f(const XorInstance& inst, const Partition& partition, const Signs& b,
                                  const Signs& x);

class RegularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RegularityViolation {
    VertexSet set;
    std::size_t degree = 0;
    double threshold = 0.0;
};

/// Sets Q with 2 <= |Q| <= (q+1)/2 and deg_H(Q) > d_|Q| over the union of
/// all hypergraphs.
[[nodiscard]] std::vector<RegularityViolation> regularity_violations(const XorInstance& inst, const Thresholds& thr);

struct RefuteOptions {
    std::optional<int> ell;
    Rational gamma = kDefaultGamma;
    /// Sign draws when k exceeds exhaustive_k.
    std::size_t trials = 200;
    std::uint64_t seed = 7;
    PartitionScheme scheme = PartitionScheme::pairwise;
    std::size_t random_partitions = 4;
    bool check_regularity = true;
    PowerOptions power;
    std::size_t exhaustive_k = kExhaustiveSignLimit;
    double epsilon = 0.1;
    /// Attach brute-force val(Φ_b) to every per-sign record.
    bool oracle = false;
};

/// What the certified value of one chain term needs, as recorded in the
/// certificate; soundness checks recompute bounds from these.
struct PartitionTerm {
    std::size_t labels = 0;
    BigInt N = 0;
    std::uint64_t d_prime = 0;
    /// Pruning failed: val(f) <= #labels is used instead.
    bool fallback = false;
};

/// Realized bound on val(f_{L,R}) given ||B||: (N / D') ||B||.
[[nodiscard]] double partition_f_bound(const PartitionTerm& t, double norm);

/// sqrt(q n total_edges + 4 n mean(f_bounds)) / q.
[[nodiscard]] double cauchy_schwarz_bound(int q, int n, std::size_t total_edges, std::span<const double> f_bounds);

struct PieceTerm {
    std::size_t edges = 0;
    BigInt N_left = 0;
    BigInt N_right = 0;
    std::uint64_t d_prime = 0;
    /// Graph unusable (D = 0, empty space, pruning or build failure).
    bool trivial = false;
    /// |P_s| < 4ℓ: also cap at the edge count.
    bool capped = false;
};

/// sqrt(N_L N_R) / D' * ||B||, or the edge count where that applies.
[[nodiscard]] double piece_bound(const PieceTerm& t, double norm);

struct PartitionState {
    Partition partition;
    KikuchiGraph graph;
    std::optional<PrunedGraph> pruned;
    GraphPattern pattern;
    PartitionTerm term;
    std::string failure;
};

/// The Cauchy–Schwarz refutation of one q-XOR instance, prepared once and
/// evaluated per sign vector.
class RegularRefuter {
public:
    RegularRefuter(const XorInstance& inst, const Thresholds& thr, std::size_t delta_n, const RefuteOptions& opts);

    [[nodiscard]] const std::vector<PartitionState>& partitions() const noexcept { return parts_; }
    [[nodiscard]] const BigInt& D() const noexcept { return D_; }
    [[nodiscard]] std::size_t total_edges() const noexcept { return total_edges_; }
    /// ℓ too small for any edge: only val <= Σ|H_i| is available.
    [[nodiscard]] bool trivial() const noexcept { return trivial_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// ||B_P(b)|| per partition (0 where there is no graph).
    [[nodiscard]] std::vector<NormEstimate> norms(const Signs& b) const;
    [[nodiscard]] double bound(const std::vector<NormEstimate>& norms) const;

    /// (N / D') E_{b_R} sqrt(2 σ²(b_R) ln 2N) for partition p.
    [[nodiscard]] double khintchine_f_bound(std::size_t p) const;

private:
    const XorInstance* inst_;
    RefuteOptions opts_;
    int ell_ = 0;
    BigInt D_ = 0;
    std::size_t total_edges_ = 0;
    bool trivial_ = false;
    std::vector<PartitionState> parts_;
    std::vector<std::string> warnings_;
};

/// The bipartite refutation of one decomposed piece.
class BipartiteRefuter {
public:
    BipartiteRefuter(const BipartiteXorInstance& piece, int ell, std::size_t delta_n, const RefuteOptions& opts);

    [[nodiscard]] const KikuchiGraph& graph() const noexcept { return graph_; }
    [[nodiscard]] const std::optional<PrunedGraph>& pruned() const noexcept { return pruned_; }
    [[nodiscard]] const PieceTerm& term() const noexcept { return term_; }
    [[nodiscard]] const std::string& failure() const noexcept { return failure_; }
    [[nodiscard]] const BigInt& D() const noexcept { return graph_.D; }

    [[nodiscard]] NormEstimate norm(const Signs& b) const;
    [[nodiscard]] double bound(double norm) const { return piece_bound(term_, norm); }
    /// Khintchine variant with all groups weighted 1, plus σ².
    [[nodiscard]] std::pair<double, double> khintchine() const;

private:
    const BipartiteXorInstance* piece_;
    RefuteOptions opts_;
    KikuchiGraph graph_;
    std::optional<PrunedGraph> pruned_;
    GraphPattern pattern_;
    PieceTerm term_;
    std::string failure_;
};

enum class CertificateKind { regular, bipartite, combined };

[[nodiscard]] std::string to_string(CertificateKind k);
[[nodiscard]] CertificateKind certificate_kind_from_string(const std::string& s);

struct CertificateParams {
    int n = 0;
    std::size_t k = 0;
    int q = 0;
    /// Set for bipartite certificates only.
    int s = 0;
    /// Measured max_i |H_i|, i.e. δn.
    std::size_t delta_n = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    /// Level used; rebuilds pass it as an override.
    int ell = 0;
    Rational gamma = kDefaultGamma;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    PartitionScheme scheme = PartitionScheme::pairwise;
    std::size_t random_partitions = 0;
    bool check_regularity = true;
    std::size_t exhaustive_k = kExhaustiveSignLimit;
    double power_tolerance = 0.0;
};

struct PartitionRecord {
    Partition partition;
    PartitionTerm term;
    BigInt D = 0;
    std::optional<PruneReport> prune;
    std::string failure;
    /// (N / D') E_{b_R} Khintchine bound.
    double khintchine_f_bound = 0.0;
    /// Mean over the certificate's sign vectors of ||B_P(b)||.
    double mean_norm = 0.0;
};

struct RegularRecord {
    std::size_t total_edges = 0;
    BigInt D = 0;
    bool trivial = false;
    bool exact_family = true;
    std::vector<PartitionRecord> partitions;
    /// Mean over b of the realized chain.
    double mean_bound = 0.0;
    /// Chain through the Khintchine estimates (Jensen on the square root).
    double analytic_bound = 0.0;
    /// Smallest single-partition chain, averaged over b; not a certified bound.
    double best_partition_diagnostic = 0.0;
    /// n sqrt(δ k) (k ℓ ln n)^(1/4), constant 1.
    double analytic_shape = 0.0;
};

struct PieceRecord {
    int s = 0;
    std::size_t registry_size = 0;
    PieceTerm term;
    BigInt D = 0;
    std::optional<PruneReport> prune;
    std::string failure;
    double sigma2 = 0.0;
    double khintchine_bound = 0.0;
    double mean_norm = 0.0;
    double mean_bound = 0.0;
    double analytic_bound = 0.0;
    /// δn sqrt(k ℓ ln n), constant 1.
    double analytic_shape = 0.0;
};

struct SignRecord {
    Signs b;
    double bound = 0.0;
    double regular = 0.0;
    std::vector<double> pieces;
    std::optional<std::int64_t> val;
};

struct Certificate {
    CertificateKind kind = CertificateKind::combined;
    CertificateParams params;
    std::map<int, double> thresholds;
    std::optional<RegularRecord> regular;
    std::vector<PieceRecord> pieces;
    std::vector<SignRecord> per_sign;
    bool exhaustive_signs = false;
    /// Mean over per_sign of the realized combined bound.
    double final_bound = 0.0;
    double analytic_bound = 0.0;
    /// ε δ n k
    double target = 0.0;
    bool refuted = false;
    std::vector<std::string> warnings;
};

/// The sign vectors a certificate is evaluated on: all 2^k when k <= exhaustive_k,
/// else `trials` seeded draws.
[[nodiscard]] std::vector<Signs> certificate_signs(std::size_t k, std::size_t trials, std::uint64_t seed,
                                                   std::size_t exhaustive_k);

[[nodiscard]] Certificate refute_regular(const XorInstance& inst, const RefuteOptions& opts);
[[nodiscard]] Certificate refute_bipartite(const BipartiteXorInstance& piece, const RefuteOptions& opts);
[[nodiscard]] Certificate refute_full(const XorInstance& inst, const RefuteOptions& opts);

/// Options that rebuild the refuters a certificate was made with.
[[nodiscard]] RefuteOptions options_from(const CertificateParams& p);

struct SoundnessEntry {
    Signs b;
    std::int64_t val = 0;
    double bound = 0.0;
    bool ok = true;
};

struct SoundnessLog {
    std::vector<SoundnessEntry> entries;
    /// Rebuilt D, D', N and the recorded per-sign bounds match the certificate.
    bool consistent = true;
    std::vector<std::string> mismatches;

    [[nodiscard]] bool sound() const;
    [[nodiscard]] bool ok() const { return sound() && consistent; }
};

inline constexpr double kSoundnessGuard = 1e-6;

/// For each b: recompute the certified bound from realized norms and the
/// certificate's recorded D' and N, and compare with brute-force val(Φ_b)
/// (bound * (1 + 1e-6) >= val).
[[nodiscard]] SoundnessLog soundness_check(const Certificate& cert, const XorInstance& inst,
                                           const std::vector<Signs>& signs);
[[nodiscard]] SoundnessLog soundness_check(const Certificate& cert, const BipartiteXorInstance& piece,
                                           const std::vector<Signs>& signs);

} // namespace kikuchi
