#pragma once

#include "kikuchi/combinatorics.hpp"
#include "kikuchi/instance.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace kikuchi {

enum class Variant { basic_even, naive_odd, regular_cs, bipartite };

[[nodiscard]] std::string to_string(Variant v);
[[nodiscard]] Variant variant_from_string(const std::string& s);

/// Which assignment a space component is lifted through.
enum class Domain { x, y };

struct SpaceComponent {
    int ground = 0;
    int size = 0;
    Domain domain = Domain::x;
};

/// Product of subset families C(ground, size); a vertex is a tuple of
/// subsets, ranked per component in colex order and combined mixed radix.
class VertexSpace {
public:
    VertexSpace() = default;
    explicit VertexSpace(std::vector<SpaceComponent> components);

    [[nodiscard]] const std::vector<SpaceComponent>& components() const noexcept { return components_; }
    [[nodiscard]] const BigInt& cardinality() const noexcept { return cardinality_; }
    /// Cardinality as uint64; throws std::overflow_error if it does not fit.
    [[nodiscard]] std::uint64_t size_u64() const;

    [[nodiscard]] std::uint64_t rank(std::span<const Mask> parts) const;
    [[nodiscard]] std::vector<Mask> unrank(std::uint64_t r) const;

    friend bool operator==(const VertexSpace& a, const VertexSpace& b) {
        return a.radix_ == b.radix_ && a.cardinality_ == b.cardinality_ &&
               std::equal(a.components_.begin(), a.components_.end(), b.components_.begin(), b.components_.end(),
                          [](const SpaceComponent& s, const SpaceComponent& t) {
                              return s.ground == t.ground && s.size == t.size && s.domain == t.domain;
                          });
    }

private:
    std::vector<SpaceComponent> components_;
    std::vector<std::uint64_t> radix_;
    BigInt cardinality_ = 1;
};

struct Edge {
    std::uint64_t left = 0;
    std::uint64_t right = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline constexpr std::uint32_t kNoPartner = std::numeric_limits<std::uint32_t>::max();

/// The constraint an edge set came from. `group` is the Rademacher index i;
/// regular_cs labels also carry the partner j and shared vertex u, bipartite
/// labels the registry index p.
struct EdgeLabel {
    std::uint32_t group = 0;
    std::uint32_t partner = kNoPartner;
    Vertex shared = 0;
    VertexSet c1;
    VertexSet c2;
    std::uint32_t p = 0;
};

struct KikuchiGraph {
    Variant variant = Variant::naive_odd;
    int n = 0;
    int q = 0;
    int s = 0;
    int ell = 0;
    std::size_t num_groups = 0;
    std::size_t registry_size = 0;
    VertexSpace left;
    VertexSpace right;
    std::vector<EdgeLabel> labels;
    /// Edges of label l are edges[offsets[l] .. offsets[l+1]).
    std::vector<Edge> edges;
    std::vector<std::size_t> offsets{0};
    /// Closed-form per-label edge count.
    BigInt D = 0;

    [[nodiscard]] bool symmetric() const noexcept {
        return variant == Variant::basic_even || variant == Variant::regular_cs;
    }
    [[nodiscard]] std::span<const Edge> label_edges(std::size_t l) const {
        return {edges.data() + offsets[l], offsets[l + 1] - offsets[l]};
    }
    /// b_i, or b_i b_j for regular_cs labels.
    [[nodiscard]] int label_sign(std::size_t l, const Signs& b) const;

    void add_label(EdgeLabel label, std::span<const Edge> label_edges);
};

using EdgeList = std::vector<Edge>;

// Closed forms for the per-constraint edge count.
[[nodiscard]] BigInt edge_count_basic_even(int q, int n, int ell);
[[nodiscard]] BigInt edge_count_naive_odd(int q, int n, int ell);
[[nodiscard]] BigInt edge_count_regular_cs(int q, int n, int ell);
[[nodiscard]] BigInt edge_count_bipartite(int q, int s, int n, int ell, std::size_t registry_size);

// Vertex spaces of each variant (left, right).
[[nodiscard]] std::pair<VertexSpace, VertexSpace> spaces_basic_even(int n, int ell);
[[nodiscard]] std::pair<VertexSpace, VertexSpace> spaces_naive_odd(int n, int ell);
[[nodiscard]] std::pair<VertexSpace, VertexSpace> spaces_regular_cs(int n, int ell);
[[nodiscard]] std::pair<VertexSpace, VertexSpace> spaces_bipartite(int n, int s, int ell, std::size_t registry_size);

/// {(S,T) : |S| = |T| = ℓ, S ⊕ T = C}. Rejects odd |C|.
[[nodiscard]] EdgeList build_basic_even(const VertexSet& c, int n, int ell);
/// {(S,T) : |S| = ℓ, |T| = ℓ+1, S ⊕ T = C}. Rejects even |C|.
[[nodiscard]] EdgeList build_naive_odd(const VertexSet& c, int n, int ell);
/// {((S1,S2),(T1,T2)) : all of size ℓ, S1 ⊕ T1 = C1, S2 ⊕ T2 = C2}.
[[nodiscard]] EdgeList build_regular_cs(const VertexSet& c1, const VertexSet& c2, int n, int ell);
/// Left (S1, S2), right (T1, T2 = S2 ∪ {p}) with S1 ⊕ T1 = C and |S1 ∩ C| = (q-1)/2.
/// Empty when the sizes are infeasible.
[[nodiscard]] EdgeList build_bipartite(const VertexSet& c, std::uint32_t p, int q, int s, int n, int ell,
                                       std::size_t registry_size);

/// Every label of every hypergraph, signs attached at evaluation time.
[[nodiscard]] KikuchiGraph assemble_basic_even(const XorInstance& inst, int ell);
[[nodiscard]] KikuchiGraph assemble_naive_odd(const XorInstance& inst, int ell);
/// Labels are supplied by the caller (see cauchy_schwarz_pairs); group = i, partner = j.
[[nodiscard]] KikuchiGraph assemble_regular_cs(int n, int q, int ell, std::size_t k,
                                               const std::vector<EdgeLabel>& labels);
[[nodiscard]] KikuchiGraph assemble_bipartite(const BipartiteXorInstance& inst, int ell);

/// Product of x (or y) over every set of a vertex tuple.
[[nodiscard]] int lift_assignment(const VertexSpace& space, std::uint64_t vertex, const Signs& x, const Signs& y);

/// The monomial of a label: x_C, x_{C1} x_{C2}, or y_p x_C.
[[nodiscard]] int label_monomial(const KikuchiGraph& g, std::size_t l, const Signs& x, const Signs& y);

struct QuadraticForm {
    std::int64_t total = 0;
    std::vector<std::int64_t> per_label;
};

/// z^T A w summed edge by edge with exact integers.
[[nodiscard]] QuadraticForm quadratic_form(const KikuchiGraph& g, const Signs& b, const Signs& x, const Signs& y);

/// Per-label form equals D times the label's signed monomial, for all labels.
[[nodiscard]] bool check_quadratic_form(const KikuchiGraph& g, const Signs& b, const Signs& x, const Signs& y);

/// Re-derives each edge's defining predicate from its unranked endpoints;
/// returns the number of edges that fail.
[[nodiscard]] std::size_t count_predicate_violations(const KikuchiGraph& g);

/// Labels whose edge count differs from D.
[[nodiscard]] std::size_t count_edge_count_mismatches(const KikuchiGraph& g);

enum class Side { forward, transpose };

/// y = A v (v over the right space) or y = A^T v (v over the left space),
/// with label weights b. Dense vectors sized by the space cardinalities.
[[nodiscard]] std::vector<double> matvec(const KikuchiGraph& g, const Signs& b, std::span<const double> v, Side side);

using SparseVector = std::unordered_map<std::uint64_t, double>;

/// Same product touching only the support of v.
[[nodiscard]] SparseVector matvec_sparse(const KikuchiGraph& g, const Signs& b, const SparseVector& v, Side side);

} // namespace kikuchi
