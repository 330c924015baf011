#include "kikuchi/random.hpp"
#include "kikuchi/refute.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace kikuchi;

namespace {

XorInstance make_instance(int n, int q, std::vector<Hypergraph> hs) {
    XorInstance inst;
    inst.n = n;
    inst.q = q;
    inst.hypergraphs = std::move(hs);
    inst.delta = static_cast<double>(inst.max_matching_size()) / n;
    return inst;
}

Signs random_x(Rng& rng, int n) {
    Signs x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.sign();
    return x;
}

// g_u(x) = sum_i b_i sum_{C in H_i, u in C} x_{C \ u}; the Cauchy-Schwarz
// step squares these directly.
std::int64_t sum_g_squared(const XorInstance& inst, const Signs& b, const Signs& x) {
    std::int64_t total = 0;
    for (int u = 0; u < inst.n; ++u) {
        std::int64_t g = 0;
        for (std::size_t i = 0; i < inst.k(); ++i) {
            for (const auto& c : inst.hypergraphs[i]) {
                if (!c.contains(static_cast<Vertex>(u))) continue;
                int m = b[i];
                for (auto v : c)
                    if (v != static_cast<Vertex>(u)) m *= x[v];
                g += m;
            }
        }
        total += g * g;
    }
    return total;
}

RefuteOptions small_options(int ell) {
    RefuteOptions o;
    o.ell = ell;
    o.trials = 16;
    o.seed = 3;
    o.oracle = true;
    return o;
}

} // namespace

TEST_CASE("cauchy_schwarz_pairs") {
    auto inst = make_instance(5, 3, {{VertexSet{0, 1, 2}}, {VertexSet{0, 3, 4}}});
    Partition p{{0}, {1}, 0};
    auto labels = cauchy_schwarz_pairs(inst, p);
    REQUIRE(labels.size() == 1);
    CHECK(labels[0].group == 0);
    CHECK(labels[0].partner == 1);
    CHECK(labels[0].shared == 0);
    CHECK(labels[0].c1 == VertexSet{1, 2});
    CHECK(labels[0].c2 == VertexSet{3, 4});

    CHECK(cauchy_schwarz_pairs(inst, Partition{{1}, {0}, 0}).size() == 1);
    CHECK(cauchy_schwarz_pairs(inst, Partition{{0, 1}, {}, 0}).empty());

    auto disjoint = make_instance(6, 3, {{VertexSet{0, 1, 2}}, {VertexSet{3, 4, 5}}});
    CHECK(cauchy_schwarz_pairs(disjoint, p).empty());

    // two shared vertices give two decompositions
    auto twice = make_instance(4, 3, {{VertexSet{0, 1, 2}}, {VertexSet{0, 1, 3}}});
    CHECK(cauchy_schwarz_pairs(twice, p).size() == 2);
}

TEST_CASE("eval_f") {
    auto inst = make_instance(5, 3, {{VertexSet{0, 1, 2}}, {VertexSet{0, 3, 4}}});
    Partition p{{0}, {1}, 0};
    CHECK(eval_f(inst, p, {1, 1}, {1, -1, 1, 1, 1}) == -1);
    CHECK(eval_f(inst, p, {1, 1}, {1, 1, 1, 1, 1}) == 1);
    CHECK(eval_f(inst, p, {-1, 1}, {1, 1, 1, 1, 1}) == -1);
    // x_u itself does not enter
    CHECK(eval_f(inst, p, {1, 1}, {-1, 1, 1, 1, 1}) == 1);
}

TEST_CASE("pairwise partition family splits every ordered pair a quarter of the time") {
    for (std::size_t k = 1; k <= 13; ++k) {
        const auto fam = partition_family(k, PartitionScheme::pairwise, 0, 0);
        CHECK(fam.size() >= k + 1);
        CHECK(fam.size() <= 2 * k + 2);
        for (const auto& p : fam) CHECK(p.left.size() + p.right.size() == k);
        for (std::uint32_t i = 0; i < k; ++i) {
            for (std::uint32_t j = 0; j < k; ++j) {
                if (i == j) continue;
                std::size_t hits = 0;
                for (const auto& p : fam) {
                    const bool il = std::find(p.left.begin(), p.left.end(), i) != p.left.end();
                    const bool jr = std::find(p.right.begin(), p.right.end(), j) != p.right.end();
                    hits += il && jr ? 1 : 0;
                }
                CHECK(4 * hits == fam.size());
            }
        }
    }
    const auto r = partition_family(5, PartitionScheme::random, 4, 9);
    CHECK(r.size() == 4);
    CHECK(r[0].left != partition_family(5, PartitionScheme::random, 4, 10)[0].left);
}

TEST_CASE("squared sum identity behind the Cauchy-Schwarz step") {
    // sum_u g_u^2 = q sum|H_i| + 4 E_P f_P exactly under the pairwise family
    Rng rng(5);
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const std::size_t k = 2 + rng.below(6);
        auto inst = generate_random_matching_instance(9, 3, k, 1.0 / 3, seed);
        const auto fam = partition_family(k, PartitionScheme::pairwise, 0, 0);
        for (int t = 0; t < 5; ++t) {
            auto b = random_signs(k, rng.next());
            auto x = random_x(rng, inst.n);
            std::int64_t sum_f = 0;
            for (const auto& p : fam) sum_f += eval_f(inst, p, b, x);
            const auto lhs = sum_g_squared(inst, b, x) * static_cast<std::int64_t>(fam.size());
            const auto rhs = 3 * static_cast<std::int64_t>(inst.total_edges() * fam.size()) + 4 * sum_f;
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("eval_f matches the Kikuchi quadratic form") {
    Rng rng(8);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto inst = generate_random_matching_instance(8, 3, 4, 0.25, seed);
        const auto fam = partition_family(4, PartitionScheme::pairwise, 0, 0);
        for (const auto& p : fam) {
            auto labels = cauchy_schwarz_pairs(inst, p);
            if (labels.empty()) continue;
            auto g = assemble_regular_cs(inst.n, inst.q, 1, inst.k(), labels);
            CHECK(g.D == 4);
            for (int t = 0; t < 5; ++t) {
                auto b = random_signs(4, rng.next());
                auto x = random_x(rng, inst.n);
                CHECK(quadratic_form(g, b, x, {}).total == 4 * eval_f(inst, p, b, x));
            }
        }
    }
}

TEST_CASE("regularity precondition") {
    auto inst = make_instance(7, 3, {{VertexSet{0, 1, 2}}, {VertexSet{0, 1, 3}}, {VertexSet{0, 1, 4}}});
    auto thr = compute_thresholds(7, 3, 3, inst.delta, 1);
    // d_2 = (1/7)^(1/2) * 3 ~ 1.13 and {0,1} has degree 3
    auto bad = regularity_violations(inst, thr);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].set == VertexSet{0, 1});
    CHECK(bad[0].degree == 3);
    auto opts = small_options(1);
    CHECK_THROWS_AS((void)refute_regular(inst, opts), RegularityError);
    opts.check_regularity = false;
    CHECK_NOTHROW((void)refute_regular(inst, opts));
}

TEST_CASE("no shared vertices gives the degenerate chain") {
    auto inst = make_instance(9, 3, {{VertexSet{0, 1, 2}}, {VertexSet{3, 4, 5}}, {VertexSet{6, 7, 8}}});
    auto opts = small_options(1);
    auto cert = refute_regular(inst, opts);
    // sqrt(q n sum|H|) / q = sqrt(3 * 9 * 3) / 3 = 3
    CHECK(cert.final_bound == doctest::Approx(3.0));
    for (const auto& r : cert.per_sign) {
        CHECK(r.bound == doctest::Approx(3.0));
        REQUIRE(r.val.has_value());
        CHECK(*r.val == 3);
    }
    for (const auto& p : cert.regular->partitions) CHECK(p.term.labels == 0);
}

TEST_CASE("level below (q-1)/2 falls back to the edge count") {
    auto inst = generate_random_matching_instance(10, 5, 3, 0.2, 4);
    auto cert = refute_regular(inst, [] {
        auto o = small_options(1);
        o.check_regularity = false;
        return o;
    }());
    CHECK(cert.regular->trivial);
    CHECK(cert.final_bound == doctest::Approx(static_cast<double>(inst.total_edges())));
    CHECK_FALSE(cert.warnings.empty());
}

TEST_CASE("regular certificates dominate the oracle for every sign vector") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto inst = generate_random_matching_instance(12, 3, 4, 0.25, seed);
        auto opts = small_options(seed % 2 == 0 ? 2 : 1);
        opts.check_regularity = false;
        auto cert = refute_regular(inst, opts);
        REQUIRE(cert.per_sign.size() == 16);
        for (const auto& r : cert.per_sign) {
            CHECK(r.bound * (1 + kSoundnessGuard) >= static_cast<double>(*r.val));
        }
        auto log = soundness_check(cert, inst, certificate_signs(4, 0, 0, 12));
        CHECK(log.ok());
        CHECK(cert.analytic_bound > 0.0);
    }
}

TEST_CASE("bipartite certificates") {
    BipartiteXorInstance piece;
    piece.n = 6;
    piece.q = 3;
    piece.s = 2;
    piece.labels = {VertexSet{0, 1}, VertexSet{2, 3}, VertexSet{1, 4}, VertexSet{3, 5}, VertexSet{0, 5}};
    piece.hypergraphs = {{BipartiteEdge{VertexSet{4}, 1}, BipartiteEdge{VertexSet{2}, 0}},
                         {BipartiteEdge{VertexSet{4}, 0}},
                         {BipartiteEdge{VertexSet{5}, 2}, BipartiteEdge{VertexSet{1}, 4}}};
    auto opts = small_options(2);
    auto cert = refute_bipartite(piece, opts);
    CHECK(cert.kind == CertificateKind::bipartite);
    REQUIRE(cert.per_sign.size() == 8);
    for (const auto& r : cert.per_sign) CHECK(r.bound * (1 + kSoundnessGuard) >= static_cast<double>(*r.val));
    CHECK(cert.pieces[0].term.capped);
    CHECK(soundness_check(cert, piece, certificate_signs(3, 0, 0, 12)).ok());

    SUBCASE("one shared label for every hypergraph") {
        BipartiteXorInstance shared = piece;
        shared.hypergraphs = {{BipartiteEdge{VertexSet{4}, 0}},
                              {BipartiteEdge{VertexSet{3}, 0}},
                              {BipartiteEdge{VertexSet{5}, 0}},
                              {BipartiteEdge{VertexSet{2}, 0}}};
        auto c = refute_bipartite(shared, opts);
        for (const auto& r : c.per_sign) CHECK(r.bound * (1 + kSoundnessGuard) >= static_cast<double>(*r.val));
    }
    SUBCASE("empty piece") {
        BipartiteXorInstance empty = piece;
        for (auto& h : empty.hypergraphs) h.clear();
        auto c = refute_bipartite(empty, opts);
        CHECK(c.final_bound == 0.0);
    }
}

TEST_CASE("combined certificate is the sum of its parts") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto inst = generate_random_matching_instance(10, 3, 5, 0.3, seed);
        auto opts = small_options(1);
        auto cert = refute_full(inst, opts);
        CHECK(cert.kind == CertificateKind::combined);
        CHECK(cert.pieces.size() == 1);
        for (const auto& r : cert.per_sign) {
            double sum = r.regular;
            for (double p : r.pieces) sum += p;
            CHECK(r.bound == sum);
            CHECK(r.bound * (1 + kSoundnessGuard) >= static_cast<double>(*r.val));
        }
        auto log = soundness_check(cert, inst, certificate_signs(5, 0, 0, 12));
        CHECK(log.ok());
        CHECK(cert.target == doctest::Approx(0.1 * static_cast<double>(inst.max_matching_size() * 5)));
    }
}

TEST_CASE("planted instances are never refuted") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto planted = generate_planted_linear_instance(10, 3, 4, 0.3, seed);
        auto opts = small_options(1);
        opts.epsilon = 0.5;
        auto cert = refute_full(planted.instance, opts);
        const double dnk = static_cast<double>(planted.instance.max_matching_size() * 4);
        for (const auto& r : cert.per_sign) {
            CHECK(*r.val == static_cast<std::int64_t>(planted.instance.total_edges()));
            CHECK(r.bound * (1 + kSoundnessGuard) >= static_cast<double>(*r.val));
        }
        CHECK_FALSE(cert.refuted);
        CHECK(cert.final_bound >= dnk / 2);
    }
}

TEST_CASE("inflating D' is caught") {
    // H_1 = H_2 = {{1,2,3}}: N = 9, D = 4, ||B|| = 2, so each split partition
    // certifies val(f) <= 4.5 and the chain gives sqrt(18 + 27) / 3 ~ 2.24 >= 2.
    auto inst = make_instance(3, 3, {{VertexSet{0, 1, 2}}, {VertexSet{0, 1, 2}}});
    auto opts = small_options(1);
    opts.check_regularity = false;
    auto cert = refute_regular(inst, opts);
    const auto signs = certificate_signs(2, 0, 0, 12);
    auto honest = soundness_check(cert, inst, signs);
    CHECK(honest.ok());
    CHECK(cert.per_sign[0].bound == doctest::Approx(std::sqrt(45.0) / 3));

    auto tampered = cert;
    for (auto& p : tampered.regular->partitions) p.term.d_prime *= 2;
    auto log = soundness_check(tampered, inst, signs);
    CHECK_FALSE(log.sound());
    CHECK_FALSE(log.consistent);

    auto edited = cert;
    edited.per_sign[1].bound *= 0.5;
    auto log2 = soundness_check(edited, inst, signs);
    CHECK(log2.sound());
    CHECK_FALSE(log2.consistent);
}

TEST_CASE("refutation is deterministic and tightens with gamma") {
    auto inst = generate_random_matching_instance(12, 3, 5, 0.25, 11);
    auto opts = small_options(2);
    auto a = refute_full(inst, opts);
    auto b = refute_full(inst, opts);
    REQUIRE(a.per_sign.size() == b.per_sign.size());
    for (std::size_t t = 0; t < a.per_sign.size(); ++t) CHECK(a.per_sign[t].bound == b.per_sign[t].bound);
    CHECK(a.analytic_bound == b.analytic_bound);

    std::uint64_t last = 0;
    for (int g : {1, 2, 4, 8, 16}) {
        opts.gamma = g;
        auto c = refute_full(inst, opts);
        std::uint64_t total = 0;
        for (const auto& p : c.regular->partitions) total += p.term.d_prime;
        CHECK(total >= last);
        last = total;
    }
}
