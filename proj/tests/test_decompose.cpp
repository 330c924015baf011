#include "kikuchi/decompose.hpp"
#include "kikuchi/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace kikuchi;

namespace {

Thresholds manual_thresholds(int q, std::map<int, double> d) {
    Thresholds thr;
    thr.q = q;
    thr.ell = 1;
    thr.d = std::move(d);
    return thr;
}

} // namespace

TEST_CASE("compute_thresholds") {
    auto a = compute_thresholds(64, 8, 3, 1.0);
    CHECK(a.ell == 4);
    CHECK(a.at(2) == doctest::Approx(8.0 / 4));

    auto b = compute_thresholds(32, 16, 5, 1.0);
    CHECK(b.ell == 8);
    CHECK(b.at(2) == doctest::Approx(16.0 / 2));
    CHECK(b.at(3) == doctest::Approx(16.0 / 8));
    CHECK(b.at(2) >= b.at(3));

    auto c = compute_thresholds(1, 3, 3, 1.0);
    CHECK(c.ell == 1);
    CHECK(c.at(2) == doctest::Approx(3.0));

    CHECK(compute_thresholds(64, 16, 3, 1.0).k_at_least_4ell);
    CHECK_FALSE(compute_thresholds(64, 15, 3, 1.0).k_at_least_4ell);
    CHECK(compute_thresholds(64, 8, 3, 1.0, 2).ell == 2);

    // independent recomputation with integer search for the floor
    for (int n = 1; n <= 200; n += 7) {
        for (double delta : {1.0, 0.5, 0.25, 0.1}) {
            int f = 0;
            while ((f + 1) * (f + 1) * (f + 1) * delta * delta <= n + 1e-9) ++f;
            CHECK(kikuchi_level(n, 3, delta) == f);
        }
    }
}

TEST_CASE("no heavy sets leaves the instance unchanged") {
    auto inst = generate_random_matching_instance(30, 3, 3, 0.2, 1);
    auto thr = manual_thresholds(3, {{2, 100.0}});
    auto dec = decompose(inst, thr);
    CHECK(dec.leftover.hypergraphs == inst.hypergraphs);
    CHECK(dec.pieces.at(2).labels.empty());
    CHECK(dec.pieces.at(2).total_edges() == 0);
    CHECK(verify_decomposition(inst, dec, thr).ok());
}

TEST_CASE("hand traced promotion of a heavy pair") {
    XorInstance inst;
    inst.n = 12;
    inst.q = 3;
    inst.delta = 1.0 / 12;
    for (Vertex j = 0; j < 5; ++j) {
        inst.hypergraphs.push_back({VertexSet{0, 1, static_cast<Vertex>(2 + j)}});
    }
    auto thr = manual_thresholds(3, {{2, 2.0}});
    auto dec = decompose(inst, thr);
    const auto& piece = dec.pieces.at(2);
    REQUIRE(piece.labels.size() == 1);
    CHECK(piece.labels[0] == VertexSet{0, 1});
    CHECK(piece.total_edges() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(piece.hypergraphs[i].size() == 1);
        CHECK(piece.hypergraphs[i][0].left == VertexSet{static_cast<Vertex>(2 + i)});
        CHECK(dec.leftover.hypergraphs[i].empty());
    }
    CHECK(dec.leftover.hypergraphs[3].size() == 1);
    CHECK(dec.leftover.hypergraphs[4].size() == 1);
    CHECK(dec.provenance[0].piece == 2);
    CHECK(dec.provenance[4].piece == 0);
    CHECK(verify_decomposition(inst, dec, thr).ok());

    auto again = decompose(dec.leftover, thr);
    CHECK(again.leftover.hypergraphs == dec.leftover.hypergraphs);
    CHECK(again.pieces.at(2).labels.empty());
}

TEST_CASE("verification catches a duplicated edge") {
    auto inst = generate_random_matching_instance(24, 3, 12, 0.25, 3);
    auto thr = compute_thresholds(24, 12, 3, 0.25);
    auto dec = decompose(inst, thr);
    REQUIRE(verify_decomposition(inst, dec, thr).ok());
    auto& h = dec.leftover.hypergraphs[0];
    REQUIRE_FALSE(h.empty());
    h.push_back(h.front());
    auto rep = verify_decomposition(inst, dec, thr);
    CHECK_FALSE(rep.correspondence);
    CHECK_FALSE(rep.ok());
}

TEST_CASE("decomposition properties on heavy random instances") {
    Rng rng(17);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const int q = seed % 2 == 0 ? 5 : 3;
        const int n = q == 3 ? 12 : 15;
        const std::size_t k = 4 + rng.below(10);
        auto inst = generate_random_matching_instance(n, q, k, q == 3 ? 0.25 : 0.2, seed);
        auto thr = compute_thresholds(n, k, q, inst.delta, 1 + static_cast<int>(rng.below(3)));
        auto dec = decompose(inst, thr);
        auto rep = verify_decomposition(inst, dec, thr);
        CHECK(rep.ok());
        CHECK(rep.registry_bound);
        for (const auto& [s, piece] : dec.pieces) {
            CHECK(piece.labels.size() * (static_cast<std::size_t>(std::floor(thr.at(s))) + 1) <= inst.total_edges());
        }
        for (int t = 0; t < 20; ++t) {
            auto b = random_signs(k, rng.next());
            Signs x(static_cast<std::size_t>(n));
            for (auto& v : x) v = rng.sign();
            CHECK(recombination_check(inst, dec, b, x));
        }
        Signs ones(static_cast<std::size_t>(n), 1);
        auto b = random_signs(k, seed);
        std::int64_t expect = 0;
        for (std::size_t i = 0; i < k; ++i) expect += b[i] * static_cast<std::int64_t>(inst.hypergraphs[i].size());
        CHECK(eval_phi(inst, b, ones) == expect);
    }
}
