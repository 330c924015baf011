#include "kikuchi/io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace kikuchi;

TEST_CASE("instance files are 1-based and round trip") {
    auto inst = generate_random_matching_instance(12, 3, 4, 0.25, 1);
    inst.signs = Signs{1, -1, -1, 1};
    const auto j = to_json(inst);
    CHECK(j.at("k") == 4);
    for (const auto& h : j.at("hypergraphs"))
        for (const auto& c : h)
            for (const auto& v : c) CHECK((v.get<int>() >= 1 && v.get<int>() <= 12));
    auto back = instance_from_json(Json::parse(dump_lines(j)));
    CHECK(back.hypergraphs == inst.hypergraphs);
    CHECK(back.signs == inst.signs);
    CHECK(back.q == 3);

    Json bad = j;
    bad["hypergraphs"][0][0][0] = 13;
    CHECK_THROWS_AS((void)instance_from_json(bad), FormatError);
    bad = j;
    bad["hypergraphs"][0][1] = bad["hypergraphs"][0][0];
    CHECK_THROWS_AS((void)instance_from_json(bad), FormatError);
    bad = j;
    bad.erase("q");
    CHECK_THROWS_AS((void)instance_from_json(bad), FormatError);
}

TEST_CASE("one hypergraph per line") {
    auto inst = generate_random_matching_instance(9, 3, 3, 1.0 / 3, 2);
    const auto text = dump_lines(to_json(inst));
    CHECK(std::count(text.begin(), text.end(), '\n') == 12);
    CHECK(Json::parse(text) == to_json(inst));
}

TEST_CASE("bipartite instances and decompositions round trip") {
    auto inst = generate_random_matching_instance(12, 3, 8, 0.25, 5);
    auto thr = compute_thresholds(12, 8, 3, 0.25, 1);
    auto dec = decompose(inst, thr);
    REQUIRE(dec.pieces.at(2).total_edges() > 0);
    const auto j = to_json(dec, thr);
    auto back = decomposition_from_json(Json::parse(dump_lines(j)));
    CHECK(back.leftover.hypergraphs == dec.leftover.hypergraphs);
    CHECK(back.pieces.at(2).labels == dec.pieces.at(2).labels);
    CHECK(back.pieces.at(2).hypergraphs == dec.pieces.at(2).hypergraphs);
    REQUIRE(back.provenance.size() == dec.provenance.size());
    for (std::size_t i = 0; i < dec.provenance.size(); ++i) {
        CHECK(back.provenance[i].hypergraph == dec.provenance[i].hypergraph);
        CHECK(back.provenance[i].piece == dec.provenance[i].piece);
        CHECK(back.provenance[i].index == dec.provenance[i].index);
    }
    CHECK(verify_decomposition(inst, back, thr).ok());

    const auto& piece = dec.pieces.at(2);
    auto pb = bipartite_from_json(to_json(piece));
    CHECK(pb.hypergraphs == piece.hypergraphs);
    CHECK(pb.labels == piece.labels);
    CHECK(to_json(piece)["hypergraphs"][0].size() == piece.hypergraphs[0].size());
}

TEST_CASE("certificates round trip exactly") {
    auto inst = generate_random_matching_instance(10, 3, 5, 0.3, 3);
    RefuteOptions opts;
    opts.ell = 1;
    opts.oracle = true;
    opts.gamma = Rational(5, 2);
    auto cert = refute_full(inst, opts);
    const auto j = to_json(cert);
    CHECK(j.at("schema") == kCertificateSchema);
    const auto back = certificate_from_json(Json::parse(dump_lines(j)));
    CHECK(to_json(back) == j);
    CHECK(back.params.gamma == Rational(5, 2));
    CHECK(soundness_check(back, inst, certificate_signs(5, 0, 0, 12)).ok());

    Json wrong = j;
    wrong["schema"] = "other/2";
    CHECK_THROWS_AS((void)certificate_from_json(wrong), FormatError);
}

TEST_CASE("rationals") {
    CHECK(parse_rational("8") == 8);
    CHECK(parse_rational("5/2") == Rational(5, 2));
    CHECK(parse_rational("2.5") == Rational(5, 2));
    CHECK(parse_rational("0.125") == Rational(1, 8));
    CHECK(parse_rational("-1.5") == Rational(-3, 2));
    CHECK(parse_rational(".5") == Rational(1, 2));
    CHECK_THROWS((void)parse_rational("x"));
    CHECK_THROWS((void)parse_rational("1/0"));
    CHECK_THROWS((void)parse_rational("1.2e3"));
    CHECK(to_string(Rational(6, 4)) == "3/2");
}

TEST_CASE("envelope and files") {
    const auto e = envelope(Json{{"a", 1}}, Json{{"n", 3}}, 9, true);
    CHECK(e.at("tool").at("name") == "kikuchi");
    CHECK(e.at("metadata").contains("created"));
    CHECK(strip_metadata(e) == strip_metadata(envelope(Json{{"a", 1}}, Json{{"n", 3}}, 9, false)));

    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "kikuchi_io_test.json";
    write_text(path, dump_lines(e));
    CHECK(read_json(path) == e);
    std::filesystem::remove(path);
    CHECK_THROWS_AS((void)read_json(dir / "kikuchi_missing_file.json"), IoError);
    write_text(path, "{not json");
    CHECK_THROWS_AS((void)read_json(path), IoError);
    std::filesystem::remove(path);
}
