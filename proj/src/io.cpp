#include "kikuchi/io.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace kikuchi {

namespace {

Json set_to_json(const VertexSet& s) {
    Json a = Json::array();
    for (const auto v : s) {
        a.push_back(v + 1);
    }
    return a;
}

VertexSet set_from_json(const Json& j, int n) {
    if (!j.is_array()) {
        throw FormatError("expected an array of vertices");
    }
    std::vector<Vertex> vs;
    for (const auto& v : j) {
        const auto x = v.get<std::int64_t>();
        if (x < 1 || x > n) {
            throw FormatError("vertex " + std::to_string(x) + " outside 1.." + std::to_string(n));
        }
        vs.push_back(static_cast<Vertex>(x - 1));
    }
    VertexSet s(vs);
    if (s.size() != vs.size()) {
        throw FormatError("repeated vertex in " + j.dump());
    }
    return s;
}

Json signs_to_json(const std::optional<Signs>& s) { return s ? Json(*s) : Json(nullptr); }

std::optional<Signs> signs_from_json(const Json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    auto s = j.get<Signs>();
    for (const int v : s) {
        if (v != 1 && v != -1) {
            throw FormatError("signs must be +1 or -1");
        }
    }
    return s;
}

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.contains(key)) {
        throw FormatError(std::string("missing field '") + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

Json big(const BigInt& x) { return x.str(); }

BigInt big_from(const Json& j) {
    if (j.is_number_integer()) {
        return BigInt(j.get<std::int64_t>());
    }
    return BigInt(j.get<std::string>());
}

Json indices_to_json(const std::vector<std::uint32_t>& v) {
    Json a = Json::array();
    for (const auto i : v) {
        a.push_back(i + 1);
    }
    return a;
}

std::vector<std::uint32_t> indices_from_json(const Json& j) {
    std::vector<std::uint32_t> v;
    for (const auto& x : j) {
        v.push_back(x.get<std::uint32_t>() - 1);
    }
    return v;
}

} // namespace

Json to_json(const XorInstance& inst) {
    Json j;
    j["n"] = inst.n;
    j["k"] = inst.k();
    j["q"] = inst.q;
    j["delta"] = inst.delta;
    Json hs = Json::array();
    for (const auto& h : inst.hypergraphs) {
        Json edges = Json::array();
        for (const auto& c : h) {
            edges.push_back(set_to_json(c));
        }
        hs.push_back(std::move(edges));
    }
    j["hypergraphs"] = std::move(hs);
    j["signs"] = signs_to_json(inst.signs);
    return j;
}

XorInstance instance_from_json(const Json& j) {
    XorInstance inst;
    inst.n = field<int>(j, "n");
    inst.q = field<int>(j, "q");
    inst.delta = j.contains("delta") ? j.at("delta").get<double>() : 0.0;
    for (const auto& h : field<Json>(j, "hypergraphs")) {
        Hypergraph edges;
        for (const auto& c : h) {
            edges.push_back(set_from_json(c, inst.n));
        }
        inst.hypergraphs.push_back(std::move(edges));
    }
    if (j.contains("k") && field<std::size_t>(j, "k") != inst.k()) {
        throw FormatError("k does not match the number of hypergraphs");
    }
    inst.signs = j.contains("signs") ? signs_from_json(j.at("signs")) : std::nullopt;
    try {
        inst.validate();
    } catch (const InstanceError& e) {
        throw FormatError(e.what());
    }
    return inst;
}

Json to_json(const BipartiteXorInstance& inst) {
    Json j;
    j["n"] = inst.n;
    j["k"] = inst.k();
    j["q"] = inst.q;
    j["s"] = inst.s;
    Json labels = Json::array();
    for (const auto& p : inst.labels) {
        labels.push_back(set_to_json(p));
    }
    j["labels"] = std::move(labels);
    Json hs = Json::array();
    for (const auto& h : inst.hypergraphs) {
        Json edges = Json::array();
        for (const auto& e : h) {
            edges.push_back(Json{{"left", set_to_json(e.left)}, {"p", e.label + 1}});
        }
        hs.push_back(std::move(edges));
    }
    j["hypergraphs"] = std::move(hs);
    j["signs"] = signs_to_json(inst.signs);
    return j;
}

BipartiteXorInstance bipartite_from_json(const Json& j) {
    BipartiteXorInstance inst;
    inst.n = field<int>(j, "n");
    inst.q = field<int>(j, "q");
    inst.s = field<int>(j, "s");
    for (const auto& p : field<Json>(j, "labels")) {
        inst.labels.push_back(set_from_json(p, inst.n));
    }
    for (const auto& h : field<Json>(j, "hypergraphs")) {
        BipartiteHypergraph edges;
        for (const auto& e : h) {
            const auto p = field<std::int64_t>(e, "p");
            if (p < 1 || p > static_cast<std::int64_t>(inst.labels.size())) {
                throw FormatError("label index " + std::to_string(p) + " outside the registry");
            }
            edges.push_back({set_from_json(field<Json>(e, "left"), inst.n), static_cast<std::uint32_t>(p - 1)});
        }
        inst.hypergraphs.push_back(std::move(edges));
    }
    inst.signs = j.contains("signs") ? signs_from_json(j.at("signs")) : std::nullopt;
    try {
        inst.validate();
    } catch (const InstanceError& e) {
        throw FormatError(e.what());
    }
    return inst;
}

Json to_json(const LinearCode& code) {
    Json cols = Json::array();
    for (const auto c : code.columns) {
        Json rows = Json::array();
        for (std::size_t r = 0; r < code.k; ++r) {
            if (((c >> r) & 1U) != 0) {
                rows.push_back(r + 1);
            }
        }
        cols.push_back(std::move(rows));
    }
    return Json{{"k", code.k}, {"rank", code.rank()}, {"columns", std::move(cols)}};
}

LinearCode code_from_json(const Json& j) {
    LinearCode code;
    code.k = field<std::size_t>(j, "k");
    for (const auto& col : field<Json>(j, "columns")) {
        std::uint64_t m = 0;
        for (const auto& r : col) {
            m |= std::uint64_t{1} << (r.get<std::size_t>() - 1);
        }
        code.columns.push_back(m);
    }
    return code;
}

Json to_json(const Thresholds& thr) {
    Json d = Json::object();
    for (const auto& [t, v] : thr.d) {
        d[std::to_string(t)] = v;
    }
    return Json{{"q", thr.q},
                {"ell", thr.ell},
                {"d", std::move(d)},
                {"k_at_least_4ell", thr.k_at_least_4ell},
                {"smallest_at_least_one", thr.smallest_at_least_one}};
}

Json to_json(const DecomposedInstance& dec, const Thresholds& thr) {
    Json j = to_json(dec.leftover);
    j["thresholds"] = to_json(thr);
    Json registries = Json::object();
    Json pieces = Json::object();
    for (const auto& [s, piece] : dec.pieces) {
        const auto pj = to_json(piece);
        registries[std::to_string(s)] = pj.at("labels");
        pieces[std::to_string(s)] = pj.at("hypergraphs");
    }
    j["registries"] = std::move(registries);
    j["pieces"] = std::move(pieces);
    Json prov = Json::array();
    for (const auto& p : dec.provenance) {
        prov.push_back(Json::array({p.hypergraph + 1, p.position + 1, p.piece, p.index + 1}));
    }
    j["provenance"] = std::move(prov);
    return j;
}

DecomposedInstance decomposition_from_json(const Json& j) {
    DecomposedInstance dec;
    dec.leftover = instance_from_json(j);
    const auto& registries = field<Json>(j, "registries");
    const auto& pieces = field<Json>(j, "pieces");
    for (const auto& [key, labels] : registries.items()) {
        Json pj{{"n", dec.leftover.n}, {"q", dec.leftover.q}, {"s", std::stoi(key)}, {"labels", labels},
                {"hypergraphs", pieces.at(key)}, {"signs", signs_to_json(dec.leftover.signs)}};
        dec.pieces.emplace(std::stoi(key), bipartite_from_json(pj));
    }
    for (const auto& p : field<Json>(j, "provenance")) {
        dec.provenance.push_back({p.at(0).get<std::size_t>() - 1, p.at(1).get<std::size_t>() - 1, p.at(2).get<int>(),
                                  p.at(3).get<std::size_t>() - 1});
    }
    return dec;
}

Json to_json(const PruneReport& r, const Rational& gamma) {
    return Json{{"gamma", to_string(gamma)},
                {"D", big(r.D)},
                {"D_prime", r.d_prime},
                {"ratio", r.ratio},
                {"half_guarantee", r.half_guarantee},
                {"heavy_left", r.heavy_left},
                {"heavy_right", r.heavy_right},
                {"dropped_heavy", r.dropped_heavy},
                {"dropped_trim", r.dropped_trim},
                {"max_left_degree", r.max_left_degree},
                {"max_right_degree", r.max_right_degree}};
}

PruneReport prune_report_from_json(const Json& j) {
    PruneReport r;
    r.D = big_from(j.at("D"));
    r.d_prime = field<std::uint64_t>(j, "D_prime");
    r.ratio = field<double>(j, "ratio");
    r.half_guarantee = field<bool>(j, "half_guarantee");
    r.heavy_left = field<std::size_t>(j, "heavy_left");
    r.heavy_right = field<std::size_t>(j, "heavy_right");
    r.dropped_heavy = field<std::size_t>(j, "dropped_heavy");
    r.dropped_trim = field<std::size_t>(j, "dropped_trim");
    r.max_left_degree = field<std::uint32_t>(j, "max_left_degree");
    r.max_right_degree = field<std::uint32_t>(j, "max_right_degree");
    return r;
}

Json graph_to_json(const KikuchiGraph& g) {
    auto space = [](const VertexSpace& s) {
        Json a = Json::array();
        for (const auto& c : s.components()) {
            a.push_back(Json{{"ground", c.ground}, {"size", c.size}, {"domain", c.domain == Domain::x ? "x" : "y"}});
        }
        return a;
    };
    Json edges = Json::array();
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        for (const auto& e : g.label_edges(l)) {
            edges.push_back(Json::array({e.left, e.right, l + 1}));
        }
    }
    return Json{{"variant", to_string(g.variant)},
                {"n", g.n},
                {"q", g.q},
                {"s", g.s},
                {"ell", g.ell},
                {"D", big(g.D)},
                {"spaces", Json{{"left", space(g.left)}, {"right", space(g.right)}}},
                {"labels", g.labels.size()},
                {"edges", std::move(edges)}};
}

namespace {

Json params_to_json(const CertificateParams& p) {
    return Json{{"n", p.n},
                {"k", p.k},
                {"q", p.q},
                {"s", p.s},
                {"delta_n", p.delta_n},
                {"delta", p.delta},
                {"epsilon", p.epsilon},
                {"ell", p.ell},
                {"gamma", to_string(p.gamma)},
                {"seed", p.seed},
                {"trials", p.trials},
                {"partition_scheme", to_string(p.scheme)},
                {"random_partitions", p.random_partitions},
                {"check_regularity", p.check_regularity},
                {"exhaustive_k", p.exhaustive_k},
                {"power_tolerance", p.power_tolerance}};
}

CertificateParams params_from_json(const Json& j) {
    CertificateParams p;
    p.n = field<int>(j, "n");
    p.k = field<std::size_t>(j, "k");
    p.q = field<int>(j, "q");
    p.s = field<int>(j, "s");
    p.delta_n = field<std::size_t>(j, "delta_n");
    p.delta = field<double>(j, "delta");
    p.epsilon = field<double>(j, "epsilon");
    p.ell = field<int>(j, "ell");
    p.gamma = parse_rational(field<std::string>(j, "gamma"));
    p.seed = field<std::uint64_t>(j, "seed");
    p.trials = field<std::size_t>(j, "trials");
    p.scheme = partition_scheme_from_string(field<std::string>(j, "partition_scheme"));
    p.random_partitions = field<std::size_t>(j, "random_partitions");
    p.check_regularity = field<bool>(j, "check_regularity");
    p.exhaustive_k = field<std::size_t>(j, "exhaustive_k");
    p.power_tolerance = field<double>(j, "power_tolerance");
    return p;
}

Json prune_or_null(const std::optional<PruneReport>& r, const Rational& gamma) {
    return r ? to_json(*r, gamma) : Json(nullptr);
}

std::optional<PruneReport> prune_from(const Json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return prune_report_from_json(j);
}

} // namespace

Json to_json(const Certificate& cert) {
    Json j;
    j["schema"] = kCertificateSchema;
    j["kind"] = to_string(cert.kind);
    j["params"] = params_to_json(cert.params);
    Json thr = Json::object();
    for (const auto& [t, v] : cert.thresholds) {
        thr[std::to_string(t)] = v;
    }
    j["thresholds"] = std::move(thr);
    if (cert.regular) {
        const auto& r = *cert.regular;
        Json parts = Json::array();
        for (const auto& p : r.partitions) {
            parts.push_back(Json{{"L", indices_to_json(p.partition.left)},
                                 {"R", indices_to_json(p.partition.right)},
                                 {"seed", p.partition.seed},
                                 {"labels", p.term.labels},
                                 {"D", big(p.D)},
                                 {"D_prime", p.term.d_prime},
                                 {"N", big(p.term.N)},
                                 {"fallback", p.term.fallback},
                                 {"failure", p.failure},
                                 {"prune", prune_or_null(p.prune, cert.params.gamma)},
                                 {"khintchine_f_bound", p.khintchine_f_bound},
                                 {"mean_norm", p.mean_norm}});
        }
        j["regular"] = Json{{"total_edges", r.total_edges},
                            {"D", big(r.D)},
                            {"trivial", r.trivial},
                            {"exact_family", r.exact_family},
                            {"mean_bound", r.mean_bound},
                            {"analytic_bound", r.analytic_bound},
                            {"best_partition_diagnostic", r.best_partition_diagnostic},
                            {"analytic_shape_constant_1", r.analytic_shape},
                            {"partitions", std::move(parts)}};
    } else {
        j["regular"] = nullptr;
    }
    Json pieces = Json::array();
    for (const auto& p : cert.pieces) {
        pieces.push_back(Json{{"s", p.s},
                              {"registry_size", p.registry_size},
                              {"edges", p.term.edges},
                              {"D", big(p.D)},
                              {"D_prime", p.term.d_prime},
                              {"N_L", big(p.term.N_left)},
                              {"N_R", big(p.term.N_right)},
                              {"trivial", p.term.trivial},
                              {"capped", p.term.capped},
                              {"failure", p.failure},
                              {"prune", prune_or_null(p.prune, cert.params.gamma)},
                              {"sigma2", p.sigma2},
                              {"khintchine_bound", p.khintchine_bound},
                              {"mean_norm", p.mean_norm},
                              {"mean_bound", p.mean_bound},
                              {"analytic_bound", p.analytic_bound},
                              {"analytic_shape_constant_1", p.analytic_shape}});
    }
    j["pieces"] = std::move(pieces);
    Json signs = Json::array();
    for (const auto& r : cert.per_sign) {
        signs.push_back(Json{{"b", r.b},
                             {"bound", r.bound},
                             {"regular", r.regular},
                             {"pieces", r.pieces},
                             {"val", r.val ? Json(*r.val) : Json(nullptr)}});
    }
    j["exhaustive_signs"] = cert.exhaustive_signs;
    j["final_bound"] = cert.final_bound;
    j["analytic_bound"] = cert.analytic_bound;
    j["target"] = cert.target;
    j["refuted"] = cert.refuted;
    j["warnings"] = cert.warnings;
    j["per_sign"] = std::move(signs);
    return j;
}

Certificate certificate_from_json(const Json& j) {
    if (field<std::string>(j, "schema") != kCertificateSchema) {
        throw FormatError("unsupported certificate schema " + j.at("schema").dump());
    }
    Certificate c;
    try {
        c.kind = certificate_kind_from_string(field<std::string>(j, "kind"));
        c.params = params_from_json(field<Json>(j, "params"));
        for (const auto& [t, v] : j.at("thresholds").items()) {
            c.thresholds[std::stoi(t)] = v.get<double>();
        }
        const auto& reg = j.at("regular");
        if (!reg.is_null()) {
            RegularRecord r;
            r.total_edges = field<std::size_t>(reg, "total_edges");
            r.D = big_from(reg.at("D"));
            r.trivial = field<bool>(reg, "trivial");
            r.exact_family = field<bool>(reg, "exact_family");
            r.mean_bound = field<double>(reg, "mean_bound");
            r.analytic_bound = field<double>(reg, "analytic_bound");
            r.best_partition_diagnostic = field<double>(reg, "best_partition_diagnostic");
            r.analytic_shape = field<double>(reg, "analytic_shape_constant_1");
            for (const auto& p : field<Json>(reg, "partitions")) {
                PartitionRecord pr;
                pr.partition.left = indices_from_json(p.at("L"));
                pr.partition.right = indices_from_json(p.at("R"));
                pr.partition.seed = field<std::uint64_t>(p, "seed");
                pr.term.labels = field<std::size_t>(p, "labels");
                pr.D = big_from(p.at("D"));
                pr.term.d_prime = field<std::uint64_t>(p, "D_prime");
                pr.term.N = big_from(p.at("N"));
                pr.term.fallback = field<bool>(p, "fallback");
                pr.failure = field<std::string>(p, "failure");
                pr.prune = prune_from(p.at("prune"));
                pr.khintchine_f_bound = field<double>(p, "khintchine_f_bound");
                pr.mean_norm = field<double>(p, "mean_norm");
                r.partitions.push_back(std::move(pr));
            }
            c.regular = std::move(r);
        }
        for (const auto& p : field<Json>(j, "pieces")) {
            PieceRecord pr;
            pr.s = field<int>(p, "s");
            pr.registry_size = field<std::size_t>(p, "registry_size");
            pr.term.edges = field<std::size_t>(p, "edges");
            pr.D = big_from(p.at("D"));
            pr.term.d_prime = field<std::uint64_t>(p, "D_prime");
            pr.term.N_left = big_from(p.at("N_L"));
            pr.term.N_right = big_from(p.at("N_R"));
            pr.term.trivial = field<bool>(p, "trivial");
            pr.term.capped = field<bool>(p, "capped");
            pr.failure = field<std::string>(p, "failure");
            pr.prune = prune_from(p.at("prune"));
            pr.sigma2 = field<double>(p, "sigma2");
            pr.khintchine_bound = field<double>(p, "khintchine_bound");
            pr.mean_norm = field<double>(p, "mean_norm");
            pr.mean_bound = field<double>(p, "mean_bound");
            pr.analytic_bound = field<double>(p, "analytic_bound");
            pr.analytic_shape = field<double>(p, "analytic_shape_constant_1");
            c.pieces.push_back(std::move(pr));
        }
        for (const auto& r : field<Json>(j, "per_sign")) {
            SignRecord s;
            s.b = field<Signs>(r, "b");
            s.bound = field<double>(r, "bound");
            s.regular = field<double>(r, "regular");
            s.pieces = field<std::vector<double>>(r, "pieces");
            if (!r.at("val").is_null()) {
                s.val = r.at("val").get<std::int64_t>();
            }
            c.per_sign.push_back(std::move(s));
        }
        c.exhaustive_signs = field<bool>(j, "exhaustive_signs");
        c.final_bound = field<double>(j, "final_bound");
        c.analytic_bound = field<double>(j, "analytic_bound");
        c.target = field<double>(j, "target");
        c.refuted = field<bool>(j, "refuted");
        c.warnings = field<std::vector<std::string>>(j, "warnings");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("certificate: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("certificate: ") + e.what());
    }
    return c;
}

Rational parse_rational(const std::string& s) {
    const auto bad = [&] { return std::invalid_argument("not a rational number: '" + s + "'"); };
    if (s.empty()) {
        throw bad();
    }
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            const BigInt den(s.substr(slash + 1));
            if (den == 0) {
                throw bad();
            }
            return Rational(BigInt(s.substr(0, slash)), den);
        }
        const auto dot = s.find('.');
        if (dot == std::string::npos) {
            return Rational(BigInt(s));
        }
        const std::string frac = s.substr(dot + 1);
        if (frac.find_first_not_of("0123456789") != std::string::npos) {
            throw bad();
        }
        std::string whole = s.substr(0, dot);
        const bool negative = !whole.empty() && whole[0] == '-';
        if (whole.empty() || whole == "-" || whole == "+") {
            whole += "0";
        }
        BigInt scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) {
            scale *= 10;
        }
        const BigInt f = frac.empty() ? BigInt(0) : BigInt(frac);
        const Rational w{BigInt(whole)};
        return negative ? w - Rational(f, scale) : w + Rational(f, scale);
    } catch (const std::runtime_error&) {
        throw bad();
    }
}

std::string to_string(const Rational& r) { return r.str(); }

namespace {

// Arrays whose elements are themselves arrays or objects go one element per line.
void dump_value(std::ostringstream& out, const Json& v, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const bool nested =
        (v.is_array() && !v.empty() && (v.front().is_array() || v.front().is_object())) || v.is_object();
    if (!nested || (v.is_object() && depth >= 2)) {
        out << v.dump();
        return;
    }
    const char open = v.is_array() ? '[' : '{';
    const char close = v.is_array() ? ']' : '}';
    if (v.empty()) {
        out << open << close;
        return;
    }
    out << open << '\n';
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) {
            out << ",\n";
        }
        first = false;
        out << pad << "  ";
        if (v.is_object()) {
            out << Json(it.key()).dump() << ": ";
        }
        if (v.is_array()) {
            out << it->dump();
        } else {
            dump_value(out, *it, depth + 1);
        }
    }
    out << '\n' << pad << close;
}

} // namespace

std::string dump_lines(const Json& j) {
    std::ostringstream out;
    dump_value(out, j, 0);
    out << '\n';
    return out.str();
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

Json envelope(const Json& payload, const Json& config, std::uint64_t seed, bool timestamp) {
    Json j;
    j["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
    j["config"] = config;
    j["seed"] = seed;
    for (const auto& [k, v] : payload.items()) {
        j[k] = v;
    }
    Json meta = Json::object();
    if (timestamp) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::ostringstream s;
        s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        meta["created"] = s.str();
    }
    j["metadata"] = std::move(meta);
    return j;
}

Json strip_metadata(Json j) {
    j.erase("metadata");
    return j;
}

} // namespace kikuchi
