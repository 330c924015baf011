// Command-line front end: gen | decompose | build | refute | oracle | sweep | verify | soundness.

#include "kikuchi/io.hpp"
#include "kikuchi/parallel.hpp"
#include "kikuchi/random.hpp"
#include "kikuchi/refute.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace kikuchi;

namespace {

enum Exit { ok = 0, verification_failed = 1, config_error = 2, io_error = 3 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VerificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    bool timestamp = false;
    std::size_t threads = 0;
};

struct GenConfig {
    int n = 0;
    int q = 3;
    std::size_t k = 0;
    double delta = 0.0;
    std::uint64_t seed = 1;
    bool planted = false;
    std::string out;
    std::string sidecar;
};

struct RefuteConfig {
    std::string in;
    std::string out;
    std::string kind = "combined";
    double epsilon = 0.1;
    std::string gamma = "8";
    std::size_t trials = 200;
    std::uint64_t seed = 7;
    int ell = 0;
    std::string scheme = "pairwise";
    std::size_t partitions = 4;
    bool oracle = false;
    bool no_regularity_check = false;
};

RefuteOptions refute_options(const RefuteConfig& c) {
    RefuteOptions o;
    if (c.ell > 0) {
        o.ell = c.ell;
    }
    try {
        o.gamma = parse_rational(c.gamma);
        o.scheme = partition_scheme_from_string(c.scheme);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (o.gamma <= 0) {
        throw ConfigError("--gamma must be positive");
    }
    if (!(c.epsilon > 0.0)) {
        throw ConfigError("--epsilon must be positive");
    }
    o.epsilon = c.epsilon;
    o.trials = c.trials;
    o.seed = c.seed;
    o.random_partitions = c.partitions;
    o.oracle = c.oracle;
    o.check_regularity = !c.no_regularity_check;
    return o;
}

Json refute_config_json(const RefuteConfig& c) {
    return Json{{"command", "refute"},  {"in", c.in},
                {"kind", c.kind},       {"epsilon", c.epsilon},
                {"gamma", c.gamma},     {"trials", c.trials},
                {"seed", c.seed},       {"ell", c.ell > 0 ? Json(c.ell) : Json(nullptr)},
                {"scheme", c.scheme},   {"partitions", c.partitions},
                {"oracle", c.oracle},   {"check_regularity", !c.no_regularity_check}};
}

bool is_bipartite_file(const Json& j) { return j.contains("s") && j.contains("labels"); }

Signs parse_signs(const std::string& text, std::size_t k) {
    Signs b;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const int v = std::stoi(item);
        if (v != 1 && v != -1) {
            throw ConfigError("--signs entries must be 1 or -1");
        }
        b.push_back(v);
    }
    if (b.size() != k) {
        throw ConfigError("--signs needs exactly k = " + std::to_string(k) + " entries");
    }
    return b;
}

std::string format_signs(const Signs& b) {
    std::string s;
    for (const int v : b) {
        s += v > 0 ? '+' : '-';
    }
    return s;
}

void write_json(const std::string& path, const Json& j) { write_text(path, dump_lines(j)); }

// ---------------------------------------------------------------- gen

int cmd_gen(const GenConfig& c, const Common& common) {
    if (c.n < 1 || c.k < 1 || c.q < 3 || c.q % 2 == 0) {
        throw ConfigError("gen: need n, k >= 1 and odd q >= 3");
    }
    Json config{{"command", "gen"}, {"n", c.n},    {"q", c.q},          {"k", c.k},
                {"delta", c.delta}, {"seed", c.seed}, {"planted", c.planted}};
    XorInstance inst;
    std::optional<LinearCode> code;
    if (c.planted) {
        auto p = generate_planted_linear_instance(c.n, c.q, c.k, c.delta, c.seed);
        inst = std::move(p.instance);
        code = std::move(p.code);
    } else {
        inst = generate_random_matching_instance(c.n, c.q, c.k, c.delta, c.seed);
    }
    write_json(c.out, envelope(to_json(inst), config, c.seed, common.timestamp));
    if (code) {
        const std::string side = c.sidecar.empty() ? c.out + ".code.json" : c.sidecar;
        Json payload{{"generator", "planted_linear"}, {"code", to_json(*code)}};
        write_json(side, envelope(payload, config, c.seed, common.timestamp));
        std::cout << "sidecar: " << side << "\n";
    }
    std::cout << "n=" << inst.n << " q=" << inst.q << " k=" << inst.k() << " edges=" << inst.total_edges()
              << " max|H_i|=" << inst.max_matching_size()
              << " measured_delta=" << static_cast<double>(inst.max_matching_size()) / inst.n << "\n";
    return ok;
}

// ---------------------------------------------------------------- decompose

int cmd_decompose(const std::string& in, const std::string& out, int ell, const Common& common) {
    const auto inst = instance_from_json(read_json(in));
    const std::size_t dn = inst.max_matching_size();
    const auto thr = compute_thresholds(inst.n, inst.k(), inst.q, dn == 0 ? 1.0 / inst.n : double(dn) / inst.n,
                                        ell > 0 ? std::optional<int>(ell) : std::nullopt);
    const auto dec = decompose(inst, thr);
    const auto rep = verify_decomposition(inst, dec, thr);
    Json payload = to_json(dec, thr);
    Json ratios = Json::object();
    for (const auto& [s, r] : rep.registry_ratio) {
        ratios[std::to_string(s)] = r;
    }
    payload["verification"] = Json{{"ok", rep.ok()},
                                   {"bipartite_shape", rep.bipartite_shape},
                                   {"leftover_subset", rep.leftover_subset},
                                   {"correspondence", rep.correspondence},
                                   {"no_heavy_sets", rep.no_heavy_sets},
                                   {"matchings_preserved", rep.matchings_preserved},
                                   {"registry_ratio", ratios},
                                   {"violations", rep.violations}};
    Json config{{"command", "decompose"}, {"in", in}, {"ell", ell > 0 ? Json(ell) : Json(nullptr)}};
    write_json(out, envelope(payload, config, 0, common.timestamp));
    std::cout << "ell=" << thr.ell << " leftover=" << dec.leftover.total_edges();
    for (const auto& [s, piece] : dec.pieces) {
        std::cout << " |P_" << s << "|=" << piece.num_labels() << " |H^(" << s << ")|=" << piece.total_edges();
    }
    std::cout << " verified=" << (rep.ok() ? "yes" : "no") << "\n";
    return rep.ok() ? ok : verification_failed;
}

// ---------------------------------------------------------------- build

struct BuildConfig {
    std::string in;
    std::string variant = "naive_odd";
    int ell = 1;
    int piece = 2;
    std::size_t partition = 1;
    std::string dump;
    std::uint64_t seed = 1;
};

int cmd_build(const BuildConfig& c, const Common& common) {
    const auto file = read_json(c.in);
    Variant v{};
    try {
        v = variant_from_string(c.variant);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    KikuchiGraph g;
    std::size_t k = 0;
    int n = 0;
    std::size_t registry = 0;
    if (v == Variant::bipartite) {
        BipartiteXorInstance piece;
        if (is_bipartite_file(file)) {
            piece = bipartite_from_json(file);
        } else {
            const auto dec = decomposition_from_json(file);
            if (dec.pieces.count(c.piece) == 0) {
                throw ConfigError("no piece s=" + std::to_string(c.piece) + " in " + c.in);
            }
            piece = dec.pieces.at(c.piece);
        }
        g = assemble_bipartite(piece, c.ell);
        k = piece.k();
        n = piece.n;
        registry = piece.num_labels();
    } else {
        const auto inst = instance_from_json(file);
        k = inst.k();
        n = inst.n;
        if (v == Variant::basic_even) {
            g = assemble_basic_even(inst, c.ell);
        } else if (v == Variant::naive_odd) {
            g = assemble_naive_odd(inst, c.ell);
        } else {
            const auto fam = partition_family(k, PartitionScheme::pairwise, 0, 0);
            if (c.partition < 1 || c.partition > fam.size()) {
                throw ConfigError("--partition must be in 1.." + std::to_string(fam.size()));
            }
            g = assemble_regular_cs(n, inst.q, c.ell, k, cauchy_schwarz_pairs(inst, fam[c.partition - 1]));
        }
    }
    const auto predicate = count_predicate_violations(g);
    const auto counts = count_edge_count_mismatches(g);
    Rng rng(c.seed);
    bool forms = true;
    for (int t = 0; t < 20; ++t) {
        Signs x(static_cast<std::size_t>(n));
        Signs y(registry);
        for (auto& a : x) a = rng.sign();
        for (auto& a : y) a = rng.sign();
        forms = forms && check_quadratic_form(g, random_signs(k, rng.next()), x, y);
    }
    std::cout << "variant=" << to_string(g.variant) << " ell=" << g.ell << " D=" << g.D << " labels=" << g.labels.size()
              << " edges=" << g.edges.size() << " left=" << g.left.cardinality()
              << " right=" << g.right.cardinality() << " predicate_violations=" << predicate
              << " count_mismatches=" << counts << " quadratic_form=" << (forms ? "ok" : "FAIL") << "\n";
    if (!c.dump.empty()) {
        Json config{{"command", "build"}, {"in", c.in}, {"variant", c.variant}, {"ell", c.ell}};
        write_json(c.dump, envelope(graph_to_json(g), config, c.seed, common.timestamp));
    }
    return predicate == 0 && counts == 0 && forms ? ok : verification_failed;
}

// ---------------------------------------------------------------- refute

void print_certificate(const Certificate& cert) {
    std::cout << "kind=" << to_string(cert.kind) << " n=" << cert.params.n << " k=" << cert.params.k
              << " q=" << cert.params.q << " ell=" << cert.params.ell << " delta_n=" << cert.params.delta_n << "\n";
    if (cert.regular) {
        std::cout << "regular: mean bound " << cert.regular->mean_bound << ", Khintchine " << cert.regular->analytic_bound
                  << (cert.regular->trivial ? " (trivial)" : "") << "\n";
    }
    for (const auto& p : cert.pieces) {
        std::cout << "piece s=" << p.s << ": |P|=" << p.registry_size << " edges=" << p.term.edges
                  << " mean bound " << p.mean_bound << ", Khintchine " << p.analytic_bound
                  << (p.term.trivial ? " (trivial)" : "") << "\n";
    }
    std::cout << "E_b bound " << cert.final_bound << " vs eps*delta*n*k " << cert.target << " -> "
              << (cert.refuted ? "refuted" : "not refuted") << "\n";
    for (const auto& w : cert.warnings) {
        std::cout << "warning: " << w << "\n";
    }
}

int cmd_refute(const RefuteConfig& c, const Common& common) {
    const auto opts = refute_options(c);
    const auto file = read_json(c.in);
    Certificate cert;
    if (is_bipartite_file(file)) {
        cert = refute_bipartite(bipartite_from_json(file), opts);
    } else {
        const auto inst = instance_from_json(file);
        if (c.kind == "combined") {
            cert = refute_full(inst, opts);
        } else if (c.kind == "regular") {
            cert = refute_regular(inst, opts);
        } else {
            throw ConfigError("--kind must be combined or regular");
        }
    }
    write_json(c.out, envelope(to_json(cert), refute_config_json(c), c.seed, common.timestamp));
    print_certificate(cert);
    return ok;
}

// ---------------------------------------------------------------- oracle

int cmd_oracle(const std::string& in, const std::string& signs, bool expected, std::size_t trials,
               std::uint64_t seed) {
    const auto file = read_json(in);
    if (is_bipartite_file(file)) {
        const auto piece = bipartite_from_json(file);
        const Signs b = signs.empty() ? (piece.signs ? *piece.signs : Signs(piece.k(), 1)) : parse_signs(signs, piece.k());
        const auto r = brute_force_val(piece, b);
        std::cout << "val=" << r.value << " b=" << format_signs(b) << "\n";
        return ok;
    }
    const auto inst = instance_from_json(file);
    if (expected) {
        const auto e = expected_val(inst, trials, seed);
        std::cout << "E_b[val]=" << e.mean << " stderr=" << e.stderr_ << (e.exhaustive ? " (exhaustive)" : "")
                  << " samples=" << e.samples << "\n";
        return ok;
    }
    const Signs b = signs.empty() ? (inst.signs ? *inst.signs : Signs(inst.k(), 1)) : parse_signs(signs, inst.k());
    const auto r = brute_force_val(inst, b);
    std::cout << "val=" << r.value << " b=" << format_signs(b) << " argmax=" << format_signs(r.argmax.x) << "\n";
    return ok;
}

// ---------------------------------------------------------------- sweep

struct SweepConfig {
    int n = 0;
    int q = 3;
    std::vector<std::size_t> ks;
    double delta = 0.0;
    std::size_t seeds = 1;
    std::uint64_t seed = 1;
    bool planted = false;
    std::string out;
    RefuteConfig refute;
};

int cmd_sweep(const SweepConfig& c) {
    if (c.ks.empty()) {
        throw ConfigError("sweep: --k needs at least one value");
    }
    const auto opts = refute_options(c.refute);
    std::ostringstream csv;
    csv << "k,seed,planted,n,q,delta_n,bound,eps_delta_n_k,ratio,verdict,analytic_bound,error\n";
    std::size_t failures = 0;
    for (const auto k : c.ks) {
        for (std::size_t r = 0; r < c.seeds; ++r) {
            const std::uint64_t seed = c.seed + r;
            csv << k << ',' << seed << ',' << (c.planted ? 1 : 0) << ',' << c.n << ',' << c.q << ',';
            try {
                const auto inst = c.planted ? generate_planted_linear_instance(c.n, c.q, k, c.delta, seed).instance
                                            : generate_random_matching_instance(c.n, c.q, k, c.delta, seed);
                auto o = opts;
                o.seed = mix_seed(opts.seed, seed);
                const auto cert = refute_full(inst, o);
                const double dnk = static_cast<double>(cert.params.delta_n) * static_cast<double>(k);
                std::ostringstream row;
                row.precision(17);
                row << cert.params.delta_n << ',' << cert.final_bound << ',' << cert.target << ','
                    << (dnk > 0 ? cert.final_bound / dnk : 0.0) << ',' << (cert.refuted ? "refuted" : "not refuted")
                    << ',' << cert.analytic_bound << ",\n";
                csv << row.str();
            } catch (const std::exception& e) {
                ++failures;
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                csv << ",,,,,," << msg << "\n";
            }
        }
    }
    if (c.out.empty()) {
        std::cout << csv.str();
    } else {
        write_text(c.out, csv.str());
        std::cout << c.ks.size() * c.seeds << " rows, " << failures << " failed\n";
    }
    return ok;
}

// ---------------------------------------------------------------- verify / soundness

std::vector<Signs> soundness_signs(const Certificate& cert, bool exhaustive) {
    if (exhaustive) {
        if (cert.params.k > 20) {
            throw ConfigError("--exhaustive-b refuses k > 20");
        }
        return certificate_signs(cert.params.k, 0, 0, cert.params.k);
    }
    std::vector<Signs> out;
    for (const auto& r : cert.per_sign) {
        out.push_back(r.b);
    }
    return out;
}

int report_soundness(const SoundnessLog& log, bool verbose) {
    std::size_t bad = 0;
    for (const auto& e : log.entries) {
        bad += e.ok ? 0 : 1;
        if (verbose || !e.ok) {
            std::cout << format_signs(e.b) << " val=" << e.val << " bound=" << e.bound << (e.ok ? " ok" : " VIOLATED")
                      << "\n";
        }
    }
    for (const auto& m : log.mismatches) {
        std::cout << "mismatch: " << m << "\n";
    }
    std::cout << log.entries.size() << " sign vectors, " << bad << " violations, certificate "
              << (log.consistent ? "consistent" : "INCONSISTENT") << "\n";
    return log.ok() ? ok : verification_failed;
}

int cmd_soundness(const std::string& cert_path, const std::string& in, bool exhaustive, bool verbose) {
    const auto cert = certificate_from_json(read_json(cert_path));
    const auto file = read_json(in);
    const auto signs = soundness_signs(cert, exhaustive);
    const auto log = is_bipartite_file(file) ? soundness_check(cert, bipartite_from_json(file), signs)
                                             : soundness_check(cert, instance_from_json(file), signs);
    return report_soundness(log, verbose);
}

void require(bool cond, const std::string& what) {
    if (!cond) {
        throw VerificationFailure(what);
    }
}

void verify_graph(const KikuchiGraph& g, const std::optional<PrunedGraph>& pruned, const std::string& name, Rng& rng,
                  std::size_t k, std::size_t y_size) {
    require(count_edge_count_mismatches(g) == 0, name + ": a label's edge count differs from D");
    require(count_predicate_violations(g) == 0, name + ": an edge fails its defining predicate");
    for (int t = 0; t < 5; ++t) {
        Signs x(static_cast<std::size_t>(g.n));
        Signs y(y_size);
        for (auto& a : x) a = rng.sign();
        for (auto& a : y) a = rng.sign();
        require(check_quadratic_form(g, random_signs(k, rng.next()), x, y), name + ": quadratic form identity fails");
    }
    if (pruned) {
        require(check_pruned(g, *pruned).ok(), name + ": pruned graph breaks the pruning contract");
    }
}

int cmd_verify(const std::string& in, const std::string& cert_path, bool exhaustive, bool verbose) {
    const auto cert = certificate_from_json(read_json(cert_path));
    const auto file = read_json(in);
    const auto opts = options_from(cert.params);
    Rng rng(cert.params.seed);
    if (is_bipartite_file(file)) {
        const auto piece = bipartite_from_json(file);
        const BipartiteRefuter r(piece, cert.params.ell, piece.max_matching_size(), opts);
        if (r.pruned()) {
            verify_graph(r.graph(), r.pruned(), "piece", rng, piece.k(), piece.num_labels());
        }
        std::cout << "graphs: ok\n";
        return report_soundness(soundness_check(cert, piece, soundness_signs(cert, exhaustive)), verbose);
    }
    const auto inst = instance_from_json(file);
    const std::size_t dn = inst.max_matching_size();
    const auto thr = compute_thresholds(inst.n, inst.k(), inst.q, dn == 0 ? 1.0 / inst.n : double(dn) / inst.n,
                                        cert.params.ell);
    const XorInstance* regular_input = &inst;
    DecomposedInstance dec;
    if (cert.kind == CertificateKind::combined) {
        dec = decompose(inst, thr);
        const auto rep = verify_decomposition(inst, dec, thr);
        require(rep.ok(), "decomposition: " + (rep.violations.empty() ? std::string("failed") : rep.violations.front()));
        for (int t = 0; t < 50; ++t) {
            Signs x(static_cast<std::size_t>(inst.n));
            for (auto& a : x) a = rng.sign();
            require(recombination_check(inst, dec, random_signs(inst.k(), rng.next()), x),
                    "decomposition: recombination identity fails");
        }
        std::cout << "decomposition: ok\n";
        regular_input = &dec.leftover;
    }
    const RegularRefuter reg(*regular_input, thr, dn, opts);
    for (std::size_t p = 0; p < reg.partitions().size(); ++p) {
        const auto& st = reg.partitions()[p];
        if (st.term.labels > 0 && !reg.trivial()) {
            verify_graph(st.graph, st.pruned, "regular partition " + std::to_string(p + 1), rng, inst.k(), 0);
        }
    }
    for (const auto& [s, piece] : dec.pieces) {
        const BipartiteRefuter r(piece, thr.ell, dn, opts);
        if (r.pruned()) {
            verify_graph(r.graph(), r.pruned(), "piece s=" + std::to_string(s), rng, inst.k(), piece.num_labels());
        }
    }
    std::cout << "graphs: ok\n";
    return report_soundness(soundness_check(cert, inst, soundness_signs(cert, exhaustive)), verbose);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kikuchi-matrix refutation of q-XOR instances built from hypergraph matchings"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--threads", common.threads, "worker threads (default: KIKUCHI_THREADS or all cores)");
    app.add_flag("--timestamp", common.timestamp, "record the creation time in the metadata field");

    GenConfig gen;
    auto* g = app.add_subcommand("gen", "generate a random or planted instance");
    g->add_option("--n", gen.n)->required();
    g->add_option("--q", gen.q);
    g->add_option("--k", gen.k)->required();
    g->add_option("--delta", gen.delta)->required();
    g->add_option("--seed", gen.seed);
    g->add_flag("--planted", gen.planted, "satisfiable for every b via a random linear code");
    g->add_option("--out", gen.out)->required();
    g->add_option("--sidecar", gen.sidecar, "planted code output (default: <out>.code.json)");

    std::string dec_in;
    std::string dec_out;
    int dec_ell = 0;
    auto* d = app.add_subcommand("decompose", "greedy heavy-set decomposition");
    d->add_option("--in", dec_in)->required();
    d->add_option("--out", dec_out)->required();
    d->add_option("--ell", dec_ell, "override the Kikuchi level");

    BuildConfig build;
    auto* b = app.add_subcommand("build", "assemble one Kikuchi graph and re-verify it");
    b->add_option("--in", build.in, "instance, bipartite instance or decomposition")->required();
    b->add_option("--variant", build.variant, "basic_even | naive_odd | regular_cs | bipartite");
    b->add_option("--ell", build.ell);
    b->add_option("--piece", build.piece, "s, when --in is a decomposition");
    b->add_option("--partition", build.partition, "1-based index into the pairwise family (regular_cs)");
    b->add_option("--dump", build.dump, "write the edge list as JSON");
    b->add_option("--seed", build.seed);

    RefuteConfig ref;
    auto add_refute_options = [](CLI::App* cmd, RefuteConfig& r) {
        cmd->add_option("--epsilon", r.epsilon);
        cmd->add_option("--gamma", r.gamma, "pruning factor, e.g. 8 or 5/2");
        cmd->add_option("--trials", r.trials, "sign draws when k > 12");
        cmd->add_option("--seed", r.seed);
        cmd->add_option("--ell", r.ell, "override the Kikuchi level");
        cmd->add_option("--partitions", r.scheme, "pairwise | random");
        cmd->add_option("--random-partitions", r.partitions, "count for --partitions random");
        cmd->add_flag("--oracle", r.oracle, "attach brute-force val to every sign record");
        cmd->add_flag("--no-regularity-check", r.no_regularity_check);
    };
    auto* r = app.add_subcommand("refute", "produce a refutation certificate");
    r->add_option("--in", ref.in)->required();
    r->add_option("--out", ref.out)->required();
    r->add_option("--kind", ref.kind, "combined | regular");
    add_refute_options(r, ref);

    std::string or_in;
    std::string or_signs;
    bool or_expected = false;
    std::size_t or_trials = 200;
    std::uint64_t or_seed = 1;
    auto* o = app.add_subcommand("oracle", "exact val by exhaustive search");
    o->add_option("--in", or_in)->required();
    o->add_option("--signs", or_signs, "comma separated, e.g. 1,-1,1");
    o->add_flag("--expected", or_expected, "E_b[val] instead of one b");
    o->add_option("--trials", or_trials);
    o->add_option("--seed", or_seed);

    SweepConfig sweep;
    auto* s = app.add_subcommand("sweep", "bound versus eps*delta*n*k across k, as CSV");
    s->add_option("--n", sweep.n)->required();
    s->add_option("--q", sweep.q);
    s->add_option("--k", sweep.ks, "values of k")->required()->delimiter(',');
    s->add_option("--delta", sweep.delta)->required();
    s->add_option("--seeds", sweep.seeds, "instances per k");
    s->add_option("--instance-seed", sweep.seed, "first instance seed");
    s->add_flag("--planted", sweep.planted);
    s->add_option("--out", sweep.out, "CSV path (default: stdout)");
    add_refute_options(s, sweep.refute);

    std::string v_in;
    std::string v_cert;
    bool v_exhaustive = false;
    bool v_verbose = false;
    auto* v = app.add_subcommand("verify", "re-verify a certificate end to end");
    v->add_option("--in", v_in)->required();
    v->add_option("--cert", v_cert)->required();
    v->add_flag("--exhaustive-b", v_exhaustive, "check all 2^k sign vectors");
    v->add_flag("--verbose", v_verbose);

    std::string s_in;
    std::string s_cert;
    bool s_exhaustive = false;
    bool s_verbose = false;
    auto* so = app.add_subcommand("soundness", "compare a certificate with the brute-force oracle");
    so->add_option("--in", s_in)->required();
    so->add_option("--cert", s_cert)->required();
    so->add_flag("--exhaustive-b", s_exhaustive, "check all 2^k sign vectors");
    so->add_flag("--verbose", s_verbose);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (common.threads > 0) {
            set_thread_count(common.threads);
        }
        if (*g) return cmd_gen(gen, common);
        if (*d) return cmd_decompose(dec_in, dec_out, dec_ell, common);
        if (*b) return cmd_build(build, common);
        if (*r) return cmd_refute(ref, common);
        if (*o) return cmd_oracle(or_in, or_signs, or_expected, or_trials, or_seed);
        if (*s) return cmd_sweep(sweep);
        if (*v) return cmd_verify(v_in, v_cert, v_exhaustive, v_verbose);
        if (*so) return cmd_soundness(s_cert, s_in, s_exhaustive, s_verbose);
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return verification_failed;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return io_error;
    } catch (const FormatError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return io_error;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const OracleLimitExceeded& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return verification_failed;
    }
    return ok;
}
