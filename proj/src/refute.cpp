#include "kikuchi/refute.hpp"

#include "kikuchi/parallel.hpp"
#include "kikuchi/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <unordered_map>

namespace kikuchi {

std::string to_string(PartitionScheme s) { return s == PartitionScheme::pairwise ? "pairwise" : "random"; }

PartitionScheme partition_scheme_from_string(const std::string& s) {
    if (s == "pairwise") {
        return PartitionScheme::pairwise;
    }
    if (s == "random") {
        return PartitionScheme::random;
    }
    throw std::invalid_argument("unknown partition scheme: " + s);
}

std::vector<Partition> partition_family(std::size_t k, PartitionScheme scheme, std::size_t count, std::uint64_t seed) {
    std::vector<Partition> out;
    if (scheme == PartitionScheme::pairwise) {
        int m = 0;
        while ((std::uint64_t{1} << m) < k + 1) {
            ++m;
        }
        for (std::uint64_t a = 0; a < (std::uint64_t{1} << m); ++a) {
            Partition p;
            p.seed = a;
            for (std::uint32_t i = 0; i < k; ++i) {
                (popcount(a & (i + 1)) % 2 == 1 ? p.left : p.right).push_back(i);
            }
            out.push_back(std::move(p));
        }
        return out;
    }
    for (std::size_t t = 0; t < count; ++t) {
        Partition p;
        p.seed = mix_seed(seed, t);
        Rng rng(p.seed);
        for (std::uint32_t i = 0; i < k; ++i) {
            (rng.sign() < 0 ? p.left : p.right).push_back(i);
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<EdgeLabel> cauchy_schwarz_pairs(const XorInstance& inst, const Partition& partition) {
    std::vector<EdgeLabel> labels;
    for (const auto i : partition.left) {
        for (const auto j : partition.right) {
            for (const auto& c : inst.hypergraphs.at(i)) {
                for (const auto& c2 : inst.hypergraphs.at(j)) {
                    for (const auto u : c) {
                        if (!c2.contains(u)) {
                            continue;
                        }
                        EdgeLabel l;
                        l.group = i;
                        l.partner = j;
                        l.shared = u;
                        l.c1 = set_difference(c, VertexSet{u});
                        l.c2 = set_difference(c2, VertexSet{u});
                        labels.push_back(std::move(l));
                    }
                }
            }
        }
    }
    return labels;
}

std::int64_t eval_f(const XorInstance& inst, const Partition& partition, const Signs& b, const Signs& x) {
    std::int64_t total = 0;
    for (const auto& l : cauchy_schwarz_pairs(inst, partition)) {
        total += b.at(l.group) * b.at(l.partner) * monomial(x, l.c1) * monomial(x, l.c2);
    }
    return total;
}

std::vector<RegularityViolation> regularity_violations(const XorInstance& inst, const Thresholds& thr) {
    std::vector<RegularityViolation> out;
    for (int t = 2; t <= thr.max_level(); ++t) {
        std::unordered_map<VertexSet, std::size_t, VertexSetHash> deg;
        for (const auto& h : inst.hypergraphs) {
            for (const auto& c : h) {
                for (auto& sub : subsets_of_size(c, static_cast<std::size_t>(t))) {
                    ++deg[std::move(sub)];
                }
            }
        }
        std::vector<RegularityViolation> level;
        for (const auto& [set, d] : deg) {
            if (static_cast<double>(d) > thr.at(t)) {
                level.push_back({set, d, thr.at(t)});
            }
        }
        std::sort(level.begin(), level.end(), [](const auto& a, const auto& b) { return a.set < b.set; });
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

double partition_f_bound(const PartitionTerm& t, double norm) {
    if (t.labels == 0) {
        return 0.0;
    }
    if (t.fallback || t.d_prime == 0) {
        return static_cast<double>(t.labels);
    }
    return Rational(t.N, BigInt(t.d_prime)).convert_to<double>() * norm;
}

double cauchy_schwarz_bound(int q, int n, std::size_t total_edges, std::span<const double> f_bounds) {
    double mean = 0.0;
    for (const double f : f_bounds) {
        mean += f;
    }
    if (!f_bounds.empty()) {
        mean /= static_cast<double>(f_bounds.size());
    }
    const double inner = static_cast<double>(q) * n * static_cast<double>(total_edges) + 4.0 * n * mean;
    return std::sqrt(std::max(inner, 0.0)) / q;
}

double piece_bound(const PieceTerm& t, double norm) {
    const auto edges = static_cast<double>(t.edges);
    if (t.edges == 0) {
        return 0.0;
    }
    if (t.trivial || t.d_prime == 0) {
        return edges;
    }
    const double scale = std::sqrt(t.N_left.convert_to<double>()) * std::sqrt(t.N_right.convert_to<double>()) /
                         static_cast<double>(t.d_prime);
    const double v = scale * norm;
    return t.capped ? std::min(v, edges) : v;
}

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) {
        return 0.0;
    }
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

RegularRefuter::RegularRefuter(const XorInstance& inst, const Thresholds& thr, std::size_t delta_n,
                               const RefuteOptions& opts)
    : inst_(&inst), opts_(opts), ell_(thr.ell), total_edges_(inst.total_edges()) {
    if (opts.check_regularity) {
        const auto bad = regularity_violations(inst, thr);
        if (!bad.empty()) {
            throw RegularityError("refute_regular: deg(" + bad.front().set.to_string() + ") = " +
                                  std::to_string(bad.front().degree) + " exceeds d_" +
                                  std::to_string(bad.front().set.size()) + "; decompose first");
        }
    }
    D_ = edge_count_regular_cs(inst.q, inst.n, ell_);
    trivial_ = D_ == 0;
    if (trivial_) {
        warnings_.push_back("regular: no Kikuchi edges at level " + std::to_string(ell_) + "; using Σ|H_i|");
    }
    if (opts.scheme == PartitionScheme::random) {
        warnings_.push_back("regular: random partitions do not average cross terms exactly");
    }
    const auto family = partition_family(inst.k(), opts.scheme, opts.random_partitions, opts.seed);
    parts_.resize(family.size());
    const BigInt side = binomial(inst.n, ell_);
    parallel_for(family.size(), [&](std::size_t p) {
        auto& st = parts_[p];
        st.partition = family[p];
        const auto labels = cauchy_schwarz_pairs(inst, st.partition);
        st.term.labels = labels.size();
        st.term.N = side * side;
        if (labels.empty() || trivial_) {
            return;
        }
        st.graph = assemble_regular_cs(inst.n, inst.q, ell_, inst.k(), labels);
        const auto target = target_degrees_regular(inst.n, inst.q, ell_, inst.k(), delta_n, D_);
        try {
            st.pruned = prune(st.graph, target, opts.gamma);
            st.term.d_prime = st.pruned->d_prime;
            st.pattern = GraphPattern(st.pruned->graph);
        } catch (const PruneError& e) {
            st.term.fallback = true;
            st.failure = e.what();
        }
    });
    for (std::size_t p = 0; p < parts_.size(); ++p) {
        if (!parts_[p].failure.empty()) {
            warnings_.push_back("regular partition " + std::to_string(p) + ": " + parts_[p].failure +
                                "; using the label count");
        }
    }
}

std::vector<NormEstimate> RegularRefuter::norms(const Signs& b) const {
    std::vector<NormEstimate> out(parts_.size());
    for (std::size_t p = 0; p < parts_.size(); ++p) {
        const auto& st = parts_[p];
        if (!st.pruned) {
            continue;
        }
        const auto& g = st.pruned->graph;
        std::vector<double> w(g.labels.size());
        for (std::size_t l = 0; l < w.size(); ++l) {
            w[l] = g.label_sign(l, b);
        }
        out[p] = spectral_norm(st.pattern.realize(w), opts_.power);
    }
    return out;
}

double RegularRefuter::bound(const std::vector<NormEstimate>& norms) const {
    if (trivial_) {
        return static_cast<double>(total_edges_);
    }
    std::vector<double> f(parts_.size());
    for (std::size_t p = 0; p < parts_.size(); ++p) {
        f[p] = partition_f_bound(parts_[p].term, norms.at(p).value);
    }
    return cauchy_schwarz_bound(inst_->q, inst_->n, total_edges_, f);
}

double RegularRefuter::khintchine_f_bound(std::size_t p) const {
    const auto& st = parts_.at(p);
    if (!st.pruned) {
        return partition_f_bound(st.term, 0.0);
    }
    const auto& g = st.pruned->graph;
    const auto& right = st.partition.right;
    const double N = st.term.N.convert_to<double>();
    std::vector<double> bounds;
    for (const auto& br : certificate_signs(right.size(), opts_.trials, mix_seed(opts_.seed, 0xb5 + p), opts_.exhaustive_k)) {
        Signs b(inst_->k(), 1);
        for (std::size_t r = 0; r < right.size(); ++r) {
            b[right[r]] = br[r];
        }
        std::vector<double> w(g.labels.size());
        for (std::size_t l = 0; l < w.size(); ++l) {
            w[l] = b.at(g.labels[l].partner);
        }
        const auto sigma = khintchine_sigma(group_matrices(g, w).groups, opts_.power);
        bounds.push_back(khintchine_bound(sigma.sigma2, N, N));
    }
    return partition_f_bound(st.term, mean_of(bounds));
}

BipartiteRefuter::BipartiteRefuter(const BipartiteXorInstance& piece, int ell, std::size_t delta_n,
                                   const RefuteOptions& opts)
    : piece_(&piece), opts_(opts) {
    term_.edges = piece.total_edges();
    term_.capped = piece.num_labels() < 4 * static_cast<std::size_t>(ell);
    if (term_.edges == 0) {
        return;
    }
    try {
        graph_ = assemble_bipartite(piece, ell);
        term_.N_left = graph_.left.cardinality();
        term_.N_right = graph_.right.cardinality();
        if (graph_.D == 0 || term_.N_left == 0 || term_.N_right == 0) {
            term_.trivial = true;
            failure_ = "no Kikuchi edges at level " + std::to_string(ell);
            return;
        }
        const auto target = target_degrees_bipartite(piece.n, piece.q, piece.s, ell, piece.num_labels(), delta_n,
                                                     graph_.D);
        pruned_ = prune(graph_, target, opts.gamma);
        term_.d_prime = pruned_->d_prime;
        pattern_ = GraphPattern(pruned_->graph);
    } catch (const std::exception& e) {
        term_.trivial = true;
        pruned_.reset();
        failure_ = e.what();
    }
}

NormEstimate BipartiteRefuter::norm(const Signs& b) const {
    if (!pruned_) {
        return {};
    }
    const auto& g = pruned_->graph;
    std::vector<double> w(g.labels.size());
    for (std::size_t l = 0; l < w.size(); ++l) {
        w[l] = b.at(g.labels[l].group);
    }
    return spectral_norm(pattern_.realize(w), opts_.power);
}

std::pair<double, double> BipartiteRefuter::khintchine() const {
    if (!pruned_) {
        return {piece_bound(term_, 0.0), 0.0};
    }
    const std::vector<double> ones(pruned_->graph.labels.size(), 1.0);
    const auto sigma = khintchine_sigma(group_matrices(pruned_->graph, ones).groups, opts_.power);
    const double k =
        khintchine_bound(sigma.sigma2, term_.N_left.convert_to<double>(), term_.N_right.convert_to<double>());
    return {piece_bound(term_, k), sigma.sigma2};
}

std::string to_string(CertificateKind k) {
    switch (k) {
    case CertificateKind::regular:
        return "regular";
    case CertificateKind::bipartite:
        return "bipartite";
    case CertificateKind::combined:
        return "combined";
    }
    return "combined";
}

CertificateKind certificate_kind_from_string(const std::string& s) {
    if (s == "regular") {
        return CertificateKind::regular;
    }
    if (s == "bipartite") {
        return CertificateKind::bipartite;
    }
    if (s == "combined") {
        return CertificateKind::combined;
    }
    throw std::invalid_argument("unknown certificate kind: " + s);
}

std::vector<Signs> certificate_signs(std::size_t k, std::size_t trials, std::uint64_t seed, std::size_t exhaustive_k) {
    std::vector<Signs> out;
    if (k <= exhaustive_k) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) {
            out.push_back(signs_from_index(i, k));
        }
        return out;
    }
    for (std::size_t t = 0; t < trials; ++t) {
        out.push_back(random_signs(k, mix_seed(seed, t)));
    }
    return out;
}

namespace {

// Threshold inputs for an instance; an edgeless instance gets δ = 1/n.
double measured_delta(std::size_t delta_n, int n) {
    return delta_n == 0 ? 1.0 / n : static_cast<double>(delta_n) / n;
}

CertificateParams make_params(int n, std::size_t k, int q, std::size_t delta_n, int ell, const RefuteOptions& opts) {
    CertificateParams p;
    p.n = n;
    p.k = k;
    p.q = q;
    p.delta_n = delta_n;
    p.delta = static_cast<double>(delta_n) / n;
    p.epsilon = opts.epsilon;
    p.ell = ell;
    p.gamma = opts.gamma;
    p.seed = opts.seed;
    p.trials = opts.trials;
    p.scheme = opts.scheme;
    p.random_partitions = opts.random_partitions;
    p.check_regularity = opts.check_regularity;
    p.exhaustive_k = opts.exhaustive_k;
    p.power_tolerance = opts.power.tolerance;
    return p;
}

double regular_shape(int n, std::size_t k, std::size_t delta_n, int ell) {
    const double delta = static_cast<double>(delta_n) / n;
    const auto kd = static_cast<double>(k);
    return n * std::sqrt(delta * kd) * std::pow(kd * ell * std::log(static_cast<double>(n)), 0.25);
}

double bipartite_shape(int n, std::size_t k, std::size_t delta_n, int ell) {
    return static_cast<double>(delta_n) * std::sqrt(static_cast<double>(k) * ell * std::log(static_cast<double>(n)));
}

RegularRecord regular_record(const RegularRefuter& r, int n, std::size_t k, std::size_t delta_n, int ell) {
    RegularRecord rec;
    rec.total_edges = r.total_edges();
    rec.D = r.D();
    rec.trivial = r.trivial();
    rec.analytic_shape = regular_shape(n, k, delta_n, ell);
    for (const auto& st : r.partitions()) {
        PartitionRecord pr;
        pr.partition = st.partition;
        pr.term = st.term;
        pr.D = r.D();
        pr.failure = st.failure;
        if (st.pruned) {
            pr.prune = st.pruned->report;
        }
        rec.partitions.push_back(std::move(pr));
    }
    return rec;
}

PieceRecord piece_record(const BipartiteRefuter& r, const BipartiteXorInstance& piece, std::size_t k,
                         std::size_t delta_n, int ell) {
    PieceRecord rec;
    rec.s = piece.s;
    rec.registry_size = piece.num_labels();
    rec.term = r.term();
    rec.D = r.D();
    rec.failure = r.failure();
    if (r.pruned()) {
        rec.prune = r.pruned()->report;
    }
    const auto [kb, sigma2] = r.khintchine();
    rec.khintchine_bound = kb;
    rec.analytic_bound = kb;
    rec.sigma2 = sigma2;
    rec.analytic_shape = bipartite_shape(piece.n, k, delta_n, ell);
    return rec;
}

struct Pipeline {
    const RegularRefuter* regular = nullptr;
    std::vector<const BipartiteRefuter*> pieces;
};

// Per-sign evaluation shared by refute_* : fills per_sign, mean norms and
// the final bound.
void evaluate_signs(Certificate& cert, const Pipeline& pl, const std::vector<Signs>& signs,
                    const std::function<std::int64_t(const Signs&)>& oracle) {
    cert.per_sign.assign(signs.size(), {});
    std::vector<std::vector<NormEstimate>> reg_norms(signs.size());
    std::vector<std::vector<NormEstimate>> piece_norms(signs.size());
    std::vector<double> best(signs.size(), 0.0);
    const int q = cert.params.q;
    const int n = cert.params.n;
    parallel_for(signs.size(), [&](std::size_t t) {
        auto& rec = cert.per_sign[t];
        rec.b = signs[t];
        if (pl.regular != nullptr) {
            reg_norms[t] = pl.regular->norms(signs[t]);
            rec.regular = pl.regular->bound(reg_norms[t]);
            if (!pl.regular->trivial()) {
                double m = std::numeric_limits<double>::infinity();
                for (std::size_t p = 0; p < reg_norms[t].size(); ++p) {
                    const double f = partition_f_bound(pl.regular->partitions()[p].term, reg_norms[t][p].value);
                    m = std::min(m, cauchy_schwarz_bound(q, n, pl.regular->total_edges(), std::span(&f, 1)));
                }
                best[t] = m;
            }
        }
        double total = rec.regular;
        for (const auto* piece : pl.pieces) {
            piece_norms[t].push_back(piece->norm(signs[t]));
            rec.pieces.push_back(piece->bound(piece_norms[t].back().value));
            total += rec.pieces.back();
        }
        rec.bound = total;
        if (oracle) {
            rec.val = oracle(signs[t]);
        }
    });

    std::size_t unconverged = 0;
    std::size_t loose = 0;
    auto tally = [&](const NormEstimate& e) {
        unconverged += e.converged && e.monotone ? 0 : 1;
        loose += e.bounds_ok ? 0 : 1;
    };
    std::vector<double> bounds;
    for (std::size_t t = 0; t < signs.size(); ++t) {
        bounds.push_back(cert.per_sign[t].bound);
        for (const auto& e : reg_norms[t]) {
            tally(e);
        }
        for (const auto& e : piece_norms[t]) {
            tally(e);
        }
    }
    if (unconverged > 0) {
        cert.warnings.push_back(std::to_string(unconverged) + " norm estimates did not converge monotonically");
    }
    if (loose > 0) {
        cert.warnings.push_back(std::to_string(loose) + " norm estimates failed the probe/Schur sandwich");
    }
    if (cert.regular) {
        auto& reg = *cert.regular;
        std::vector<double> rb;
        for (std::size_t p = 0; p < reg.partitions.size(); ++p) {
            std::vector<double> v;
            for (std::size_t t = 0; t < signs.size(); ++t) {
                v.push_back(reg_norms[t].empty() ? 0.0 : reg_norms[t][p].value);
            }
            reg.partitions[p].mean_norm = mean_of(v);
        }
        for (const auto& r : cert.per_sign) {
            rb.push_back(r.regular);
        }
        reg.mean_bound = mean_of(rb);
        reg.best_partition_diagnostic = reg.trivial ? reg.mean_bound : mean_of(best);
    }
    for (std::size_t i = 0; i < cert.pieces.size(); ++i) {
        std::vector<double> nv;
        std::vector<double> bv;
        for (std::size_t t = 0; t < signs.size(); ++t) {
            nv.push_back(piece_norms[t][i].value);
            bv.push_back(cert.per_sign[t].pieces[i]);
        }
        cert.pieces[i].mean_norm = mean_of(nv);
        cert.pieces[i].mean_bound = mean_of(bv);
    }
    cert.final_bound = mean_of(bounds);
}

void finish_verdict(Certificate& cert) {
    cert.target = cert.params.epsilon * static_cast<double>(cert.params.delta_n) * static_cast<double>(cert.params.k);
    cert.refuted = cert.final_bound < cert.target;
}

double regular_analytic(const RegularRefuter& r, RegularRecord& rec, int q, int n) {
    if (r.trivial()) {
        rec.analytic_bound = static_cast<double>(r.total_edges());
        return rec.analytic_bound;
    }
    std::vector<double> f(r.partitions().size());
    parallel_for(f.size(), [&](std::size_t p) { f[p] = r.khintchine_f_bound(p); });
    for (std::size_t p = 0; p < f.size(); ++p) {
        rec.partitions[p].khintchine_f_bound = f[p];
    }
    rec.analytic_bound = cauchy_schwarz_bound(q, n, r.total_edges(), f);
    return rec.analytic_bound;
}

void threshold_warnings(Certificate& cert, const Thresholds& thr) {
    cert.thresholds = thr.d;
    if (!thr.k_at_least_4ell) {
        cert.warnings.push_back("k < 4ℓ: outside the regime of the refutation theorems");
    }
}

} // namespace

Certificate refute_regular(const XorInstance& inst, const RefuteOptions& opts) {
    inst.validate();
    const std::size_t delta_n = inst.max_matching_size();
    const auto thr = compute_thresholds(inst.n, inst.k(), inst.q, measured_delta(delta_n, inst.n), opts.ell);
    const RegularRefuter reg(inst, thr, delta_n, opts);

    Certificate cert;
    cert.kind = CertificateKind::regular;
    cert.params = make_params(inst.n, inst.k(), inst.q, delta_n, thr.ell, opts);
    threshold_warnings(cert, thr);
    cert.warnings.insert(cert.warnings.end(), reg.warnings().begin(), reg.warnings().end());
    cert.regular = regular_record(reg, inst.n, inst.k(), delta_n, thr.ell);
    cert.analytic_bound = regular_analytic(reg, *cert.regular, inst.q, inst.n);
    cert.exhaustive_signs = inst.k() <= opts.exhaustive_k;

    std::function<std::int64_t(const Signs&)> oracle;
    if (opts.oracle) {
        oracle = [&](const Signs& b) { return brute_force_val(inst, b).value; };
    }
    Pipeline pl;
    pl.regular = &reg;
    evaluate_signs(cert, pl, certificate_signs(inst.k(), opts.trials, opts.seed, opts.exhaustive_k), oracle);
    finish_verdict(cert);
    return cert;
}

Certificate refute_bipartite(const BipartiteXorInstance& piece, const RefuteOptions& opts) {
    piece.validate();
    const std::size_t delta_n = piece.max_matching_size();
    const int ell = opts.ell ? *opts.ell
                             : compute_thresholds(piece.n, piece.k(), piece.q, measured_delta(delta_n, piece.n)).ell;
    const BipartiteRefuter r(piece, ell, delta_n, opts);

    Certificate cert;
    cert.kind = CertificateKind::bipartite;
    cert.params = make_params(piece.n, piece.k(), piece.q, delta_n, ell, opts);
    cert.params.s = piece.s;
    if (!r.failure().empty()) {
        cert.warnings.push_back("piece s=" + std::to_string(piece.s) + ": " + r.failure() + "; using Σ|H^(s)_i|");
    }
    cert.pieces.push_back(piece_record(r, piece, piece.k(), delta_n, ell));
    cert.analytic_bound = cert.pieces.back().analytic_bound;
    cert.exhaustive_signs = piece.k() <= opts.exhaustive_k;

    std::function<std::int64_t(const Signs&)> oracle;
    if (opts.oracle) {
        oracle = [&](const Signs& b) { return brute_force_val(piece, b).value; };
    }
    Pipeline pl;
    pl.pieces.push_back(&r);
    evaluate_signs(cert, pl, certificate_signs(piece.k(), opts.trials, opts.seed, opts.exhaustive_k), oracle);
    finish_verdict(cert);
    return cert;
}

namespace {

struct FullPipeline {
    Thresholds thr;
    DecomposedInstance dec;
    std::optional<RegularRefuter> regular;
    std::vector<std::unique_ptr<BipartiteRefuter>> pieces;
};

std::unique_ptr<FullPipeline> build_full(const XorInstance& inst, const RefuteOptions& opts, std::size_t delta_n) {
    auto fp = std::make_unique<FullPipeline>();
    fp->thr = compute_thresholds(inst.n, inst.k(), inst.q, measured_delta(delta_n, inst.n), opts.ell);
    fp->dec = decompose(inst, fp->thr);
    fp->regular.emplace(fp->dec.leftover, fp->thr, delta_n, opts);
    for (const auto& [s, piece] : fp->dec.pieces) {
        fp->pieces.push_back(std::make_unique<BipartiteRefuter>(piece, fp->thr.ell, delta_n, opts));
    }
    return fp;
}

} // namespace

Certificate refute_full(const XorInstance& inst, const RefuteOptions& opts) {
    inst.validate();
    const std::size_t delta_n = inst.max_matching_size();
    const auto fp = build_full(inst, opts, delta_n);
    const int ell = fp->thr.ell;

    Certificate cert;
    cert.kind = CertificateKind::combined;
    cert.params = make_params(inst.n, inst.k(), inst.q, delta_n, ell, opts);
    threshold_warnings(cert, fp->thr);
    cert.warnings.insert(cert.warnings.end(), fp->regular->warnings().begin(), fp->regular->warnings().end());
    cert.regular = regular_record(*fp->regular, inst.n, inst.k(), delta_n, ell);
    cert.analytic_bound = regular_analytic(*fp->regular, *cert.regular, inst.q, inst.n);

    Pipeline pl;
    pl.regular = &*fp->regular;
    std::size_t i = 0;
    for (const auto& [s, piece] : fp->dec.pieces) {
        const auto& r = *fp->pieces[i++];
        if (!r.failure().empty()) {
            cert.warnings.push_back("piece s=" + std::to_string(s) + ": " + r.failure() + "; using Σ|H^(s)_i|");
        }
        cert.pieces.push_back(piece_record(r, piece, inst.k(), delta_n, ell));
        cert.analytic_bound += cert.pieces.back().analytic_bound;
        pl.pieces.push_back(&r);
    }
    cert.exhaustive_signs = inst.k() <= opts.exhaustive_k;

    std::function<std::int64_t(const Signs&)> oracle;
    if (opts.oracle) {
        oracle = [&](const Signs& b) { return brute_force_val(inst, b).value; };
    }
    evaluate_signs(cert, pl, certificate_signs(inst.k(), opts.trials, opts.seed, opts.exhaustive_k), oracle);
    finish_verdict(cert);
    return cert;
}

RefuteOptions options_from(const CertificateParams& p) {
    RefuteOptions o;
    o.ell = p.ell;
    o.gamma = p.gamma;
    o.trials = p.trials;
    o.seed = p.seed;
    o.scheme = p.scheme;
    o.random_partitions = p.random_partitions;
    o.check_regularity = p.check_regularity;
    o.exhaustive_k = p.exhaustive_k;
    o.epsilon = p.epsilon;
    o.power.tolerance = p.power_tolerance;
    return o;
}

bool SoundnessLog::sound() const {
    return std::all_of(entries.begin(), entries.end(), [](const SoundnessEntry& e) { return e.ok; });
}

namespace {

bool same_partition(const Partition& a, const Partition& b) { return a.left == b.left && a.right == b.right; }

bool same_term(const PartitionTerm& a, const PartitionTerm& b) {
    return a.labels == b.labels && a.N == b.N && a.d_prime == b.d_prime && a.fallback == b.fallback;
}

bool same_term(const PieceTerm& a, const PieceTerm& b) {
    return a.edges == b.edges && a.N_left == b.N_left && a.N_right == b.N_right && a.d_prime == b.d_prime &&
           a.trivial == b.trivial && a.capped == b.capped;
}

void compare_params(SoundnessLog& log, const CertificateParams& p, int n, std::size_t k, int q, std::size_t delta_n) {
    if (p.n != n || p.k != k || p.q != q) {
        log.consistent = false;
        log.mismatches.emplace_back("certificate was issued for a different (n, k, q)");
    }
    if (p.delta_n != delta_n) {
        log.consistent = false;
        log.mismatches.emplace_back("recorded δn differs from the instance");
    }
}

void compare_regular(SoundnessLog& log, const RegularRecord& rec, const RegularRefuter& r) {
    if (rec.total_edges != r.total_edges() || rec.D != r.D() || rec.trivial != r.trivial()) {
        log.consistent = false;
        log.mismatches.emplace_back("regular: edge total, D or triviality differs");
    }
    if (rec.partitions.size() != r.partitions().size()) {
        log.consistent = false;
        log.mismatches.emplace_back("regular: partition count differs");
        return;
    }
    for (std::size_t p = 0; p < rec.partitions.size(); ++p) {
        const auto& a = rec.partitions[p];
        const auto& b = r.partitions()[p];
        if (!same_partition(a.partition, b.partition) || !same_term(a.term, b.term)) {
            log.consistent = false;
            log.mismatches.push_back("regular partition " + std::to_string(p) + ": L, R, N or D' differs");
        }
    }
}

// Bound from the certificate's recorded terms and freshly realized norms.
double recorded_regular_bound(const Certificate& cert, const RegularRefuter& r, const Signs& b) {
    const auto& rec = *cert.regular;
    if (rec.trivial) {
        return static_cast<double>(rec.total_edges);
    }
    const auto norms = r.norms(b);
    const std::size_t parts = std::min(norms.size(), rec.partitions.size());
    std::vector<double> f(rec.partitions.size(), 0.0);
    for (std::size_t p = 0; p < parts; ++p) {
        f[p] = partition_f_bound(rec.partitions[p].term, norms[p].value);
    }
    return cauchy_schwarz_bound(cert.params.q, cert.params.n, rec.total_edges, f);
}

void record_entry(SoundnessLog& log, const Certificate& cert, const Signs& b, double bound, std::int64_t val) {
    SoundnessEntry e;
    e.b = b;
    e.val = val;
    e.bound = bound;
    e.ok = bound * (1.0 + kSoundnessGuard) >= static_cast<double>(val);
    log.entries.push_back(std::move(e));
    for (const auto& rec : cert.per_sign) {
        if (rec.b == b) {
            const double tol = 1e-9 * std::max(1.0, std::abs(rec.bound));
            if (std::abs(rec.bound - bound) > tol) {
                log.consistent = false;
                log.mismatches.push_back("recorded bound for a sign vector does not match its recomputation");
            }
            if (rec.val && *rec.val != val) {
                log.consistent = false;
                log.mismatches.push_back("recorded val for a sign vector is wrong");
            }
            break;
        }
    }
}

} // namespace

SoundnessLog soundness_check(const Certificate& cert, const XorInstance& inst, const std::vector<Signs>& signs) {
    SoundnessLog log;
    if (cert.kind == CertificateKind::bipartite) {
        throw std::invalid_argument("soundness_check: bipartite certificates need the piece instance");
    }
    if (!cert.regular) {
        throw std::invalid_argument("soundness_check: certificate has no regular record");
    }
    const auto opts = options_from(cert.params);
    const std::size_t delta_n = inst.max_matching_size();
    compare_params(log, cert.params, inst.n, inst.k(), inst.q, delta_n);

    std::unique_ptr<FullPipeline> fp;
    std::optional<RegularRefuter> regular_only;
    const RegularRefuter* reg = nullptr;
    if (cert.kind == CertificateKind::combined) {
        fp = build_full(inst, opts, delta_n);
        reg = &*fp->regular;
        if (fp->pieces.size() != cert.pieces.size()) {
            log.consistent = false;
            log.mismatches.emplace_back("piece count differs");
        }
        for (std::size_t i = 0; i < std::min(fp->pieces.size(), cert.pieces.size()); ++i) {
            if (!same_term(fp->pieces[i]->term(), cert.pieces[i].term) || fp->pieces[i]->D() != cert.pieces[i].D) {
                log.consistent = false;
                log.mismatches.push_back("piece s=" + std::to_string(cert.pieces[i].s) + ": N_L, N_R or D' differs");
            }
        }
    } else {
        const auto thr = compute_thresholds(inst.n, inst.k(), inst.q, measured_delta(delta_n, inst.n), opts.ell);
        regular_only.emplace(inst, thr, delta_n, opts);
        reg = &*regular_only;
    }
    compare_regular(log, *cert.regular, *reg);

    std::vector<SoundnessEntry> entries(signs.size());
    std::vector<double> bounds(signs.size());
    std::vector<std::int64_t> vals(signs.size());
    parallel_for(signs.size(), [&](std::size_t t) {
        const auto& b = signs[t];
        double bound = recorded_regular_bound(cert, *reg, b);
        if (fp) {
            for (std::size_t i = 0; i < std::min(fp->pieces.size(), cert.pieces.size()); ++i) {
                bound += piece_bound(cert.pieces[i].term, fp->pieces[i]->norm(b).value);
            }
        }
        bounds[t] = bound;
        vals[t] = brute_force_val(inst, b).value;
    });
    for (std::size_t t = 0; t < signs.size(); ++t) {
        record_entry(log, cert, signs[t], bounds[t], vals[t]);
    }
    return log;
}

SoundnessLog soundness_check(const Certificate& cert, const BipartiteXorInstance& piece,
                             const std::vector<Signs>& signs) {
    SoundnessLog log;
    if (cert.kind != CertificateKind::bipartite || cert.pieces.size() != 1) {
        throw std::invalid_argument("soundness_check: expected a single-piece bipartite certificate");
    }
    const auto opts = options_from(cert.params);
    const std::size_t delta_n = piece.max_matching_size();
    compare_params(log, cert.params, piece.n, piece.k(), piece.q, delta_n);
    const BipartiteRefuter r(piece, cert.params.ell, delta_n, opts);
    if (!same_term(r.term(), cert.pieces[0].term) || r.D() != cert.pieces[0].D) {
        log.consistent = false;
        log.mismatches.emplace_back("piece: N_L, N_R or D' differs");
    }
    std::vector<double> bounds(signs.size());
    std::vector<std::int64_t> vals(signs.size());
    parallel_for(signs.size(), [&](std::size_t t) {
        bounds[t] = piece_bound(cert.pieces[0].term, r.norm(signs[t]).value);
        vals[t] = brute_force_val(piece, signs[t]).value;
    });
    for (std::size_t t = 0; t < signs.size(); ++t) {
        record_entry(log, cert, signs[t], bounds[t], vals[t]);
    }
    return log;
}

} // namespace kikuchi
