#include "kikuchi/spectral.hpp"

#include "kikuchi/parallel.hpp"
#include "kikuchi/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace kikuchi {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Triplet& a, const Triplet& b) { return std::pair(a.row, a.col) < std::pair(b.row, b.col); });
    row_ptr_.assign(rows + 1, 0);
    col_.reserve(entries.size());
    val_.reserve(entries.size());
    for (const auto& t : entries) {
        if (t.row >= rows || t.col >= cols) {
            throw std::out_of_range("sparse matrix entry outside its dimensions");
        }
        ++row_ptr_[t.row + 1];
        col_.push_back(t.col);
        val_.push_back(t.value);
    }
    std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
}

SparseMatrix SparseMatrix::from_csr(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                                   std::vector<std::uint32_t> col, std::vector<double> val) {
    if (row_ptr.size() != rows + 1 || col.size() != val.size() || row_ptr.back() != col.size()) {
        throw std::invalid_argument("from_csr: inconsistent arrays");
    }
    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_ = std::move(row_ptr);
    m.col_ = std::move(col);
    m.val_ = std::move(val);
    return m;
}

void SparseMatrix::multiply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != cols_ || out.size() != rows_) {
        throw std::invalid_argument("sparse multiply: dimension mismatch");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
            acc += val_[e] * in[col_[e]];
        }
        out[r] = acc;
    }
}

void SparseMatrix::multiply_transpose(std::span<const double> in, std::span<double> out) const {
    if (in.size() != rows_ || out.size() != cols_) {
        throw std::invalid_argument("sparse multiply: dimension mismatch");
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        const double x = in[r];
        for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
            out[col_[e]] += val_[e] * x;
        }
    }
}

std::vector<Triplet> SparseMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(val_.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
            out.push_back({static_cast<std::uint32_t>(r), col_[e], val_[e]});
        }
    }
    return out;
}

SparseMatrix SparseMatrix::transpose() const {
    auto t = triplets();
    for (auto& e : t) {
        std::swap(e.row, e.col);
    }
    return {cols_, rows_, std::move(t)};
}

double SparseMatrix::max_row_l1() const {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) {
            s += std::abs(val_[e]);
        }
        best = std::max(best, s);
    }
    return best;
}

double SparseMatrix::max_col_l1() const {
    std::vector<double> s(cols_, 0.0);
    for (std::size_t e = 0; e < val_.size(); ++e) {
        s[col_[e]] += std::abs(val_[e]);
    }
    return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
}

SparseMatrix linear_combination(const std::vector<SparseMatrix>& parts, std::span<const double> coeffs) {
    if (parts.size() != coeffs.size()) {
        throw std::invalid_argument("linear_combination: one coefficient per part");
    }
    std::size_t rows = parts.empty() ? 0 : parts.front().rows();
    std::size_t cols = parts.empty() ? 0 : parts.front().cols();
    std::vector<Triplet> all;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].rows() != rows || parts[i].cols() != cols) {
            throw std::invalid_argument("linear_combination: dimension mismatch");
        }
        if (coeffs[i] == 0.0) {
            continue;
        }
        for (auto t : parts[i].triplets()) {
            t.value *= coeffs[i];
            all.push_back(t);
        }
    }
    return {rows, cols, std::move(all)};
}

std::string to_string(NormMethod m) {
    switch (m) {
    case NormMethod::dense_exact:
        return "dense_exact";
    case NormMethod::power_iteration:
        return "power_iteration";
    case NormMethod::lanczos:
        return "lanczos";
    }
    return "dense_exact";
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    if (a.size() != n * n) {
        throw std::invalid_argument("symmetric_eigenvalues: matrix is not n x n");
    }
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    double scale = 0.0;
    for (double v : a) {
        scale += v * v;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += at(i, j) * at(i, j);
            }
        }
        if (off <= 1e-30 * scale || off == 0.0) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) {
        eig[i] = at(i, i);
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// Largest eigenvalue of the symmetric tridiagonal matrix (alpha, beta) by
// Sturm-sequence bisection.
double tridiagonal_top(const std::vector<double>& alpha, const std::vector<double>& beta) {
    const std::size_t m = alpha.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < m ? std::abs(beta[i]) : 0.0);
        lo = std::min(lo, alpha[i] - r);
        hi = std::max(hi, alpha[i] + r);
    }
    auto below = [&](double x) {
        std::size_t count = 0;
        double d = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
            d = alpha[i] - x - (i > 0 ? b2 / d : 0.0);
            if (d == 0.0) {
                d = -1e-300;
            }
            count += d < 0.0 ? 1 : 0;
        }
        return count;
    };
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
         ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (below(mid) == m ? hi : lo) = mid;
    }
    return hi;
}

// Eigenvector of the tridiagonal matrix for eigenvalue theta: two steps of
// inverse iteration with a row-pivoted tridiagonal solve.
std::vector<double> tridiagonal_vector(const std::vector<double>& alpha, const std::vector<double>& beta,
                                       double theta) {
    const std::size_t m = alpha.size();
    std::vector<double> x(m, 1.0);
    if (m == 1) {
        return x;
    }
    const double tiny = std::max(std::abs(theta), 1.0) * 1e-300;
    for (int step = 0; step < 2; ++step) {
        std::vector<double> d(m);
        std::vector<double> dl(beta);
        std::vector<double> du(beta);
        std::vector<double> du2(m, 0.0);
        std::vector<char> swapped(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            d[i] = alpha[i] - theta;
        }
        for (std::size_t i = 0; i + 1 < m; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (d[i] == 0.0) {
                    d[i] = tiny;
                }
                const double f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                const double f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                const double t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - f * d[i + 1];
                if (i + 2 < m) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                swapped[i] = 1;
            }
        }
        if (d[m - 1] == 0.0) {
            d[m - 1] = tiny;
        }
        for (std::size_t i = 0; i + 1 < m; ++i) {
            if (swapped[i] != 0) {
                const double t = x[i];
                x[i] = x[i + 1];
                x[i + 1] = t - dl[i] * x[i];
            } else {
                x[i + 1] -= dl[i] * x[i];
            }
        }
        x[m - 1] /= d[m - 1];
        x[m - 2] = (x[m - 2] - du[m - 2] * x[m - 1]) / d[m - 2];
        for (std::size_t i = m - 2; i-- > 0;) {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        double n2 = 0.0;
        for (const double v : x) {
            n2 += v * v;
        }
        const double nrm = std::sqrt(n2);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) {
            std::fill(x.begin(), x.end(), 0.0);
            x[m - 1] = 1.0;
            return x;
        }
        for (auto& v : x) {
            v /= nrm;
        }
    }
    return x;
}

EigenEstimate lanczos_run(const PsdOperator& op, std::vector<double> v, const PowerOptions& opts) {
    EigenEstimate est;
    est.method = NormMethod::lanczos;
    est.converged = false;
    const std::size_t n = op.dim;
    double nv = std::sqrt(dot(v, v));
    if (nv == 0.0) {
        est.converged = true;
        return est;
    }
    for (auto& x : v) {
        x /= nv;
    }
    const std::size_t basis = std::max<std::size_t>(2, std::min(opts.max_basis, n));
    double prev = -std::numeric_limits<double>::infinity();
    std::vector<double> w(n);
    while (true) {
        std::vector<std::vector<double>> V{v};
        std::vector<double> alpha;
        std::vector<double> beta;
        for (std::size_t j = 0;; ++j) {
            op.apply(V[j], w);
            ++est.iterations;
            const double a = dot(V[j], w);
            for (std::size_t i = 0; i < n; ++i) {
                w[i] -= a * V[j][i] + (j > 0 ? beta[j - 1] * V[j - 1][i] : 0.0);
            }
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& u : V) {
                    const double c = dot(u, w);
                    for (std::size_t i = 0; i < n; ++i) {
                        w[i] -= c * u[i];
                    }
                }
            }
            alpha.push_back(a);
            const double b = std::sqrt(dot(w, w));
            const double theta = tridiagonal_top(alpha, beta);
            if (theta < prev - 1e-12 * std::abs(prev)) {
                est.monotone = false;
            }
            est.value = std::max(theta, 0.0);
            const bool invariant = b <= 1e-13 * std::max(std::abs(theta), 1e-300) || j + 1 == n;
            const bool last = est.iterations >= opts.max_iterations;
            const bool restart = j + 1 >= basis;
            const bool settled = std::abs(theta - prev) <= opts.tolerance * std::abs(theta);
            prev = theta;
            if (invariant || settled || last || restart) {
                const auto s = tridiagonal_vector(alpha, beta, theta);
                est.residual = invariant || theta <= 0.0 ? 0.0 : b * std::abs(s.back()) / theta;
                if (invariant || theta <= 0.0 || (settled && est.residual <= opts.residual_tolerance)) {
                    est.converged = true;
                    return est;
                }
                if (last) {
                    return est;
                }
                if (restart) {
                    std::fill(v.begin(), v.end(), 0.0);
                    for (std::size_t r = 0; r < V.size(); ++r) {
                        for (std::size_t i = 0; i < n; ++i) {
                            v[i] += s[r] * V[r][i];
                        }
                    }
                    nv = std::sqrt(dot(v, v));
                    for (auto& x : v) {
                        x /= nv;
                    }
                    break;
                }
            }
            beta.push_back(b);
            for (auto& x : w) {
                x /= b;
            }
            V.push_back(w);
        }
    }
}

EigenEstimate power_run(const PsdOperator& op, std::vector<double> v, const PowerOptions& opts) {
    EigenEstimate est;
    est.method = NormMethod::power_iteration;
    est.converged = false;
    const double norm0 = std::sqrt(dot(v, v));
    if (norm0 == 0.0) {
        est.converged = true;
        return est;
    }
    for (auto& x : v) {
        x /= norm0;
    }
    std::vector<double> w(op.dim);
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        op.apply(v, w);
        const double lambda = dot(v, w);
        double res2 = 0.0;
        double wn2 = 0.0;
        for (std::size_t i = 0; i < op.dim; ++i) {
            const double r = w[i] - lambda * v[i];
            res2 += r * r;
            wn2 += w[i] * w[i];
        }
        est.iterations = it;
        est.value = lambda;
        est.residual = lambda > 0 ? std::sqrt(res2) / lambda : 0.0;
        if (lambda < prev - 1e-12 * std::abs(prev)) {
            est.monotone = false;
        }
        if (wn2 == 0.0) {
            est.value = 0.0;
            est.converged = true;
            return est;
        }
        if (std::abs(lambda - prev) <= opts.tolerance * lambda && est.residual <= opts.residual_tolerance) {
            est.converged = true;
            return est;
        }
        prev = lambda;
        const double wn = std::sqrt(wn2);
        for (std::size_t i = 0; i < op.dim; ++i) {
            v[i] = w[i] / wn;
        }
    }
    return est;
}

} // namespace

EigenEstimate top_eigenvalue(const PsdOperator& op, const PowerOptions& opts) {
    if (op.dim == 0) {
        return {};
    }
    if (op.dense && op.dim <= opts.dense_limit) {
        EigenEstimate est;
        est.method = NormMethod::dense_exact;
        est.value = std::max(0.0, symmetric_eigenvalues(op.dense(), op.dim).back());
        return est;
    }
    Rng rng(opts.seed);
    if (opts.krylov) {
        std::vector<double> start(op.dim);
        for (auto& x : start) {
            x = rng.normal();
        }
        return lanczos_run(op, std::move(start), opts);
    }
    auto first = power_run(op, std::vector<double>(op.dim, 1.0), opts);
    std::vector<double> start(op.dim);
    for (auto& x : start) {
        x = rng.normal();
    }
    auto second = power_run(op, std::move(start), opts);
    auto best = second.value > first.value ? second : first;
    best.iterations = first.iterations + second.iterations;
    best.monotone = first.monotone && second.monotone;
    best.converged = first.converged && second.converged;
    return best;
}

namespace {

// M^T M, accumulated from pairs of entries sharing a row of M.
void add_gram_of_rows(const SparseMatrix& m, std::vector<double>& g) {
    const std::size_t dim = m.cols();
    const auto ptr = m.row_ptr();
    const auto col = m.col_idx();
    const auto val = m.values();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t a = ptr[r]; a < ptr[r + 1]; ++a) {
            for (std::size_t b = ptr[r]; b < ptr[r + 1]; ++b) {
                g[col[a] * dim + col[b]] += val[a] * val[b];
            }
        }
    }
}

} // namespace

NormEstimate spectral_norm(const SparseMatrix& a, const PowerOptions& opts) {
    NormEstimate out;
    out.tolerance = opts.tolerance;
    out.schur_bound = std::sqrt(a.max_row_l1() * a.max_col_l1());
    if (a.nonzeros() == 0) {
        return out;
    }
    const bool use_cols = a.cols() <= a.rows();
    const SparseMatrix at = a.transpose();
    PsdOperator op;
    op.dim = use_cols ? a.cols() : a.rows();
    std::vector<double> tmp(use_cols ? a.rows() : a.cols());
    op.apply = [&](std::span<const double> in, std::span<double> res) {
        if (use_cols) {
            a.multiply(in, tmp);
            at.multiply(tmp, res);
        } else {
            at.multiply(in, tmp);
            a.multiply(tmp, res);
        }
    };
    op.dense = [&] {
        std::vector<double> g(op.dim * op.dim, 0.0);
        add_gram_of_rows(use_cols ? a : at, g);
        return g;
    };
    const auto eig = top_eigenvalue(op, opts);
    out.value = std::sqrt(std::max(0.0, eig.value));
    out.method = eig.method;
    out.iterations = eig.iterations;
    out.residual = eig.residual;
    out.converged = eig.converged;
    out.monotone = eig.monotone;

    out.bounds_ok = out.value <= out.schur_bound * (1 + 1e-9) + 1e-12;
    Rng rng(mix_seed(opts.seed, 1));
    std::vector<double> v(a.rows());
    std::vector<double> w(a.cols());
    std::vector<double> aw(a.rows());
    for (int probe = 0; probe < 3; ++probe) {
        for (auto& x : v) {
            x = rng.normal();
        }
        for (auto& x : w) {
            x = rng.normal();
        }
        a.multiply(w, aw);
        const double ratio = std::abs(dot(v, aw)) / std::sqrt(dot(v, v) * dot(w, w));
        if (ratio > out.value * (1 + 1e-9) + 1e-12) {
            out.bounds_ok = false;
        }
    }
    return out;
}

GroupMatrices group_matrices(const KikuchiGraph& g, std::span<const double> label_weight) {
    if (label_weight.size() != g.labels.size()) {
        throw std::invalid_argument("group_matrices: one weight per label");
    }
    std::vector<std::uint64_t> rows;
    std::vector<std::uint64_t> cols;
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        if (label_weight[l] == 0.0) {
            continue;
        }
        for (const auto& e : g.label_edges(l)) {
            rows.push_back(e.left);
            cols.push_back(e.right);
        }
    }
    auto compress = [](std::vector<std::uint64_t>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        std::unordered_map<std::uint64_t, std::uint32_t> index;
        for (std::size_t i = 0; i < v.size(); ++i) {
            index.emplace(v[i], static_cast<std::uint32_t>(i));
        }
        return index;
    };
    const auto row_index = compress(rows);
    const auto col_index = compress(cols);
    std::vector<std::vector<Triplet>> per_group(g.num_groups);
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        if (label_weight[l] == 0.0) {
            continue;
        }
        auto& dest = per_group.at(g.labels[l].group);
        for (const auto& e : g.label_edges(l)) {
            dest.push_back({row_index.at(e.left), col_index.at(e.right), label_weight[l]});
        }
    }
    GroupMatrices out;
    out.rows = rows.size();
    out.cols = cols.size();
    out.full_rows = g.left.cardinality().convert_to<double>();
    out.full_cols = g.right.cardinality().convert_to<double>();
    for (auto& t : per_group) {
        out.groups.emplace_back(out.rows, out.cols, std::move(t));
    }
    return out;
}

GraphPattern::GraphPattern(const KikuchiGraph& g) : num_labels_(g.labels.size()) {
    std::unordered_map<std::uint64_t, std::uint32_t> row_index;
    std::unordered_map<std::uint64_t, std::uint32_t> col_index;
    std::vector<std::uint64_t> rows;
    std::vector<std::uint64_t> cols;
    for (const auto& e : g.edges) {
        rows.push_back(e.left);
        cols.push_back(e.right);
    }
    for (auto* v : {&rows, &cols}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    rows_ = rows.size();
    cols_ = cols.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        row_index.emplace(rows[i], static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = 0; i < cols.size(); ++i) {
        col_index.emplace(cols[i], static_cast<std::uint32_t>(i));
    }
    struct Entry {
        std::uint32_t row;
        std::uint32_t col;
        std::uint32_t label;
    };
    std::vector<Entry> entries;
    entries.reserve(g.edges.size());
    for (std::size_t l = 0; l < g.labels.size(); ++l) {
        for (const auto& e : g.label_edges(l)) {
            entries.push_back({row_index.at(e.left), col_index.at(e.right), static_cast<std::uint32_t>(l)});
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return std::pair(a.row, a.col) < std::pair(b.row, b.col); });
    row_ptr_.assign(rows_ + 1, 0);
    for (const auto& e : entries) {
        ++row_ptr_[e.row + 1];
        col_.push_back(e.col);
        label_.push_back(e.label);
    }
    std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
}

SparseMatrix GraphPattern::realize(std::span<const double> label_weight) const {
    if (label_weight.size() != num_labels_) {
        throw std::invalid_argument("GraphPattern::realize: one weight per label");
    }
    std::vector<double> val(label_.size());
    for (std::size_t e = 0; e < label_.size(); ++e) {
        val[e] = label_weight[label_[e]];
    }
    return SparseMatrix::from_csr(rows_, cols_, row_ptr_, col_, std::move(val));
}

KhintchineSigma khintchine_sigma(const std::vector<SparseMatrix>& groups, const PowerOptions& opts) {
    KhintchineSigma out;
    if (groups.empty()) {
        return out;
    }
    const std::size_t rows = groups.front().rows();
    const std::size_t cols = groups.front().cols();
    std::vector<SparseMatrix> transposed;
    double max_row = 0.0;
    double max_col = 0.0;
    std::size_t nonempty = 0;
    for (const auto& b : groups) {
        if (b.rows() != rows || b.cols() != cols) {
            throw std::invalid_argument("khintchine_sigma: groups must share dimensions");
        }
        transposed.push_back(b.transpose());
        max_row = std::max(max_row, b.max_row_l1());
        max_col = std::max(max_col, b.max_col_l1());
        nonempty += b.nonzeros() > 0 ? 1 : 0;
    }
    out.proxy = static_cast<double>(nonempty) * max_row * max_col;

    auto gram_norm = [&](bool row_side) {
        PsdOperator op;
        op.dim = row_side ? rows : cols;
        std::vector<double> tmp(row_side ? cols : rows);
        std::vector<double> part(op.dim);
        op.apply = [&](std::span<const double> in, std::span<double> res) {
            std::fill(res.begin(), res.end(), 0.0);
            for (std::size_t i = 0; i < groups.size(); ++i) {
                if (row_side) {
                    transposed[i].multiply(in, tmp);
                    groups[i].multiply(tmp, part);
                } else {
                    groups[i].multiply(in, tmp);
                    transposed[i].multiply(tmp, part);
                }
                for (std::size_t j = 0; j < op.dim; ++j) {
                    res[j] += part[j];
                }
            }
        };
        op.dense = [&] {
            std::vector<double> g(op.dim * op.dim, 0.0);
            for (std::size_t i = 0; i < groups.size(); ++i) {
                add_gram_of_rows(row_side ? transposed[i] : groups[i], g);
            }
            return g;
        };
        return top_eigenvalue(op, opts);
    };
    const auto r = gram_norm(true);
    const auto c = gram_norm(false);
    out.row_gram = r.value;
    out.col_gram = c.value;
    out.sigma2 = std::max(r.value, c.value);
    out.converged = r.converged && c.converged;
    return out;
}

double khintchine_bound(double sigma2, double d1, double d2) {
    if (sigma2 < 0 || d1 < 1 || d2 < 1) {
        throw std::invalid_argument("khintchine_bound needs sigma2 >= 0 and d1, d2 >= 1");
    }
    return std::sqrt(2.0 * sigma2 * std::log(d1 + d2));
}

ExpectedNorm estimate_expected_norm(const std::vector<SparseMatrix>& groups, std::size_t trials, std::uint64_t seed,
                                    const PowerOptions& opts, std::size_t exhaustive_k) {
    ExpectedNorm out;
    const std::size_t k = groups.size();
    out.exhaustive = k <= exhaustive_k;
    out.samples = out.exhaustive ? (std::size_t{1} << k) : std::max<std::size_t>(trials, 1);
    out.norms.assign(out.samples, 0.0);
    parallel_for(out.samples, [&](std::size_t t) {
        const Signs b = out.exhaustive ? signs_from_index(t, k) : random_signs(k, mix_seed(seed, t));
        const std::vector<double> coeffs(b.begin(), b.end());
        out.norms[t] = spectral_norm(linear_combination(groups, coeffs), opts).value;
    });
    double sum = 0.0;
    for (double v : out.norms) {
        sum += v;
    }
    const auto m = static_cast<double>(out.samples);
    out.mean = sum / m;
    if (!out.exhaustive && out.samples > 1) {
        double sq = 0.0;
        for (double v : out.norms) {
            sq += (v - out.mean) * (v - out.mean);
        }
        out.stderr_ = std::sqrt(sq / (m - 1) / m);
    }
    return out;
}

} // namespace kikuchi
