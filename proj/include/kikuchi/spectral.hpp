#pragma once

#include "kikuchi/kikuchi_graph.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kikuchi {

struct Triplet {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    double value = 0.0;
};

/// Compressed sparse rows. Repeated (row, col) pairs are kept as separate
/// entries; products sum them.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);
    /// Adopts CSR arrays as given (columns need not be sorted within a row).
    static SparseMatrix from_csr(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                                 std::vector<std::uint32_t> col, std::vector<double> val);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return val_.size(); }

    /// out = A in
    void multiply(std::span<const double> in, std::span<double> out) const;
    /// out = A^T in
    void multiply_transpose(std::span<const double> in, std::span<double> out) const;

    [[nodiscard]] SparseMatrix transpose() const;
    [[nodiscard]] double max_row_l1() const;
    [[nodiscard]] double max_col_l1() const;
    [[nodiscard]] std::vector<Triplet> triplets() const;

    [[nodiscard]] std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] std::span<const std::uint32_t> col_idx() const noexcept { return col_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return val_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_;
    std::vector<double> val_;
};

/// sum_i coeffs[i] * parts[i]; all parts must share dimensions.
[[nodiscard]] SparseMatrix linear_combination(const std::vector<SparseMatrix>& parts, std::span<const double> coeffs);

enum class NormMethod { dense_exact, power_iteration, lanczos };

[[nodiscard]] std::string to_string(NormMethod m);

struct PowerOptions {
    double tolerance = 1e-9;
    double residual_tolerance = 1e-6;
    std::size_t max_iterations = 10000;
    std::uint64_t seed = 0x5eed;
    /// Operators of at most this dimension are materialized and solved with
    /// cyclic Jacobi rotations.
    std::size_t dense_limit = 160;
    /// Lanczos with full reorthogonalization instead of plain power
    /// iteration; max_iterations then counts operator applications.
    bool krylov = true;
    /// Lanczos basis size before an explicit restart from the Ritz vector.
    std::size_t max_basis = 120;
};

struct EigenEstimate {
    double value = 0.0;
    NormMethod method = NormMethod::dense_exact;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool converged = true;
    /// Rayleigh quotients never decreased between iterations.
    bool monotone = true;
};

/// Symmetric positive semidefinite operator given by its action, plus an
/// optional materializer (row-major dim x dim).
struct PsdOperator {
    std::size_t dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;
    std::function<std::vector<double>()> dense;
};

[[nodiscard]] EigenEstimate top_eigenvalue(const PsdOperator& op, const PowerOptions& opts = {});

/// Eigenvalues of a dense symmetric matrix (row-major), ascending.
[[nodiscard]] std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n);

struct NormEstimate {
    double value = 0.0;
    NormMethod method = NormMethod::dense_exact;
    std::size_t iterations = 0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool converged = true;
    bool monotone = true;
    /// sqrt(max row L1 * max col L1), always >= the true norm.
    double schur_bound = 0.0;
    /// value <= schur_bound and value >= |v^T A w| / (|v||w|) for random probes.
    bool bounds_ok = true;
};

[[nodiscard]] NormEstimate spectral_norm(const SparseMatrix& a, const PowerOptions& opts = {});

/// Per-group matrices of a Kikuchi graph over the touched vertices only.
/// Entry weights come from `label_weight` (labels with weight 0 are skipped).
struct GroupMatrices {
    std::vector<SparseMatrix> groups;
    std::size_t rows = 0;
    std::size_t cols = 0;
    /// Uncompressed space sizes, used as (d1, d2) in the Khintchine bound.
    double full_rows = 0.0;
    double full_cols = 0.0;
};

[[nodiscard]] GroupMatrices group_matrices(const KikuchiGraph& g, std::span<const double> label_weight);

/// Fixed sparsity pattern of a Kikuchi graph over its touched vertices,
/// realized with fresh label weights (e.g. one per sign vector b).
class GraphPattern {
public:
    GraphPattern() = default;
    explicit GraphPattern(const KikuchiGraph& g);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] SparseMatrix realize(std::span<const double> label_weight) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t num_labels_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_;
    std::vector<std::uint32_t> label_;
};

struct KhintchineSigma {
    double sigma2 = 0.0;
    double row_gram = 0.0; // ||sum_i B_i B_i^T||
    double col_gram = 0.0; // ||sum_i B_i^T B_i||
    /// k * (max row L1) * (max col L1), the walk-counting proxy; >= sigma2.
    double proxy = 0.0;
    bool converged = true;
};

[[nodiscard]] KhintchineSigma khintchine_sigma(const std::vector<SparseMatrix>& groups, const PowerOptions& opts = {});

/// sqrt(2 σ² ln(d1 + d2)), natural log.
[[nodiscard]] double khintchine_bound(double sigma2, double d1, double d2);

struct ExpectedNorm {
    double mean = 0.0;
    double stderr_ = 0.0;
    bool exhaustive = false;
    std::size_t samples = 0;
    std::vector<double> norms;
};

inline constexpr std::size_t kExhaustiveSignLimit = 12;

/// E_b ||sum_i b_i B_i||, exhaustive over all 2^k signs when k <= 12,
/// otherwise `trials` seeded draws.
[[nodiscard]] ExpectedNorm estimate_expected_norm(const std::vector<SparseMatrix>& groups, std::size_t trials,
                                                  std::uint64_t seed, const PowerOptions& opts = {},
                                                  std::size_t exhaustive_k = kExhaustiveSignLimit);

} // namespace kikuchi
