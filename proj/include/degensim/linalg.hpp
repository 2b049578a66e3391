#ifndef DEGENSIM_LINALG_HPP
#define DEGENSIM_LINALG_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "degensim/errors.hpp"

namespace degensim {

/// Square sparse matrix in compressed sparse-row form.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Assembles from (row, col, value) triplets; duplicate entries add up.
    static SparseMatrix from_triplets(
        std::size_t n, std::vector<std::tuple<std::size_t, std::size_t, double>> triplets);

    std::size_t size() const { return n_; }
    const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
    const std::vector<std::size_t>& col_indices() const { return col_indices_; }
    const std::vector<double>& values() const { return values_; }

    double diagonal(std::size_t i) const;
    bool is_tridiagonal() const;

    /// y = A x.
    std::vector<double> multiply(const std::vector<double>& x) const;
    void multiply_into(const std::vector<double>& x, std::vector<double>& y) const;

    /// Returns a copy with `diag` added to the diagonal (diag.size() == n).
    SparseMatrix plus_diagonal(const std::vector<double>& diag) const;

    /// Returns scale * A + diag(diag) reusing this matrix's sparsity layout;
    /// every diagonal entry must already be stored.
    SparseMatrix scaled_with_diagonal(double scale,
                                      const std::vector<double>& diag) const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

inline std::vector<double> spmv(const SparseMatrix& A, const std::vector<double>& x) {
    return A.multiply(x);
}

struct LinearSolveConfig {
    double rel_tol = 1e-10;
    std::size_t max_iterations = 0;  // 0 means 10 * n
    bool jacobi_preconditioner = true;
    /// Optional per-iteration observer (iterate vector), for diagnostics.
    std::function<void(const std::vector<double>&)> iterate_observer;
};

/// Conjugate gradients for symmetric positive definite systems.
/// ConvergenceError carries the final relative residual on budget exhaustion.
std::vector<double> cg_solve(const SparseMatrix& A, const std::vector<double>& b,
                             const LinearSolveConfig& cfg = {});

/// Direct tridiagonal elimination (Thomas algorithm). DimensionError if the
/// matrix has entries outside the three central diagonals.
std::vector<double> tridiagonal_solve(const SparseMatrix& A,
                                      const std::vector<double>& b);

} // namespace degensim

#endif
