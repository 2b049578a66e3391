#include "degensim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace degensim {

SparseMatrix SparseMatrix::from_triplets(
    std::size_t n, std::vector<std::tuple<std::size_t, std::size_t, double>> triplets) {
    for (const auto& [r, c, v] : triplets) {
        (void)v;
        if (r >= n || c >= n) throw DimensionError("triplet index out of range");
    }
    std::sort(triplets.begin(), triplets.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(std::get<0>(a), std::get<1>(a)) <
                         std::tie(std::get<0>(b), std::get<1>(b));
              });
    SparseMatrix m;
    m.n_ = n;
    m.row_offsets_.assign(n + 1, 0);
    for (std::size_t k = 0; k < triplets.size();) {
        const auto [r, c, v0] = triplets[k];
        double v = v0;
        std::size_t j = k + 1;
        while (j < triplets.size() && std::get<0>(triplets[j]) == r &&
               std::get<1>(triplets[j]) == c) {
            v += std::get<2>(triplets[j]);
            ++j;
        }
        m.col_indices_.push_back(c);
        m.values_.push_back(v);
        m.row_offsets_[r + 1]++;
        k = j;
    }
    for (std::size_t r = 0; r < n; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
    return m;
}

double SparseMatrix::diagonal(std::size_t i) const {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
        if (col_indices_[k] == i) return values_[k];
    return 0.0;
}

bool SparseMatrix::is_tridiagonal() const {
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
            const std::size_t c = col_indices_[k];
            if (c + 1 < r || c > r + 1) return false;
        }
    return true;
}

void SparseMatrix::multiply_into(const std::vector<double>& x,
                                 std::vector<double>& y) const {
    if (x.size() != n_) throw DimensionError("spmv dimension mismatch");
    y.assign(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
        double s = 0.0;
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
            s += values_[k] * x[col_indices_[k]];
        y[r] = s;
    }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y;
    multiply_into(x, y);
    return y;
}

SparseMatrix SparseMatrix::plus_diagonal(const std::vector<double>& diag) const {
    if (diag.size() != n_) throw DimensionError("diagonal size mismatch");
    SparseMatrix m = *this;
    std::vector<bool> found(n_, false);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t k = m.row_offsets_[r]; k < m.row_offsets_[r + 1]; ++k)
            if (m.col_indices_[k] == r) {
                m.values_[k] += diag[r];
                found[r] = true;
            }
    for (std::size_t r = 0; r < n_; ++r)
        if (!found[r] && diag[r] != 0.0)
            throw DimensionError("plus_diagonal requires stored diagonal entries");
    return m;
}

SparseMatrix SparseMatrix::scaled_with_diagonal(
    double scale, const std::vector<double>& diag) const {
    if (diag.size() != n_) throw DimensionError("diagonal size mismatch");
    SparseMatrix m = *this;
    std::vector<bool> found(n_, false);
    for (std::size_t r = 0; r < n_; ++r)
        for (std::size_t k = m.row_offsets_[r]; k < m.row_offsets_[r + 1]; ++k) {
            m.values_[k] *= scale;
            if (m.col_indices_[k] == r) {
                m.values_[k] += diag[r];
                found[r] = true;
            }
        }
    for (std::size_t r = 0; r < n_; ++r)
        if (!found[r])
            throw DimensionError("scaled_with_diagonal requires stored diagonals");
    return m;
}

std::vector<double> cg_solve(const SparseMatrix& A, const std::vector<double>& b,
                             const LinearSolveConfig& cfg) {
    const std::size_t n = A.size();
    if (b.size() != n) throw DimensionError("cg_solve dimension mismatch");
    const std::size_t max_iter = cfg.max_iterations ? cfg.max_iterations : 10 * n;

    std::vector<double> inv_diag(n, 1.0);
    if (cfg.jacobi_preconditioner)
        for (std::size_t i = 0; i < n; ++i) {
            const double d = A.diagonal(i);
            inv_diag[i] = (d != 0.0) ? 1.0 / d : 1.0;
        }

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return std::vector<double>(n, 0.0);

    std::vector<double> x(n, 0.0), r = b, z(n), p(n), Ap(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    double rel = 1.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        A.multiply_into(p, Ap);
        double pAp = 0.0;
        for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0.0)
            throw ConvergenceError("cg_solve: matrix not positive definite", rel);
        const double alpha = rz / pAp;
        double rnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            rnorm += r[i] * r[i];
        }
        if (cfg.iterate_observer) cfg.iterate_observer(x);
        rel = std::sqrt(rnorm) / bnorm;
        if (rel <= cfg.rel_tol) return x;
        double rz_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_next += r[i] * z[i];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw ConvergenceError("cg_solve: iteration budget exhausted", rel);
}

std::vector<double> tridiagonal_solve(const SparseMatrix& A,
                                      const std::vector<double>& b) {
    const std::size_t n = A.size();
    if (b.size() != n) throw DimensionError("tridiagonal_solve dimension mismatch");
    if (!A.is_tridiagonal())
        throw DimensionError("tridiagonal_solve: matrix is not tridiagonal");

    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
    const auto& ro = A.row_offsets();
    const auto& ci = A.col_indices();
    const auto& va = A.values();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = ro[r]; k < ro[r + 1]; ++k) {
            if (ci[k] + 1 == r) lower[r] = va[k];
            else if (ci[k] == r) diag[r] = va[k];
            else upper[r] = va[k];
        }

    std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);
    double denom = diag[0];
    if (denom == 0.0) throw LinearSolveError("tridiagonal pivot is zero", 0.0);
    c[0] = upper[0] / denom;
    d[0] = b[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * c[i - 1];
        if (denom == 0.0) throw LinearSolveError("tridiagonal pivot is zero", 0.0);
        c[i] = upper[i] / denom;
        d[i] = (b[i] - lower[i] * d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

} // namespace degensim
