#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "odekit/algebra.hpp"
#include "odekit/state.hpp"

namespace odekit {

using sparse_index = std::int32_t;

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row.
struct csr_matrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<sparse_index> row_ptr{0};
    std::vector<sparse_index> col_idx;
    std::vector<scalar> vals;

    std::size_t nnz() const noexcept { return vals.size(); }
    std::size_t row_length(std::size_t r) const {
        return static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r]);
    }
    /// Throws std::invalid_argument if the structural invariants are violated.
    void validate() const;
};

/// Padded fixed-width (ELLPACK) matrix in column-major slot order: slot k of
/// row r lives at k*n_rows + r. Padding slots hold value 0 and point at the
/// row's own index (clamped to the column range), so they add exactly zero.
struct ell_matrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::size_t width = 0;
    std::vector<sparse_index> col_idx;
    std::vector<scalar> vals;
};

struct triplet {
    std::size_t row;
    std::size_t col;
    scalar value;
};

/// Builds a CSR matrix from unordered triplets; duplicates are summed in input order.
csr_matrix csr_from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<triplet> entries);

ell_matrix csr_to_ell(const csr_matrix& a);

/// Row-major dense copy, for oracles and debugging.
std::vector<scalar> to_dense(const csr_matrix& a);

template <class Algebra = serial_algebra>
void spmv(const csr_matrix& a, std::span<const scalar> x, std::span<scalar> y,
          const Algebra& algebra = {}) {
    detail::check_equal_lengths("spmv(csr): x", a.n_cols, x.size());
    detail::check_equal_lengths("spmv(csr): y", a.n_rows, y.size());
    const sparse_index* ptr = a.row_ptr.data();
    const sparse_index* col = a.col_idx.data();
    const scalar* val = a.vals.data();
    algebra.for_range(a.n_rows, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
            scalar sum = 0;
            for (sparse_index j = ptr[r]; j < ptr[r + 1]; ++j) sum += val[j] * x[col[j]];
            y[r] = sum;
        }
    });
}

template <class Algebra = serial_algebra>
void spmv(const ell_matrix& a, std::span<const scalar> x, std::span<scalar> y,
          const Algebra& algebra = {}) {
    detail::check_equal_lengths("spmv(ell): x", a.n_cols, x.size());
    detail::check_equal_lengths("spmv(ell): y", a.n_rows, y.size());
    const std::size_t n = a.n_rows;
    const std::size_t width = a.width;
    const sparse_index* col = a.col_idx.data();
    const scalar* val = a.vals.data();
    algebra.for_range(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
            scalar sum = 0;
            for (std::size_t k = 0; k < width; ++k) sum += val[k * n + r] * x[col[k * n + r]];
            y[r] = sum;
        }
    });
}

inline state_vector spmv(const csr_matrix& a, std::span<const scalar> x) {
    state_vector y(a.n_rows);
    spmv(a, x, std::span<scalar>(y));
    return y;
}

inline state_vector spmv(const ell_matrix& a, std::span<const scalar> x) {
    state_vector y(a.n_rows);
    spmv(a, x, std::span<scalar>(y));
    return y;
}

/// Matrix of -omega2[k] q_k + (discrete 2-D Laplacian q)_k on an nx-by-ny grid,
/// node k = i*ny + j (j fastest). Neighbours outside the grid are dropped.
struct lattice_operator {
    std::size_t nx = 0;
    std::size_t ny = 0;
    csr_matrix csr;
    ell_matrix ell;
};

lattice_operator build_lattice_operator(std::size_t nx, std::size_t ny,
                                        std::span<const scalar> omega2);

/// Text dump: a "# rows cols nnz" header, then "row col value" per line with
/// 17 significant digits, in CSR order.
void write_triplets(std::ostream& os, const csr_matrix& a);
csr_matrix read_triplets(std::istream& is);

}  // namespace odekit
