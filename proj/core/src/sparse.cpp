#include "odekit/linalg/sparse.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace odekit {

void csr_matrix::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("csr_matrix: " + what); };
    if (row_ptr.size() != n_rows + 1) fail("row_ptr must have n_rows+1 entries");
    if (row_ptr.front() != 0) fail("row_ptr[0] must be 0");
    if (static_cast<std::size_t>(row_ptr.back()) != vals.size()) fail("row_ptr[n_rows] must equal nnz");
    if (col_idx.size() != vals.size()) fail("col_idx and vals differ in length");
    for (std::size_t r = 0; r < n_rows; ++r) {
        if (row_ptr[r + 1] < row_ptr[r]) fail("row_ptr is not monotone at row " + std::to_string(r));
        for (auto j = row_ptr[r]; j < row_ptr[r + 1]; ++j) {
            if (col_idx[j] < 0 || static_cast<std::size_t>(col_idx[j]) >= n_cols)
                fail("column index out of range in row " + std::to_string(r));
            if (j > row_ptr[r] && col_idx[j] <= col_idx[j - 1])
                fail("columns not strictly increasing in row " + std::to_string(r));
        }
    }
}

csr_matrix csr_from_triplets(std::size_t n_rows, std::size_t n_cols, std::vector<triplet> entries) {
    if (n_rows > static_cast<std::size_t>(std::numeric_limits<sparse_index>::max()) ||
        n_cols > static_cast<std::size_t>(std::numeric_limits<sparse_index>::max()))
        throw std::length_error("csr_from_triplets: dimensions exceed the 32-bit index range");
    for (const auto& t : entries)
        if (t.row >= n_rows || t.col >= n_cols)
            throw std::invalid_argument("csr_from_triplets: entry (" + std::to_string(t.row) + ", " +
                                        std::to_string(t.col) + ") outside " +
                                        std::to_string(n_rows) + "x" + std::to_string(n_cols));
    std::stable_sort(entries.begin(), entries.end(), [](const triplet& a, const triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    csr_matrix a;
    a.n_rows = n_rows;
    a.n_cols = n_cols;
    a.row_ptr.assign(n_rows + 1, 0);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& t = entries[k];
        if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
            a.vals.back() += t.value;
            continue;
        }
        a.col_idx.push_back(static_cast<sparse_index>(t.col));
        a.vals.push_back(t.value);
        ++a.row_ptr[t.row + 1];
    }
    for (std::size_t r = 0; r < n_rows; ++r) a.row_ptr[r + 1] += a.row_ptr[r];
    return a;
}

ell_matrix csr_to_ell(const csr_matrix& a) {
    ell_matrix e;
    e.n_rows = a.n_rows;
    e.n_cols = a.n_cols;
    for (std::size_t r = 0; r < a.n_rows; ++r) e.width = std::max(e.width, a.row_length(r));
    e.col_idx.resize(e.width * e.n_rows);
    e.vals.assign(e.width * e.n_rows, 0.0);
    for (std::size_t r = 0; r < a.n_rows; ++r) {
        const auto self = static_cast<sparse_index>(a.n_cols == 0 ? 0 : std::min(r, a.n_cols - 1));
        const std::size_t len = a.row_length(r);
        for (std::size_t k = 0; k < e.width; ++k) {
            const std::size_t slot = k * e.n_rows + r;
            if (k < len) {
                const auto j = static_cast<std::size_t>(a.row_ptr[r]) + k;
                e.col_idx[slot] = a.col_idx[j];
                e.vals[slot] = a.vals[j];
            } else {
                e.col_idx[slot] = self;
            }
        }
    }
    return e;
}

std::vector<scalar> to_dense(const csr_matrix& a) {
    std::vector<scalar> d(a.n_rows * a.n_cols, 0.0);
    for (std::size_t r = 0; r < a.n_rows; ++r)
        for (auto j = a.row_ptr[r]; j < a.row_ptr[r + 1]; ++j)
            d[r * a.n_cols + static_cast<std::size_t>(a.col_idx[j])] += a.vals[j];
    return d;
}

lattice_operator build_lattice_operator(std::size_t nx, std::size_t ny,
                                        std::span<const scalar> omega2) {
    if (nx == 0 || ny == 0)
        throw std::invalid_argument("build_lattice_operator: grid extents must be >= 1");
    if (omega2.size() != nx * ny)
        throw dimension_error("build_lattice_operator: omega2 has " + std::to_string(omega2.size()) +
                              " entries, grid has " + std::to_string(nx * ny) + " nodes");
    const std::size_t n = nx * ny;
    if (n > static_cast<std::size_t>(std::numeric_limits<sparse_index>::max()) / 5)
        throw std::length_error("build_lattice_operator: grid too large for 32-bit indices");

    lattice_operator op;
    op.nx = nx;
    op.ny = ny;
    csr_matrix& a = op.csr;
    a.n_rows = a.n_cols = n;
    a.row_ptr.assign(1, 0);
    a.row_ptr.reserve(n + 1);
    a.col_idx.reserve(5 * n);
    a.vals.reserve(5 * n);

    auto push = [&](std::size_t col, scalar v) {
        a.col_idx.push_back(static_cast<sparse_index>(col));
        a.vals.push_back(v);
    };
    // Entries pushed in increasing column order: up, left, self, right, down.
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const std::size_t k = i * ny + j;
            if (i > 0) push(k - ny, 1.0);
            if (j > 0) push(k - 1, 1.0);
            push(k, -omega2[k] - 4.0);
            if (j + 1 < ny) push(k + 1, 1.0);
            if (i + 1 < nx) push(k + ny, 1.0);
            a.row_ptr.push_back(static_cast<sparse_index>(a.vals.size()));
        }
    }
    op.ell = csr_to_ell(a);
    return op;
}

void write_triplets(std::ostream& os, const csr_matrix& a) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << "# " << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz() << '\n';
    os << std::setprecision(17);
    for (std::size_t r = 0; r < a.n_rows; ++r)
        for (auto j = a.row_ptr[r]; j < a.row_ptr[r + 1]; ++j)
            os << r << ' ' << a.col_idx[j] << ' ' << a.vals[j] << '\n';
    os.flags(flags);
    os.precision(prec);
}

csr_matrix read_triplets(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_header = false;
    std::vector<triplet> entries;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (!have_header) {
            char hash = 0;
            if (!(ls >> hash >> rows >> cols >> nnz) || hash != '#')
                throw std::invalid_argument("read_triplets: line 1: expected '# rows cols nnz'");
            have_header = true;
            continue;
        }
        triplet t{};
        if (!(ls >> t.row >> t.col >> t.value))
            throw std::invalid_argument("read_triplets: line " + std::to_string(line_no) +
                                        ": expected 'row col value'");
        entries.push_back(t);
    }
    if (!have_header) throw std::invalid_argument("read_triplets: missing header");
    if (entries.size() != nnz)
        throw std::invalid_argument("read_triplets: header announces " + std::to_string(nnz) +
                                    " entries, found " + std::to_string(entries.size()));
    return csr_from_triplets(rows, cols, std::move(entries));
}

}  // namespace odekit
