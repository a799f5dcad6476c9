#pragma once

#include <span>
#include <vector>

#include "resim/error.hpp"

namespace resim {

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Compressed sparse row matrix (row_ptr / col_idx / values).
struct CsrMatrix {
    Index nrows = 0;
    Index ncols = 0;
    std::vector<Index> row_ptr{0};
    std::vector<Index> col_idx;
    std::vector<double> values;

    CsrMatrix() = default;
    CsrMatrix(Index rows, Index cols) : nrows(rows), ncols(cols), row_ptr(rows + 1, 0) {}

    Index nnz() const noexcept { return static_cast<Index>(col_idx.size()); }

    /// Duplicates are summed; columns within each row end up ascending.
    static CsrMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> entries);
    static CsrMatrix from_dense(Index rows, Index cols, std::span<const double> a, double drop = 0.0);
    static CsrMatrix identity(Index n);

    /// Throws invalid-argument when the structure is inconsistent.
    void validate() const;
    void sort_rows();
    double at(Index i, Index j) const;
    std::vector<double> diagonal() const;

    /// y = A x.
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;
    CsrMatrix transpose() const;
    /// Row-major dense copy (tests and small direct solves).
    std::vector<double> to_dense() const;
};

/// C = A B.
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);

}  // namespace resim
