#include "resim/csr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace resim {

CsrMatrix CsrMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> entries) {
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            fail(Errc::invalid_argument, "triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                             ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& t = entries[k];
        if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
            m.values.back() += t.value;
            continue;
        }
        m.col_idx.push_back(t.col);
        m.values.push_back(t.value);
        ++m.row_ptr[t.row + 1];
    }
    std::partial_sum(m.row_ptr.begin(), m.row_ptr.end(), m.row_ptr.begin());
    return m;
}

CsrMatrix CsrMatrix::from_dense(Index rows, Index cols, std::span<const double> a, double drop) {
    if (static_cast<Index>(a.size()) != rows * cols) fail(Errc::invalid_argument, "dense size mismatch");
    CsrMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            const double v = a[i * cols + j];
            if (v != 0.0 && std::abs(v) > drop) {
                m.col_idx.push_back(j);
                m.values.push_back(v);
            }
        }
        m.row_ptr[i + 1] = m.nnz();
    }
    return m;
}

CsrMatrix CsrMatrix::identity(Index n) {
    CsrMatrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        m.col_idx.push_back(i);
        m.values.push_back(1.0);
        m.row_ptr[i + 1] = i + 1;
    }
    return m;
}

void CsrMatrix::validate() const {
    if (nrows < 0 || ncols < 0) fail(Errc::invalid_argument, "negative CSR dimensions");
    if (static_cast<Index>(row_ptr.size()) != nrows + 1 || row_ptr.front() != 0) {
        fail(Errc::invalid_argument, "CSR row_ptr has wrong length or start");
    }
    if (row_ptr.back() != nnz() || values.size() != col_idx.size()) {
        fail(Errc::invalid_argument, "CSR row_ptr[nrows] must equal the number of nonzeros");
    }
    for (Index i = 0; i < nrows; ++i) {
        if (row_ptr[i + 1] < row_ptr[i]) fail(Errc::invalid_argument, "CSR row_ptr is not monotone");
    }
    for (Index c : col_idx) {
        if (c < 0 || c >= ncols) fail(Errc::invalid_argument, "CSR column index out of range");
    }
}

void CsrMatrix::sort_rows() {
    std::vector<std::pair<Index, double>> row;
    for (Index i = 0; i < nrows; ++i) {
        row.clear();
        for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) row.emplace_back(col_idx[k], values[k]);
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            col_idx[k] = row[k - row_ptr[i]].first;
            values[k] = row[k - row_ptr[i]].second;
        }
    }
}

double CsrMatrix::at(Index i, Index j) const {
    double v = 0.0;
    for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        if (col_idx[k] == j) v += values[k];
    }
    return v;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(std::min(nrows, ncols), 0.0);
    for (Index i = 0; i < static_cast<Index>(d.size()); ++i) d[i] = at(i, i);
    return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (Index i = 0; i < nrows; ++i) {
        double s = 0.0;
        for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(nrows);
    multiply(x, y);
    return y;
}

CsrMatrix CsrMatrix::transpose() const {
    CsrMatrix t(ncols, nrows);
    for (Index c : col_idx) ++t.row_ptr[c + 1];
    std::partial_sum(t.row_ptr.begin(), t.row_ptr.end(), t.row_ptr.begin());
    t.col_idx.resize(nnz());
    t.values.resize(nnz());
    std::vector<Index> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (Index i = 0; i < nrows; ++i) {
        for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const Index at = next[col_idx[k]]++;
            t.col_idx[at] = i;
            t.values[at] = values[k];
        }
    }
    return t;
}

std::vector<double> CsrMatrix::to_dense() const {
    std::vector<double> a(static_cast<std::size_t>(nrows * ncols), 0.0);
    for (Index i = 0; i < nrows; ++i) {
        for (Index k = row_ptr[i]; k < row_ptr[i + 1]; ++k) a[i * ncols + col_idx[k]] += values[k];
    }
    return a;
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.ncols != b.nrows) fail(Errc::invalid_argument, "CSR product dimension mismatch");
    CsrMatrix c(a.nrows, b.ncols);
    std::vector<double> acc(b.ncols, 0.0);
    std::vector<Index> mark(b.ncols, -1);
    std::vector<Index> cols;
    for (Index i = 0; i < a.nrows; ++i) {
        cols.clear();
        for (Index ka = a.row_ptr[i]; ka < a.row_ptr[i + 1]; ++ka) {
            const Index j = a.col_idx[ka];
            for (Index kb = b.row_ptr[j]; kb < b.row_ptr[j + 1]; ++kb) {
                const Index col = b.col_idx[kb];
                if (mark[col] != i) {
                    mark[col] = i;
                    acc[col] = 0.0;
                    cols.push_back(col);
                }
                acc[col] += a.values[ka] * b.values[kb];
            }
        }
        std::sort(cols.begin(), cols.end());
        for (Index col : cols) {
            c.col_idx.push_back(col);
            c.values.push_back(acc[col]);
        }
        c.row_ptr[i + 1] = c.nnz();
    }
    return c;
}

}  // namespace resim
