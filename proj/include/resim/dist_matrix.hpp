#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "resim/csr.hpp"
#include "resim/dist_vector.hpp"
#include "resim/index_map.hpp"
#include "resim/runtime.hpp"

namespace resim {

/// Global rows fetched from their owners: rows[k] = (global row, entries
/// sorted by global column).
struct FetchedRows {
    std::vector<Index> rows;
    std::vector<std::vector<std::pair<Index, double>>> entries;
};

/// Row-distributed sparse matrix. Before assembly each owned row is a list
/// of (global column, value) contributions; assembly sums duplicates, sorts
/// every row by global column, registers off-process columns as halo
/// entries (ascending global index) and builds the exchange plan.
class DistMatrix {
public:
    DistMatrix() = default;
    /// Square matrix whose columns are distributed like its rows.
    explicit DistMatrix(std::shared_ptr<const IndexMap> row_map);
    /// Rectangular matrix; col_map gives the distribution of the columns
    /// (any halo it carries is ignored).
    DistMatrix(std::shared_ptr<const IndexMap> row_map, std::shared_ptr<const IndexMap> col_map);

    void add_entry(Index global_row, Index global_col, double value);
    void add_row(Index global_row, std::span<const std::pair<Index, double>> entries);
    /// Collective.
    void assemble(Comm& comm);
    bool assembled() const noexcept { return assembled_; }

    const std::shared_ptr<const IndexMap>& row_map() const noexcept { return row_map_; }
    /// Column distribution plus halo (valid after assembly).
    const std::shared_ptr<const IndexMap>& col_map() const noexcept { return col_map_; }
    const CommPlan& plan() const;
    Index nlocal_rows() const noexcept { return row_map_->nlocal(); }
    Index nglobal_rows() const noexcept { return row_map_->nglobal(); }
    Index nglobal_cols() const noexcept { return col_base_->nglobal(); }

    /// Owned rows x (owned + halo) columns in local numbering; entries of a
    /// row are ordered by ascending global column.
    const CsrMatrix& local() const;
    CsrMatrix extract_local_csr() const { return local(); }
    /// Global column of each stored entry (parallel to local().col_idx).
    std::span<const Index> global_cols() const;

    /// y = alpha A x + beta y. x is read on its owned part; the halo is
    /// exchanged into an internal buffer.
    void spmv(Comm& comm, double alpha, const DistVector& x, double beta, DistVector& y) const;
    /// z = alpha A x + beta y.
    void spmv(Comm& comm, double alpha, const DistVector& x, double beta, const DistVector& y,
              DistVector& z) const;
    /// y = alpha A^T x + beta y, y distributed like the columns.
    void spmv_transpose(Comm& comm, double alpha, const DistVector& x, double beta, DistVector& y) const;

    /// Collective: every rank asks for an arbitrary sorted set of global
    /// rows and receives their entries.
    FetchedRows fetch_rows(Comm& comm, std::span<const Index> global_rows) const;

    /// Every rank receives the whole matrix in global numbering.
    CsrMatrix gather_global(Comm& comm) const;

    /// Diagonal of the owned rows (square matrices).
    std::vector<double> diagonal() const;

    /// Collective: distribute a replicated global CSR over row_map.
    static DistMatrix from_global_csr(Comm& comm, const CsrMatrix& a, std::shared_ptr<const IndexMap> row_map);

private:
    void require_assembled() const;
    void multiply_local(Comm& comm, double alpha, const DistVector& x, double beta, const DistVector* y,
                        DistVector& z) const;

    std::shared_ptr<const IndexMap> row_map_;
    std::shared_ptr<const IndexMap> col_base_;
    std::shared_ptr<const IndexMap> col_map_;
    std::vector<std::vector<std::pair<Index, double>>> rows_;
    bool assembled_ = false;
    CsrMatrix local_;
    std::vector<Index> gcols_;
    CommPlan plan_;
    mutable std::vector<double> work_;
};

}  // namespace resim
