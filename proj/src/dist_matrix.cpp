#include "resim/dist_matrix.hpp"

#include <algorithm>
#include <string>

namespace resim {

DistMatrix::DistMatrix(std::shared_ptr<const IndexMap> row_map) : DistMatrix(row_map, row_map) {}

DistMatrix::DistMatrix(std::shared_ptr<const IndexMap> row_map, std::shared_ptr<const IndexMap> col_map)
    : row_map_(std::move(row_map)), rows_(row_map_->nlocal()) {
    if (row_map_->rank() != col_map->rank() || row_map_->nprocs() != col_map->nprocs()) {
        fail(Errc::map_mismatch, "row and column maps belong to different ranks");
    }
    col_base_ = col_map->halo_globals().empty()
                    ? col_map
                    : std::make_shared<const IndexMap>(col_map->rank(),
                                                       std::vector<Index>(col_map->offsets().begin(),
                                                                          col_map->offsets().end()));
}

void DistMatrix::add_entry(Index global_row, Index global_col, double value) {
    if (assembled_) fail(Errc::already_assembled, "matrix is already assembled");
    if (!row_map_->owns(global_row)) {
        fail(Errc::wrong_owner, "rank " + std::to_string(row_map_->rank()) + " does not own row " +
                                    std::to_string(global_row));
    }
    if (global_col < 0 || global_col >= col_base_->nglobal()) {
        fail(Errc::invalid_argument, "column " + std::to_string(global_col) + " out of range");
    }
    rows_[global_row - row_map_->first()].emplace_back(global_col, value);
}

void DistMatrix::add_row(Index global_row, std::span<const std::pair<Index, double>> entries) {
    for (const auto& [c, v] : entries) add_entry(global_row, c, v);
}

void DistMatrix::assemble(Comm& comm) {
    if (assembled_) fail(Errc::already_assembled, "matrix is already assembled");
    std::vector<Index> halo;
    for (auto& row : rows_) {
        std::stable_sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t out = 0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (out > 0 && row[out - 1].first == row[k].first) {
                row[out - 1].second += row[k].second;
            } else {
                row[out++] = row[k];
            }
        }
        row.resize(out);
        for (const auto& e : row) {
            if (!col_base_->owns(e.first)) halo.push_back(e.first);
        }
    }
    std::sort(halo.begin(), halo.end());
    halo.erase(std::unique(halo.begin(), halo.end()), halo.end());
    col_map_ = col_base_->with_halo(std::move(halo));
    plan_ = CommPlan::build(comm, *col_map_);

    local_ = CsrMatrix(row_map_->nlocal(), col_map_->ntlocal());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (const auto& [gc, v] : rows_[i]) {
            local_.col_idx.push_back(*col_map_->global_to_local(gc));
            local_.values.push_back(v);
            gcols_.push_back(gc);
        }
        local_.row_ptr[i + 1] = local_.nnz();
    }
    rows_.clear();
    rows_.shrink_to_fit();
    work_.assign(col_map_->ntlocal(), 0.0);
    assembled_ = true;
}

void DistMatrix::require_assembled() const {
    if (!assembled_) fail(Errc::not_assembled, "matrix is not assembled");
}

const CommPlan& DistMatrix::plan() const {
    require_assembled();
    return plan_;
}

const CsrMatrix& DistMatrix::local() const {
    require_assembled();
    return local_;
}

std::span<const Index> DistMatrix::global_cols() const {
    require_assembled();
    return gcols_;
}

void DistMatrix::multiply_local(Comm& comm, double alpha, const DistVector& x, double beta, const DistVector* y,
                                DistVector& z) const {
    require_assembled();
    if (!x.map() || !x.map()->same_distribution(*col_base_)) {
        fail(Errc::map_mismatch, "spmv input does not match the column distribution");
    }
    if (!z.map() || !z.map()->same_distribution(*row_map_)) {
        fail(Errc::map_mismatch, "spmv output does not match the row distribution");
    }
    if (y != nullptr) check_same_map(*y, z);
    auto xs = x.owned();
    std::copy(xs.begin(), xs.end(), work_.begin());
    plan_.exchange(comm, std::span<const double>(work_.data(), xs.size()),
                   std::span<double>(work_).subspan(xs.size()));
    auto zs = z.owned();
    const auto* ys = y != nullptr ? y->owned().data() : nullptr;
    for (Index i = 0; i < local_.nrows; ++i) {
        double s = 0.0;
        for (Index k = local_.row_ptr[i]; k < local_.row_ptr[i + 1]; ++k) s += local_.values[k] * work_[local_.col_idx[k]];
        zs[i] = (beta == 0.0 || ys == nullptr) ? alpha * s : alpha * s + beta * ys[i];
    }
}

void DistMatrix::spmv(Comm& comm, double alpha, const DistVector& x, double beta, DistVector& y) const {
    if (beta == 0.0) {
        multiply_local(comm, alpha, x, 0.0, nullptr, y);
        return;
    }
    // y is read and written row by row, so passing it as both is safe.
    multiply_local(comm, alpha, x, beta, &y, y);
}

void DistMatrix::spmv(Comm& comm, double alpha, const DistVector& x, double beta, const DistVector& y,
                      DistVector& z) const {
    multiply_local(comm, alpha, x, beta, &y, z);
}

void DistMatrix::spmv_transpose(Comm& comm, double alpha, const DistVector& x, double beta, DistVector& y) const {
    require_assembled();
    if (!x.map() || !x.map()->same_distribution(*row_map_)) fail(Errc::map_mismatch, "transpose input mismatch");
    if (!y.map() || !y.map()->same_distribution(*col_base_)) fail(Errc::map_mismatch, "transpose output mismatch");
    std::fill(work_.begin(), work_.end(), 0.0);
    auto xs = x.owned();
    for (Index i = 0; i < local_.nrows; ++i) {
        for (Index k = local_.row_ptr[i]; k < local_.row_ptr[i + 1]; ++k) {
            work_[local_.col_idx[k]] += local_.values[k] * xs[i];
        }
    }
    const auto n = static_cast<std::size_t>(col_base_->nlocal());
    plan_.reverse_add(comm, std::span<const double>(work_).subspan(n), std::span<double>(work_.data(), n));
    auto ys = y.owned();
    for (std::size_t j = 0; j < n; ++j) ys[j] = beta == 0.0 ? alpha * work_[j] : alpha * work_[j] + beta * ys[j];
}

FetchedRows DistMatrix::fetch_rows(Comm& comm, std::span<const Index> global_rows) const {
    require_assembled();
    const int np = comm.size();
    std::vector<std::vector<Index>> requests(np);
    for (Index g : global_rows) requests[row_map_->owner(g)].push_back(g);
    auto incoming = comm.alltoallv(requests);

    std::vector<std::vector<Index>> structure(np);
    std::vector<std::vector<double>> values(np);
    for (int p = 0; p < np; ++p) {
        for (Index g : incoming[p]) {
            if (!row_map_->owns(g)) fail(Errc::plan_mismatch, "row request sent to the wrong owner");
            const Index i = g - row_map_->first();
            structure[p].push_back(g);
            structure[p].push_back(local_.row_ptr[i + 1] - local_.row_ptr[i]);
            for (Index k = local_.row_ptr[i]; k < local_.row_ptr[i + 1]; ++k) {
                structure[p].push_back(gcols_[k]);
                values[p].push_back(local_.values[k]);
            }
        }
    }
    auto got_structure = comm.alltoallv(structure);
    auto got_values = comm.alltoallv(values);

    FetchedRows out;
    std::vector<std::pair<Index, std::vector<std::pair<Index, double>>>> all;
    for (int p = 0; p < np; ++p) {
        std::size_t at = 0;
        std::size_t vat = 0;
        const auto& s = got_structure[p];
        while (at < s.size()) {
            const Index g = s[at];
            const Index n = s[at + 1];
            at += 2;
            std::vector<std::pair<Index, double>> row(n);
            for (Index k = 0; k < n; ++k) row[k] = {s[at + k], got_values[p][vat + k]};
            at += n;
            vat += n;
            all.emplace_back(g, std::move(row));
        }
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [g, row] : all) {
        out.rows.push_back(g);
        out.entries.push_back(std::move(row));
    }
    return out;
}

CsrMatrix DistMatrix::gather_global(Comm& comm) const {
    require_assembled();
    std::vector<Index> structure;
    for (Index i = 0; i < local_.nrows; ++i) {
        structure.push_back(local_.row_ptr[i + 1] - local_.row_ptr[i]);
        for (Index k = local_.row_ptr[i]; k < local_.row_ptr[i + 1]; ++k) structure.push_back(gcols_[k]);
    }
    auto s = comm.allgatherv<Index>(structure);
    auto v = comm.allgatherv<double>(local_.values);
    CsrMatrix g(row_map_->nglobal(), col_base_->nglobal());
    Index row = 0;
    for (int p = 0; p < comm.size(); ++p) {
        std::size_t at = 0;
        std::size_t vat = 0;
        while (at < s[p].size()) {
            const Index n = s[p][at++];
            for (Index k = 0; k < n; ++k) {
                g.col_idx.push_back(s[p][at++]);
                g.values.push_back(v[p][vat++]);
            }
            g.row_ptr[++row] = g.nnz();
        }
    }
    return g;
}

std::vector<double> DistMatrix::diagonal() const {
    require_assembled();
    std::vector<double> d(local_.nrows, 0.0);
    for (Index i = 0; i < local_.nrows; ++i) {
        const Index g = row_map_->first() + i;
        for (Index k = local_.row_ptr[i]; k < local_.row_ptr[i + 1]; ++k) {
            if (gcols_[k] == g) d[i] = local_.values[k];
        }
    }
    return d;
}

DistMatrix DistMatrix::from_global_csr(Comm& comm, const CsrMatrix& a, std::shared_ptr<const IndexMap> row_map) {
    if (a.nrows != row_map->nglobal() || a.ncols != row_map->nglobal()) {
        fail(Errc::map_mismatch, "global matrix does not match the row map");
    }
    DistMatrix m(row_map);
    for (Index g = row_map->first(); g < row_map->first() + row_map->nlocal(); ++g) {
        for (Index k = a.row_ptr[g]; k < a.row_ptr[g + 1]; ++k) m.add_entry(g, a.col_idx[k], a.values[k]);
    }
    m.assemble(comm);
    return m;
}

}  // namespace resim
