#include "resim/ras.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace resim {

void RasParams::validate() const {
    if (overlap < 0) fail(Errc::invalid_argument, "RAS overlap must be >= 0");
    if (!(filter_tol >= 0.0)) fail(Errc::invalid_argument, "RAS filter tolerance must be >= 0");
    if (ilu.level < 0) fail(Errc::invalid_argument, "ILU(k) level must be >= 0");
    if (!(ilu.ilut_tol >= 0.0)) fail(Errc::invalid_argument, "ILUT tolerance must be >= 0");
}

RasPreconditioner::RasPreconditioner(Comm& comm, const DistMatrix& a, RasParams params)
    : params_(params), row_map_(a.row_map()) {
    params_.validate();
    if (!a.assembled()) fail(Errc::not_assembled, "RAS needs an assembled matrix");
    if (a.nglobal_rows() != a.nglobal_cols()) fail(Errc::invalid_argument, "RAS needs a square matrix");

    const auto& rows = *row_map_;
    const auto& csr = a.local();
    const auto gcols = a.global_cols();

    // Grow the subdomain one layer of graph neighbors at a time.
    std::map<Index, std::vector<std::pair<Index, double>>> outer;
    std::vector<Index> frontier_cols;
    for (Index k = 0; k < csr.nnz(); ++k) {
        if (!rows.owns(gcols[k])) frontier_cols.push_back(gcols[k]);
    }
    for (int layer = 0; layer < params_.overlap; ++layer) {
        std::sort(frontier_cols.begin(), frontier_cols.end());
        frontier_cols.erase(std::unique(frontier_cols.begin(), frontier_cols.end()), frontier_cols.end());
        std::vector<Index> wanted;
        for (Index g : frontier_cols) {
            if (!rows.owns(g) && !outer.count(g)) wanted.push_back(g);
        }
        auto got = a.fetch_rows(comm, wanted);
        frontier_cols.clear();
        for (std::size_t r = 0; r < got.rows.size(); ++r) {
            for (const auto& e : got.entries[r]) frontier_cols.push_back(e.first);
            outer.emplace(got.rows[r], std::move(got.entries[r]));
        }
    }
    std::vector<Index> halo;
    halo.reserve(outer.size());
    for (const auto& kv : outer) halo.push_back(kv.first);
    ext_ = row_map_->with_halo(std::move(halo));
    plan_ = CommPlan::build(comm, *ext_);

    const Index n = ext_->ntlocal();
    std::vector<Triplet> trip;
    auto add_row = [&](Index li, auto&& entries) {
        double diag = 0.0;
        for (const auto& [g, v] : entries) {
            if (g == ext_->local_to_global(li)) diag += v;
        }
        const double cut = params_.filter_tol * std::abs(diag);
        for (const auto& [g, v] : entries) {
            auto lj = ext_->global_to_local(g);
            if (!lj) continue;
            if (*lj != li && std::abs(v) < cut) continue;
            trip.push_back({li, *lj, v});
        }
    };
    std::vector<std::pair<Index, double>> row;
    for (Index i = 0; i < csr.nrows; ++i) {
        row.clear();
        for (Index k = csr.row_ptr[i]; k < csr.row_ptr[i + 1]; ++k) row.emplace_back(gcols[k], csr.values[k]);
        add_row(i, row);
    }
    Index li = csr.nrows;
    for (const auto& kv : outer) add_row(li++, kv.second);
    local_ = CsrMatrix::from_triplets(n, n, std::move(trip));

    try {
        factors_ = ilu_factor(local_, params_.ilu);
    } catch (const Error& e) {
        fail(e.code(), "rank " + std::to_string(comm.rank()) + ": " + e.what());
    }
}

void RasPreconditioner::apply(Comm& comm, const DistVector& r, DistVector& z) const {
    if (!r.map() || !r.map()->same_distribution(*row_map_)) fail(Errc::map_mismatch, "RAS input map mismatch");
    check_same_map(r, z);
    std::vector<double> buf(ext_->ntlocal());
    auto owned = r.owned();
    std::copy(owned.begin(), owned.end(), buf.begin());
    plan_.exchange(comm, owned, std::span<double>(buf).subspan(owned.size()));
    lu_solve(factors_, buf, buf);
    auto out = z.owned();
    std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(out.size()), out.begin());
}

}  // namespace resim
