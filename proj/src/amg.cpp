#include "resim/amg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace resim {

namespace {

struct Strength {
    std::vector<std::vector<Index>> deps;  // S_i: owned rows that i strongly depends on
    std::vector<char> rowsum_weak;
};

Strength strength_graph(const DistMatrix& a, double theta, double max_row_sum) {
    const auto& m = a.local();
    const Index n = m.nrows;
    Strength s{std::vector<std::vector<Index>>(n), std::vector<char>(n, 0)};
    for (Index i = 0; i < n; ++i) {
        double diag = 0.0, sum = 0.0, maxneg = 0.0;
        for (Index k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            sum += m.values[k];
            if (m.col_idx[k] == i) diag += m.values[k];
            else maxneg = std::max(maxneg, -m.values[k]);
        }
        if (max_row_sum < 1.0 && std::abs(sum) > max_row_sum * std::abs(diag)) {
            s.rowsum_weak[i] = 1;
            continue;
        }
        if (maxneg <= 0.0) continue;
        for (Index k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            const Index j = m.col_idx[k];
            if (j != i && j < n && -m.values[k] >= theta * maxneg) s.deps[i].push_back(j);
        }
    }
    return s;
}

std::shared_ptr<const IndexMap> base_map(const IndexMap& m) {
    return std::make_shared<const IndexMap>(m.rank(), std::vector<Index>(m.offsets().begin(), m.offsets().end()));
}

void check_square(const DistMatrix& a, const char* who) {
    if (!a.assembled()) fail(Errc::not_assembled, std::string(who) + " needs an assembled matrix");
    if (a.nglobal_rows() != a.nglobal_cols()) fail(Errc::invalid_argument, std::string(who) + " needs a square matrix");
}

}  // namespace

void AmgParams::validate() const {
    if (max_levels < 1) fail(Errc::invalid_argument, "AMG needs at least one level");
    if (!(strength >= 0.0 && strength <= 1.0)) fail(Errc::invalid_argument, "AMG strength must lie in [0, 1]");
    if (!(max_row_sum > 0.0)) fail(Errc::invalid_argument, "AMG max_row_sum must be > 0");
    if (!(trunc_tol >= 0.0)) fail(Errc::invalid_argument, "AMG trunc_tol must be >= 0");
    if (sweeps < 0 || maxit < 1) fail(Errc::invalid_argument, "AMG sweeps must be >= 0 and maxit >= 1");
}

std::vector<PointKind> rs_coarsen(const DistMatrix& a, double strength, double max_row_sum) {
    check_square(a, "AMG coarsening");
    const auto s = strength_graph(a, strength, max_row_sum);
    const Index n = static_cast<Index>(s.deps.size());
    std::vector<std::vector<Index>> infl(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j : s.deps[i]) infl[j].push_back(i);
    }

    enum : char { undecided, coarse, fine };
    std::vector<char> state(n, undecided);
    std::vector<Index> lambda(n);
    std::set<std::pair<Index, Index>> pool;  // (-lambda, i)
    for (Index i = 0; i < n; ++i) {
        if (s.rowsum_weak[i]) {
            state[i] = fine;
            continue;
        }
        lambda[i] = static_cast<Index>(infl[i].size());
        pool.insert({-lambda[i], i});
    }
    auto bump = [&](Index k, Index delta) {
        pool.erase({-lambda[k], k});
        lambda[k] += delta;
        pool.insert({-lambda[k], k});
    };
    while (!pool.empty()) {
        const Index i = pool.begin()->second;
        pool.erase(pool.begin());
        state[i] = coarse;
        for (Index j : infl[i]) {
            if (state[j] != undecided) continue;
            pool.erase({-lambda[j], j});
            state[j] = fine;
            for (Index k : s.deps[j]) {
                if (state[k] == undecided) bump(k, 1);
            }
        }
        for (Index k : s.deps[i]) {
            if (state[k] == undecided) bump(k, -1);
        }
    }

    // Second pass: strongly coupled F points must share a strong C point.
    std::vector<Index> mark(n, -1);
    for (Index i = 0; i < n; ++i) {
        if (state[i] != fine || s.rowsum_weak[i]) continue;
        for (Index k : s.deps[i]) {
            if (state[k] == coarse) mark[k] = i;
        }
        Index tentative = -1;
        for (Index j : s.deps[i]) {
            if (state[j] != fine || s.rowsum_weak[j]) continue;
            bool shared = false;
            for (Index k : s.deps[j]) {
                if (mark[k] == i) {
                    shared = true;
                    break;
                }
            }
            if (shared) continue;
            if (tentative >= 0) {
                state[tentative] = fine;
                state[i] = coarse;
                break;
            }
            tentative = j;
            state[j] = coarse;
            mark[j] = i;
        }
    }

    std::vector<PointKind> split(n);
    for (Index i = 0; i < n; ++i) split[i] = state[i] == coarse ? PointKind::coarse : PointKind::fine;
    return split;
}

DistMatrix direct_interpolation(Comm& comm, const DistMatrix& a, const std::vector<PointKind>& split,
                                double strength, double max_row_sum, double trunc_tol) {
    check_square(a, "AMG interpolation");
    const auto& m = a.local();
    const Index n = m.nrows;
    if (static_cast<Index>(split.size()) != n) fail(Errc::invalid_argument, "splitting does not match the matrix");
    const auto s = strength_graph(a, strength, max_row_sum);

    std::vector<Index> cnum(n, -1);
    Index nc = 0;
    for (Index i = 0; i < n; ++i) {
        if (split[i] == PointKind::coarse) cnum[i] = nc++;
    }
    auto cmap = IndexMap::from_local_size(comm, nc);
    const Index cfirst = cmap->first();
    const Index first = a.row_map()->first();
    DistMatrix p(a.row_map(), cmap);

    std::vector<char> in_c(n, 0);
    std::vector<std::pair<Index, double>> w;
    for (Index i = 0; i < n; ++i) {
        if (split[i] == PointKind::coarse) {
            p.add_entry(first + i, cfirst + cnum[i], 1.0);
            continue;
        }
        if (s.rowsum_weak[i]) continue;
        for (Index j : s.deps[i]) {
            if (split[j] == PointKind::coarse) in_c[j] = 1;
        }
        double diag = 0.0, sum_neg = 0.0, sum_pos = 0.0, c_neg = 0.0;
        for (Index k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            const Index j = m.col_idx[k];
            const double v = m.values[k];
            if (j == i) {
                diag += v;
                continue;
            }
            (v < 0.0 ? sum_neg : sum_pos) += v;
            if (j < n && in_c[j]) c_neg += v;  // strong couplings are negative
        }
        const double d = diag + sum_pos;
        w.clear();
        if (c_neg != 0.0 && d != 0.0) {
            const double alpha = sum_neg / c_neg;
            for (Index k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
                const Index j = m.col_idx[k];
                if (j < n && j != i && in_c[j]) w.emplace_back(cnum[j], -alpha * m.values[k] / d);
            }
        }
        for (Index j : s.deps[i]) in_c[j] = 0;

        if (trunc_tol > 0.0 && w.size() > 1) {
            double maxw = 0.0, total = 0.0;
            for (const auto& e : w) {
                maxw = std::max(maxw, std::abs(e.second));
                total += e.second;
            }
            std::vector<std::pair<Index, double>> kept;
            double kept_sum = 0.0;
            for (const auto& e : w) {
                if (std::abs(e.second) >= trunc_tol * maxw) {
                    kept.push_back(e);
                    kept_sum += e.second;
                }
            }
            if (kept.size() < w.size() && kept_sum != 0.0) {
                for (auto& e : kept) e.second *= total / kept_sum;
                w = std::move(kept);
            }
        }
        for (const auto& [c, v] : w) p.add_entry(first + i, cfirst + c, v);
    }
    p.assemble(comm);
    return p;
}

DistMatrix galerkin_product(Comm& comm, const DistMatrix& a, const DistMatrix& p) {
    check_square(a, "Galerkin product");
    if (!p.assembled()) fail(Errc::not_assembled, "interpolation is not assembled");
    if (!p.row_map()->same_distribution(*a.row_map())) fail(Errc::map_mismatch, "P rows do not match A");

    const auto& am = a.local();
    const auto agc = a.global_cols();
    const auto& pm = p.local();
    const auto pgc = p.global_cols();
    const Index n = am.nrows;
    auto fetched = p.fetch_rows(comm, a.col_map()->halo_globals());
    std::map<Index, std::size_t> fetched_at;
    for (std::size_t k = 0; k < fetched.rows.size(); ++k) fetched_at[fetched.rows[k]] = k;

    const auto cmap = base_map(*p.col_map());
    const int np = comm.size();
    std::vector<std::vector<Index>> send_idx(np);
    std::vector<std::vector<double>> send_val(np);
    std::vector<std::pair<Index, double>> own;  // flattened rows of (A P)_i
    std::map<Index, double> ap;
    for (Index i = 0; i < n; ++i) {
        ap.clear();
        for (Index k = am.row_ptr[i]; k < am.row_ptr[i + 1]; ++k) {
            const Index j = am.col_idx[k];
            const double aij = am.values[k];
            if (j < n) {
                for (Index q = pm.row_ptr[j]; q < pm.row_ptr[j + 1]; ++q) ap[pgc[q]] += aij * pm.values[q];
            } else {
                for (const auto& [c, v] : fetched.entries[fetched_at.at(agc[k])]) ap[c] += aij * v;
            }
        }
        for (Index q = pm.row_ptr[i]; q < pm.row_ptr[i + 1]; ++q) {
            const Index c = pgc[q];
            const double pic = pm.values[q];
            const int owner = cmap->owner(c);
            for (const auto& [col, v] : ap) {
                send_idx[owner].push_back(c);
                send_idx[owner].push_back(col);
                send_val[owner].push_back(pic * v);
            }
        }
    }
    auto got_idx = comm.alltoallv(send_idx);
    auto got_val = comm.alltoallv(send_val);
    DistMatrix c(cmap);
    for (int r = 0; r < np; ++r) {
        for (std::size_t k = 0; k < got_val[r].size(); ++k) {
            c.add_entry(got_idx[r][2 * k], got_idx[r][2 * k + 1], got_val[r][k]);
        }
    }
    c.assemble(comm);
    return c;
}

void hybrid_gauss_seidel(Comm& comm, const DistMatrix& a, const DistVector& b, DistVector& x, int sweeps,
                         bool symmetric) {
    check_square(a, "Gauss-Seidel");
    check_same_map(b, x);
    const auto& m = a.local();
    const Index n = m.nrows;
    std::vector<double> xl(a.col_map()->ntlocal(), 0.0);
    auto xo = x.owned();
    std::copy(xo.begin(), xo.end(), xl.begin());
    auto bo = b.owned();
    auto relax = [&](Index i) {
        double s = bo[i], d = 0.0;
        for (Index k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            const Index j = m.col_idx[k];
            if (j == i) d += m.values[k];
            else s -= m.values[k] * xl[j];
        }
        if (d != 0.0) xl[i] = s / d;
    };
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        a.plan().exchange(comm, std::span<const double>(xl.data(), n), std::span<double>(xl).subspan(n));
        for (Index i = 0; i < n; ++i) relax(i);
        if (symmetric) {
            for (Index i = n - 1; i >= 0; --i) relax(i);
        }
    }
    std::copy(xl.begin(), xl.begin() + n, xo.begin());
}

AmgPreconditioner::AmgPreconditioner(Comm& comm, const DistMatrix& a, AmgParams params) : params_(params) {
    params_.validate();
    check_square(a, "AMG");
    levels_.push_back({a, DistMatrix(), {}});
    while (static_cast<int>(levels_.size()) < params_.max_levels) {
        const DistMatrix& fine = levels_.back().A;
        const Index nf = fine.nglobal_rows();
        if (nf <= params_.coarse_size) break;
        auto split = rs_coarsen(fine, params_.strength, params_.max_row_sum);
        const Index nc_local = std::count(split.begin(), split.end(), PointKind::coarse);
        const Index nc = comm.allreduce_sum(nc_local);
        if (nc == 0 || nc >= nf) break;
        auto p = direct_interpolation(comm, fine, split, params_.strength, params_.max_row_sum, params_.trunc_tol);
        auto coarse = galerkin_product(comm, fine, p);
        levels_.back().P = std::move(p);
        levels_.back().split = std::move(split);
        levels_.push_back({std::move(coarse), DistMatrix(), {}});
    }
    const DistMatrix& last = levels_.back().A;
    direct_ = last.nglobal_rows() <= params_.max_direct;
    if (direct_) coarse_lu_ = DenseLu(last.gather_global(comm));
}

void AmgPreconditioner::cycle(Comm& comm, int l, const DistVector& b, DistVector& x) const {
    const AmgLevel& lev = levels_[l];
    if (l + 1 == nlevels()) {
        if (!direct_) {
            hybrid_gauss_seidel(comm, lev.A, b, x, std::max(params_.sweeps, 1), true);
            return;
        }
        auto g = gather_all(comm, b);
        coarse_lu_.solve(g);
        const Index first = x.map()->first();
        auto out = x.owned();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[first + i];
        return;
    }
    hybrid_gauss_seidel(comm, lev.A, b, x, params_.sweeps, false);
    DistVector r(b.map());
    lev.A.spmv(comm, -1.0, x, 1.0, b, r);
    const auto& cmap = levels_[l + 1].A.row_map();
    DistVector bc(cmap), xc(cmap);
    lev.P.spmv_transpose(comm, 1.0, r, 0.0, bc);
    cycle(comm, l + 1, bc, xc);
    lev.P.spmv(comm, 1.0, xc, 1.0, x);
    hybrid_gauss_seidel(comm, lev.A, b, x, params_.sweeps, false);
}

void AmgPreconditioner::vcycle(Comm& comm, const DistVector& b, DistVector& x) const {
    if (!b.map() || !b.map()->same_distribution(*levels_[0].A.row_map())) {
        fail(Errc::map_mismatch, "AMG right-hand side map mismatch");
    }
    check_same_map(b, x);
    cycle(comm, 0, b, x);
}

void AmgPreconditioner::apply(Comm& comm, const DistVector& r, DistVector& z) const {
    z.fill(0.0);
    for (int it = 0; it < params_.maxit; ++it) vcycle(comm, r, z);
}

}  // namespace resim
