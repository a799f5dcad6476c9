#include "resim/cpr.hpp"

#include <string>

#include "resim/dense_lu.hpp"

namespace resim {

void BlockLayout::validate() const {
    if (unknowns < 1) fail(Errc::invalid_layout, "a cell needs at least one unknown");
    if (pressure < 0 || pressure >= unknowns) fail(Errc::invalid_layout, "layout has no pressure unknown");
}

void BlockLayout::validate(const IndexMap& rows) const {
    validate();
    for (Index off : rows.offsets()) {
        if (off % unknowns != 0) fail(Errc::invalid_layout, "row distribution splits the unknowns of a cell");
    }
}

std::string_view to_string(CprVariant v) noexcept {
    switch (v) {
        case CprVariant::fp: return "fp";
        case CprVariant::pf: return "pf";
        case CprVariant::fpf: return "fpf";
        case CprVariant::ffpf: return "ffpf";
    }
    return "?";
}

namespace {

// D^{-1} A for the per-cell diagonal blocks D.
DistMatrix decoupled(Comm& comm, const DistMatrix& a, const BlockLayout& lay, std::vector<double>& dinv) {
    const auto& m = a.local();
    const auto gc = a.global_cols();
    const int nu = lay.unknowns;
    const Index first = a.row_map()->first();
    const Index ncell = m.nrows / nu;
    dinv.assign(static_cast<std::size_t>(ncell) * nu * nu, 0.0);
    DistMatrix out(a.row_map());
    for (Index c = 0; c < ncell; ++c) {
        const Index r0 = first + c * nu;
        std::vector<double> d(nu * nu, 0.0);
        for (int u = 0; u < nu; ++u) {
            const Index i = c * nu + u;
            for (Index k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
                if (gc[k] >= r0 && gc[k] < r0 + nu) d[u * nu + (gc[k] - r0)] += m.values[k];
            }
        }
        DenseLu lu(nu, d);
        double* inv = &dinv[static_cast<std::size_t>(c) * nu * nu];
        for (int col = 0; col < nu; ++col) {
            std::vector<double> e(nu, 0.0);
            e[col] = 1.0;
            lu.solve(e);
            for (int r = 0; r < nu; ++r) inv[r * nu + col] = e[r];
        }
        for (int r = 0; r < nu; ++r) {
            for (int u = 0; u < nu; ++u) {
                const double w = inv[r * nu + u];
                if (w == 0.0) continue;
                const Index i = c * nu + u;
                for (Index k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) out.add_entry(r0 + r, gc[k], w * m.values[k]);
            }
        }
    }
    out.assemble(comm);
    return out;
}

}  // namespace

CprPreconditioner::CprPreconditioner(Comm& comm, const DistMatrix& a, BlockLayout layout, CprVariant variant,
                                     CprParams params, CprStages stages)
    : layout_(layout), variant_(variant) {
    if (!a.assembled()) fail(Errc::not_assembled, "CPR needs an assembled matrix");
    if (a.nglobal_rows() != a.nglobal_cols()) fail(Errc::invalid_argument, "CPR needs a square matrix");
    layout_.validate(*a.row_map());
    a_ = params.decouple ? decoupled(comm, a, layout_, dinv_) : a;

    const auto& rows = *a_.row_map();
    std::vector<Index> poff;
    for (Index off : rows.offsets()) poff.push_back(off / layout_.unknowns);
    pmap_ = std::make_shared<const IndexMap>(rows.rank(), std::move(poff));
    app_ = DistMatrix(pmap_);
    const auto& m = a_.local();
    const auto gc = a_.global_cols();
    for (Index i = 0; i < m.nrows; ++i) {
        const Index g = rows.first() + i;
        if (!layout_.is_pressure(g)) continue;
        for (Index k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            if (layout_.is_pressure(gc[k])) app_.add_entry(layout_.cell(g), layout_.cell(gc[k]), m.values[k]);
        }
    }
    app_.assemble(comm);

    full_ = stages.full ? stages.full(comm, a_) : std::make_unique<RasPreconditioner>(comm, a_, params.ras);
    pres_ = stages.pressure ? stages.pressure(comm, app_) : std::make_unique<AmgPreconditioner>(comm, app_, params.amg);
}

std::string CprPreconditioner::name() const { return "cpr-" + std::string(to_string(variant_)); }

void CprPreconditioner::restrict_pressure(const DistVector& x, DistVector& p) const {
    auto xs = x.owned();
    auto ps = p.owned();
    for (std::size_t c = 0; c < ps.size(); ++c) ps[c] = xs[c * layout_.unknowns + layout_.pressure];
}

void CprPreconditioner::prolong_pressure(const DistVector& p, DistVector& x) const {
    auto xs = x.owned();
    auto ps = p.owned();
    std::fill(xs.begin(), xs.end(), 0.0);
    for (std::size_t c = 0; c < ps.size(); ++c) xs[c * layout_.unknowns + layout_.pressure] = ps[c];
}

void CprPreconditioner::scale_rhs(const DistVector& f, DistVector& out) const {
    if (dinv_.empty()) {
        copy(f, out);
        return;
    }
    const int nu = layout_.unknowns;
    auto fs = f.owned();
    auto os = out.owned();
    for (std::size_t c = 0; c * nu < fs.size(); ++c) {
        const double* inv = &dinv_[c * nu * nu];
        for (int r = 0; r < nu; ++r) {
            double s = 0.0;
            for (int u = 0; u < nu; ++u) s += inv[r * nu + u] * fs[c * nu + u];
            os[c * nu + r] = s;
        }
    }
}

void CprPreconditioner::apply(Comm& comm, const DistVector& f_in, DistVector& x) const {
    if (!f_in.map() || !f_in.map()->same_distribution(*a_.row_map())) fail(Errc::map_mismatch, "CPR input map mismatch");
    check_same_map(f_in, x);
    const auto& map = f_in.map();
    DistVector f(map), r(map), dx(map), pr(pmap_), px(pmap_);
    scale_rhs(f_in, f);

    auto residual = [&] { a_.spmv(comm, -1.0, x, 1.0, f, r); };
    auto full_stage = [&](const DistVector& rhs, bool first) {
        full_->apply(comm, rhs, first ? x : dx);
        if (!first) axpby(1.0, dx, 1.0, x);
    };
    auto pressure_stage = [&](const DistVector& rhs, bool first) {
        restrict_pressure(rhs, pr);
        pres_->apply(comm, pr, px);
        prolong_pressure(px, first ? x : dx);
        if (!first) axpby(1.0, dx, 1.0, x);
    };

    switch (variant_) {
        case CprVariant::fp:
            full_stage(f, true);
            residual();
            pressure_stage(r, false);
            break;
        case CprVariant::pf:
            pressure_stage(f, true);
            residual();
            full_stage(r, false);
            break;
        case CprVariant::fpf:
            full_stage(f, true);
            residual();
            pressure_stage(r, false);
            residual();
            full_stage(r, false);
            break;
        case CprVariant::ffpf:
            full_stage(f, true);
            residual();
            full_stage(r, false);
            residual();
            pressure_stage(r, false);
            residual();
            full_stage(r, false);
            break;
    }
}

}  // namespace resim
