#include "resim/pc.hpp"

#include <string>

namespace resim {

std::string_view to_string(PcKind k) noexcept {
    switch (k) {
        case PcKind::ras: return "ras";
        case PcKind::amg: return "amg";
        case PcKind::cpr_fp: return "cpr-fp";
        case PcKind::cpr_pf: return "cpr-pf";
        case PcKind::cpr_fpf: return "cpr-fpf";
        case PcKind::cpr_ffpf: return "cpr-ffpf";
        case PcKind::user: return "user";
        case PcKind::none: return "none";
    }
    return "?";
}

PcKind pc_kind_from_string(std::string_view name) {
    std::string s(name);
    for (char& c : s) {
        if (c == '_') c = '-';
    }
    for (auto k : {PcKind::ras, PcKind::amg, PcKind::cpr_fp, PcKind::cpr_pf, PcKind::cpr_fpf, PcKind::cpr_ffpf,
                   PcKind::user, PcKind::none}) {
        if (s == to_string(k)) return k;
    }
    fail(Errc::invalid_kind, "unknown preconditioner '" + std::string(name) + "'");
}

UserPreconditioner::UserPreconditioner(Comm& comm, const DistMatrix& a, UserCallbacks callbacks)
    : cb_(std::move(callbacks)) {
    if (!cb_.solve) fail(Errc::invalid_argument, "user preconditioner needs a solve callback");
    if (cb_.assemble) cb_.assemble(comm, a);
}

void UserPreconditioner::apply(Comm& comm, const DistVector& r, DistVector& z) const { cb_.solve(comm, r, z); }

std::unique_ptr<Preconditioner> make_preconditioner(Comm& comm, const DistMatrix& a, const PcConfig& config) {
    auto cpr = [&](CprVariant v) -> std::unique_ptr<Preconditioner> {
        return std::make_unique<CprPreconditioner>(comm, a, config.layout, v,
                                                   CprParams{config.ras, config.amg, config.decouple});
    };
    switch (config.kind) {
        case PcKind::ras: return std::make_unique<RasPreconditioner>(comm, a, config.ras);
        case PcKind::amg: return std::make_unique<AmgPreconditioner>(comm, a, config.amg);
        case PcKind::cpr_fp: return cpr(CprVariant::fp);
        case PcKind::cpr_pf: return cpr(CprVariant::pf);
        case PcKind::cpr_fpf: return cpr(CprVariant::fpf);
        case PcKind::cpr_ffpf: return cpr(CprVariant::ffpf);
        case PcKind::user: return std::make_unique<UserPreconditioner>(comm, a, config.user);
        case PcKind::none: return std::make_unique<IdentityPreconditioner>();
    }
    fail(Errc::invalid_kind, "unknown preconditioner kind");
}

}  // namespace resim
