#pragma once

#include <functional>
#include <memory>
#include <string_view>

#include "resim/cpr.hpp"

namespace resim {

enum class PcKind { ras, amg, cpr_fp, cpr_pf, cpr_fpf, cpr_ffpf, user, none };

std::string_view to_string(PcKind k) noexcept;
/// Accepts "cpr-fp" and "cpr_fp" spellings. Throws invalid-kind.
PcKind pc_kind_from_string(std::string_view name);

/// Externally supplied preconditioner: assemble runs once at setup, solve
/// computes z from r.
struct UserCallbacks {
    std::function<void(Comm&, const DistMatrix&)> assemble;
    std::function<void(Comm&, const DistVector& r, DistVector& z)> solve;
};

class UserPreconditioner final : public Preconditioner {
public:
    UserPreconditioner(Comm& comm, const DistMatrix& a, UserCallbacks callbacks);
    void apply(Comm& comm, const DistVector& r, DistVector& z) const override;
    std::string name() const override { return "user"; }

private:
    UserCallbacks cb_;
};

struct PcConfig {
    PcKind kind = PcKind::none;
    RasParams ras;
    AmgParams amg;
    BlockLayout layout;
    bool decouple = false;
    UserCallbacks user;
};

/// Collective. Sets up the preconditioner named by config.kind for A.
std::unique_ptr<Preconditioner> make_preconditioner(Comm& comm, const DistMatrix& a, const PcConfig& config);

}  // namespace resim
