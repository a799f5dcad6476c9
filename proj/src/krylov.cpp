#include "resim/krylov.hpp"

#include <cmath>
#include <string>

namespace resim {

namespace {

constexpr double kBreakdown = 1e-300;

struct Targets {
    double rtol_abs, btol_abs, atol;
    double threshold() const { return std::max({rtol_abs, btol_abs, atol}); }
};

Targets make_targets(const SolverConfig& c, double r0, double bnorm) {
    return {c.rtol * r0, c.btol > 0.0 ? c.btol * bnorm : 0.0, c.atol};
}

// Which criterion a residual satisfies, preferring the relative ones. A
// zero tolerance never claims a hit; an exact zero residual falls back to rtol.
bool satisfied(const Targets& t, double r, StopReason& why) {
    if (t.rtol_abs > 0.0 && r <= t.rtol_abs) {
        why = StopReason::rtol;
        return true;
    }
    if (t.btol_abs > 0.0 && r <= t.btol_abs) {
        why = StopReason::btol;
        return true;
    }
    if (t.atol > 0.0 && r <= t.atol) {
        why = StopReason::atol;
        return true;
    }
    if (r == 0.0) {
        why = StopReason::rtol;
        return true;
    }
    return false;
}

void precondition(Comm& comm, const Preconditioner* pc, const DistVector& r, DistVector& z) {
    if (pc == nullptr) copy(r, z);
    else pc->apply(comm, r, z);
}

void residual(Comm& comm, const DistMatrix& a, const DistVector& b, const DistVector& x, DistVector& r) {
    a.spmv(comm, -1.0, x, 1.0, b, r);
}

void check_inputs(const DistMatrix& a, const DistVector& b, const DistVector& x) {
    if (!a.assembled()) fail(Errc::not_assembled, "solver needs an assembled matrix");
    if (!b.map() || !b.map()->same_distribution(*a.row_map())) fail(Errc::map_mismatch, "rhs map does not match");
    check_same_map(b, x);
}

// Givens rotation that zeroes b in (a, b).
void givens(double a, double b, double& c, double& s) {
    if (b == 0.0) {
        c = 1.0;
        s = 0.0;
    } else if (std::abs(b) > std::abs(a)) {
        const double t = a / b;
        s = 1.0 / std::sqrt(1.0 + t * t);
        c = t * s;
    } else {
        const double t = b / a;
        c = 1.0 / std::sqrt(1.0 + t * t);
        s = t * c;
    }
}

}  // namespace

std::string_view to_string(SolverMethod m) noexcept { return m == SolverMethod::gmres ? "gmres" : "bicgstab"; }

SolverMethod solver_method_from_string(std::string_view name) {
    if (name == "gmres") return SolverMethod::gmres;
    if (name == "bicgstab") return SolverMethod::bicgstab;
    fail(Errc::invalid_kind, "unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::rtol: return "rtol";
        case StopReason::atol: return "atol";
        case StopReason::btol: return "btol";
        case StopReason::maxit: return "maxit";
        case StopReason::breakdown: return "breakdown";
    }
    return "?";
}

void SolverConfig::validate() const {
    if (!(rtol >= 0.0) || !(atol >= 0.0) || !(btol >= 0.0)) fail(Errc::invalid_argument, "tolerances must be >= 0");
    if (restart < 1) fail(Errc::invalid_argument, "restart must be >= 1");
    if (maxit < 0) fail(Errc::invalid_argument, "maxit must be >= 0");
}

double residual_norm(Comm& comm, const DistMatrix& a, const DistVector& b, const DistVector& x) {
    DistVector r(b.map());
    residual(comm, a, b, x, r);
    return norm2(comm, r);
}

SolveReport gmres(Comm& comm, const DistMatrix& a, const DistVector& b, DistVector& x, const SolverConfig& config,
                  const Preconditioner* pc) {
    config.validate();
    check_inputs(a, b, x);
    const auto& map = b.map();
    const int m = config.restart;

    SolveReport rep;
    DistVector r(map);
    residual(comm, a, b, x, r);
    double beta = norm2(comm, r);
    const Targets tgt = make_targets(config, beta, config.btol > 0.0 ? norm2(comm, b) : 0.0);
    rep.initial_residual = beta;
    rep.final_residual = beta;
    rep.history.push_back(beta);
    if (satisfied(tgt, beta, rep.stop_reason)) {
        rep.converged = true;
        return rep;
    }

    std::vector<DistVector> v(m + 1, DistVector(map));
    std::vector<DistVector> z(m, DistVector(map));
    std::vector<double> h((m + 1) * m, 0.0);  // column-major H(i, j) = h[j * (m + 1) + i]
    std::vector<double> cs(m), sn(m), g(m + 1), y(m);
    std::vector<const DistVector*> basis;
    DistVector w(map);
    auto H = [&](int i, int j) -> double& { return h[j * (m + 1) + i]; };

    bool broke_down = false;
    while (rep.iterations < config.maxit) {
        axpby(1.0 / beta, r, 0.0, v[0]);
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        int k = 0;  // columns built in this cycle
        bool inner_done = false;
        while (k < m && rep.iterations < config.maxit && !inner_done) {
            precondition(comm, pc, v[k], z[k]);
            a.spmv(comm, 1.0, z[k], 0.0, w);
            basis.assign(1, &v[0]);
            for (int i = 1; i <= k; ++i) basis.push_back(&v[i]);
            for (int pass = 0; pass < 2; ++pass) {
                auto hs = dots(comm, basis, w);
                for (int i = 0; i <= k; ++i) {
                    axpby(-hs[i], v[i], 1.0, w);
                    H(i, k) = pass == 0 ? hs[i] : H(i, k) + hs[i];
                }
            }
            const double hnext = norm2(comm, w);
            H(k + 1, k) = hnext;
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            givens(H(k, k), H(k + 1, k), cs[k], sn[k]);
            H(k, k) = cs[k] * H(k, k) + sn[k] * H(k + 1, k);
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            ++rep.iterations;
            ++k;
            const double est = std::abs(g[k]);
            rep.history.push_back(est);
            StopReason why;
            if (hnext < kBreakdown) {
                broke_down = true;
                inner_done = true;
            } else {
                axpby(1.0 / hnext, w, 0.0, v[k]);
                inner_done = satisfied(tgt, est, why);
            }
        }
        // y = R^{-1} g over the k built columns, then x += Z y
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
            y[i] = H(i, i) != 0.0 ? s / H(i, i) : 0.0;
        }
        for (int j = 0; j < k; ++j) axpby(y[j], z[j], 1.0, x);

        residual(comm, a, b, x, r);
        beta = norm2(comm, r);
        rep.final_residual = beta;
        if (satisfied(tgt, beta, rep.stop_reason)) {
            rep.converged = true;
            return rep;
        }
        if (broke_down || beta < kBreakdown) {
            rep.stop_reason = StopReason::breakdown;
            return rep;
        }
    }
    rep.stop_reason = StopReason::maxit;
    return rep;
}

SolveReport bicgstab(Comm& comm, const DistMatrix& a, const DistVector& b, DistVector& x, const SolverConfig& config,
                     const Preconditioner* pc) {
    config.validate();
    check_inputs(a, b, x);
    const auto& map = b.map();

    SolveReport rep;
    DistVector r(map), rhat(map), p(map), v(map), phat(map), s(map), shat(map), t(map);
    residual(comm, a, b, x, r);
    double rnorm = norm2(comm, r);
    const Targets tgt = make_targets(config, rnorm, config.btol > 0.0 ? norm2(comm, b) : 0.0);
    rep.initial_residual = rnorm;
    rep.final_residual = rnorm;
    rep.history.push_back(rnorm);
    if (satisfied(tgt, rnorm, rep.stop_reason)) {
        rep.converged = true;
        return rep;
    }

    // A fresh shadow residual is used at start and after a false
    // convergence of the recurrence residual.
    bool fresh = true;
    double rho_old = 1.0, alpha = 1.0, omega = 1.0;
    while (rep.iterations < config.maxit) {
        if (fresh) {
            copy(r, rhat);
            rho_old = alpha = omega = 1.0;
            v.fill(0.0);
            p.fill(0.0);
        }
        const double rho = dot(comm, rhat, r);
        if (std::abs(rho) < kBreakdown) {
            rep.stop_reason = StopReason::breakdown;
            break;
        }
        if (fresh) {
            copy(r, p);
            fresh = false;
        } else {
            const double beta = (rho / rho_old) * (alpha / omega);
            axpby(-omega, v, 1.0, p);
            axpby(1.0, r, beta, p);
        }
        precondition(comm, pc, p, phat);
        a.spmv(comm, 1.0, phat, 0.0, v);
        const double rv = dot(comm, rhat, v);
        if (std::abs(rv) < kBreakdown) {
            rep.stop_reason = StopReason::breakdown;
            break;
        }
        alpha = rho / rv;
        axpbyz(1.0, r, -alpha, v, s);
        const double snorm = norm2(comm, s);
        ++rep.iterations;
        StopReason why;
        if (satisfied(tgt, snorm, why)) {
            axpby(alpha, phat, 1.0, x);
            rep.history.push_back(snorm);
            residual(comm, a, b, x, r);
            rnorm = norm2(comm, r);
            if (satisfied(tgt, rnorm, rep.stop_reason)) {
                rep.final_residual = rnorm;
                rep.converged = true;
                return rep;
            }
            fresh = true;
            continue;
        }
        precondition(comm, pc, s, shat);
        a.spmv(comm, 1.0, shat, 0.0, t);
        const DistVector* ts[] = {&t, &s};
        auto tt_ts = dots(comm, ts, t);  // (t,t), (s,t)
        if (tt_ts[0] < kBreakdown) {
            axpby(alpha, phat, 1.0, x);
            rep.stop_reason = StopReason::breakdown;
            break;
        }
        omega = tt_ts[1] / tt_ts[0];
        axpby(alpha, phat, 1.0, x);
        axpby(omega, shat, 1.0, x);
        axpbyz(1.0, s, -omega, t, r);
        rnorm = norm2(comm, r);
        rep.history.push_back(rnorm);
        rho_old = rho;
        if (satisfied(tgt, rnorm, why)) {
            residual(comm, a, b, x, r);
            rnorm = norm2(comm, r);
            if (satisfied(tgt, rnorm, rep.stop_reason)) {
                rep.final_residual = rnorm;
                rep.converged = true;
                return rep;
            }
            fresh = true;
            continue;
        }
        if (omega == 0.0) {
            rep.stop_reason = StopReason::breakdown;
            break;
        }
        if (rep.iterations >= config.maxit) rep.stop_reason = StopReason::maxit;
    }
    rep.final_residual = residual_norm(comm, a, b, x);
    rep.converged = satisfied(tgt, rep.final_residual, rep.stop_reason);
    if (!rep.converged && rep.stop_reason != StopReason::breakdown) rep.stop_reason = StopReason::maxit;
    return rep;
}

SolveReport solve(Comm& comm, const DistMatrix& a, const DistVector& b, DistVector& x, const SolverConfig& config,
                  const Preconditioner* pc) {
    return config.method == SolverMethod::gmres ? gmres(comm, a, b, x, config, pc)
                                                : bicgstab(comm, a, b, x, config, pc);
}

}  // namespace resim
