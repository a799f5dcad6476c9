#pragma once

#include <string_view>
#include <vector>

#include "resim/dist_matrix.hpp"
#include "resim/preconditioner.hpp"

namespace resim {

enum class SolverMethod { gmres, bicgstab };

std::string_view to_string(SolverMethod m) noexcept;
SolverMethod solver_method_from_string(std::string_view name);

struct SolverConfig {
    double rtol = 1e-6;
    double atol = 1e-50;
    double btol = 0.0;  // 0 disables the |b|-relative test
    int maxit = 1000;
    int restart = 30;
    SolverMethod method = SolverMethod::gmres;

    /// Throws invalid-argument for negative tolerances, restart < 1 or maxit < 0.
    void validate() const;
};

enum class StopReason { rtol, atol, btol, maxit, breakdown };

std::string_view to_string(StopReason r) noexcept;

struct SolveReport {
    int iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;  // true residual |b - A x|
    bool converged = false;
    StopReason stop_reason = StopReason::maxit;
    /// Residual norm after each iteration, entry 0 is |r0|. GMRES records
    /// the Givens estimate inside a cycle; BiCGSTAB the recurrence residual.
    std::vector<double> history;
};

/// Right-preconditioned restarted GMRES(m) with classical Gram-Schmidt and
/// one re-orthogonalization pass. Stops when |r| <= max(rtol |r0|,
/// btol |b|, atol) or after maxit iterations in total. Collective.
SolveReport gmres(Comm& comm, const DistMatrix& a, const DistVector& b, DistVector& x, const SolverConfig& config,
                  const Preconditioner* pc = nullptr);

/// Right-preconditioned BiCGSTAB with the same stopping rule; convergence
/// at the half step counts as a full iteration. Collective.
SolveReport bicgstab(Comm& comm, const DistMatrix& a, const DistVector& b, DistVector& x, const SolverConfig& config,
                     const Preconditioner* pc = nullptr);

/// Dispatch on config.method.
SolveReport solve(Comm& comm, const DistMatrix& a, const DistVector& b, DistVector& x, const SolverConfig& config,
                  const Preconditioner* pc = nullptr);

/// |b - A x| (collective).
double residual_norm(Comm& comm, const DistMatrix& a, const DistVector& b, const DistVector& x);

}  // namespace resim
