#pragma once

#include <vector>

#include "resim/dense_lu.hpp"
#include "resim/dist_matrix.hpp"
#include "resim/preconditioner.hpp"

namespace resim {

struct AmgParams {
    int max_levels = 6;
    double strength = 0.5;
    double max_row_sum = 0.9;
    double trunc_tol = 1e-2;
    int sweeps = 2;
    int maxit = 1;             // V-cycles per application
    Index coarse_size = 32;    // stop coarsening at or below this many rows
    Index max_direct = 4000;   // larger coarsest levels are smoothed instead

    void validate() const;
};

enum class PointKind : char { coarse, fine };

/// Per-rank Ruge-Stueben splitting of the owned rows of a square matrix,
/// using only couplings between owned rows.
std::vector<PointKind> rs_coarsen(const DistMatrix& a, double strength, double max_row_sum);

/// Direct interpolation P (fine rows x coarse columns) for a splitting;
/// coarse points are numbered in rank order then ascending row.
DistMatrix direct_interpolation(Comm& comm, const DistMatrix& a, const std::vector<PointKind>& split,
                                double strength, double max_row_sum, double trunc_tol);

/// Collective: P^T A P.
DistMatrix galerkin_product(Comm& comm, const DistMatrix& a, const DistMatrix& p);

/// In-place Gauss-Seidel over owned rows; off-rank values are taken from
/// one exchange per sweep. symmetric adds a backward sweep.
void hybrid_gauss_seidel(Comm& comm, const DistMatrix& a, const DistVector& b, DistVector& x, int sweeps,
                         bool symmetric);

struct AmgLevel {
    DistMatrix A;
    DistMatrix P;  // empty on the coarsest level
    std::vector<PointKind> split;
};

class AmgPreconditioner final : public Preconditioner {
public:
    /// Collective.
    AmgPreconditioner(Comm& comm, const DistMatrix& a, AmgParams params = {});

    /// z = maxit V-cycles from a zero guess.
    void apply(Comm& comm, const DistVector& r, DistVector& z) const override;
    std::string name() const override { return "amg"; }

    /// One V-cycle improving x for A x = b.
    void vcycle(Comm& comm, const DistVector& b, DistVector& x) const;

    const AmgParams& params() const noexcept { return params_; }
    int nlevels() const noexcept { return static_cast<int>(levels_.size()); }
    const AmgLevel& level(int l) const { return levels_.at(l); }
    bool coarsest_is_direct() const noexcept { return direct_; }

private:
    void cycle(Comm& comm, int l, const DistVector& b, DistVector& x) const;

    AmgParams params_;
    std::vector<AmgLevel> levels_;
    bool direct_ = false;
    DenseLu coarse_lu_;
};

}  // namespace resim
