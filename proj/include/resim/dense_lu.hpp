#pragma once

#include <span>
#include <vector>

#include "resim/csr.hpp"
#include "resim/dist_matrix.hpp"
#include "resim/preconditioner.hpp"

namespace resim {

/// LU with partial pivoting of a small dense matrix.
class DenseLu {
public:
    DenseLu() = default;
    /// a is row-major n x n. Throws singular-pivot on an exactly zero pivot.
    DenseLu(Index n, std::vector<double> a);
    explicit DenseLu(const CsrMatrix& a) : DenseLu(a.nrows, a.to_dense()) {}

    Index size() const noexcept { return n_; }
    /// In place: b := A^{-1} b.
    void solve(std::span<double> b) const;

private:
    Index n_ = 0;
    std::vector<double> lu_;
    std::vector<Index> perm_;
};

/// Exact solve by gathering the whole operator to every rank. Meant for
/// small systems and as a reference stage in composite preconditioners.
class DirectSolvePreconditioner final : public Preconditioner {
public:
    /// Collective.
    DirectSolvePreconditioner(Comm& comm, const DistMatrix& a);
    void apply(Comm& comm, const DistVector& r, DistVector& z) const override;
    std::string name() const override { return "direct"; }

private:
    DenseLu lu_;
};

}  // namespace resim
