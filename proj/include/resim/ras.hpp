#pragma once

#include <memory>
#include <vector>

#include "resim/dist_matrix.hpp"
#include "resim/ilu.hpp"
#include "resim/preconditioner.hpp"

namespace resim {

struct RasParams {
    int overlap = 1;
    IluOptions ilu{IluVariant::iluk, 0, -1, 1e-3};
    double filter_tol = 1e-4;
    int ilutc_drop = 0;  // accepted for compatibility, has no effect

    void validate() const;
};

/// Restricted additive Schwarz: each rank factors its rows extended by
/// `overlap` layers of neighbor rows, solves on the extended block and
/// keeps only the owned part of the local solution.
class RasPreconditioner final : public Preconditioner {
public:
    /// Collective.
    RasPreconditioner(Comm& comm, const DistMatrix& a, RasParams params = {});

    /// Collective. Writes only the owned entries of z.
    void apply(Comm& comm, const DistVector& r, DistVector& z) const override;
    std::string name() const override { return "ras"; }

    const RasParams& params() const noexcept { return params_; }
    /// Owned rows followed by the overlap rows (ascending global index).
    const std::shared_ptr<const IndexMap>& extended_map() const noexcept { return ext_; }
    /// Filtered subdomain matrix in extended local numbering.
    const CsrMatrix& local_matrix() const noexcept { return local_; }
    const IluFactors& factors() const noexcept { return factors_; }

private:
    RasParams params_;
    std::shared_ptr<const IndexMap> row_map_;
    std::shared_ptr<const IndexMap> ext_;
    CommPlan plan_;
    CsrMatrix local_;
    IluFactors factors_;
};

}  // namespace resim
