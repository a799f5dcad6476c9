#pragma once

#include <functional>
#include <memory>

#include "resim/amg.hpp"
#include "resim/block_layout.hpp"
#include "resim/ras.hpp"

namespace resim {

enum class CprVariant { fp, pf, fpf, ffpf };

std::string_view to_string(CprVariant v) noexcept;

struct CprParams {
    RasParams ras;
    AmgParams amg;
    /// Left-scale every cell's rows by the inverse of its diagonal block
    /// before building the stages. Off by default.
    bool decouple = false;
};

/// Builds a stage solver for a matrix; used to swap the RAS or AMG stage.
using StageFactory = std::function<std::unique_ptr<Preconditioner>(Comm&, const DistMatrix&)>;

struct CprStages {
    StageFactory full;      // default: RAS on A
    StageFactory pressure;  // default: AMG on A_pp
};

class CprPreconditioner final : public Preconditioner {
public:
    /// Collective.
    CprPreconditioner(Comm& comm, const DistMatrix& a, BlockLayout layout, CprVariant variant,
                      CprParams params = {}, CprStages stages = {});

    void apply(Comm& comm, const DistVector& f, DistVector& x) const override;
    std::string name() const override;

    CprVariant variant() const noexcept { return variant_; }
    const BlockLayout& layout() const noexcept { return layout_; }
    /// Operator the stages work on (A, or the decoupled A).
    const DistMatrix& system() const noexcept { return a_; }
    const DistMatrix& pressure_matrix() const noexcept { return app_; }
    const std::shared_ptr<const IndexMap>& pressure_map() const noexcept { return pmap_; }

    /// p = Pi_r x.
    void restrict_pressure(const DistVector& x, DistVector& p) const;
    /// x = Pi_p p (non-pressure entries zero).
    void prolong_pressure(const DistVector& p, DistVector& x) const;

private:
    void scale_rhs(const DistVector& f, DistVector& out) const;

    BlockLayout layout_;
    CprVariant variant_;
    DistMatrix a_;
    std::vector<double> dinv_;  // per-cell inverse diagonal blocks, row-major
    std::shared_ptr<const IndexMap> pmap_;
    DistMatrix app_;
    std::unique_ptr<Preconditioner> full_;
    std::unique_ptr<Preconditioner> pres_;
};

}  // namespace resim
