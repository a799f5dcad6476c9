#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "resim/error.hpp"
#include "resim/runtime.hpp"

namespace resim {

/// Row distribution plus halo description for one rank. Owned global
/// indices are the contiguous range [offsets[rank], offsets[rank+1]); halo
/// entries follow the owned ones in local numbering, sorted by global index.
class IndexMap {
public:
    IndexMap(int rank, std::vector<Index> offsets, std::vector<Index> halo_globals = {});

    /// Near-equal contiguous split of nglobal entries (no communication).
    static std::shared_ptr<const IndexMap> block(int rank, int nprocs, Index nglobal);
    /// Collective: every rank passes its owned count.
    static std::shared_ptr<const IndexMap> from_local_size(Comm& comm, Index nlocal);

    int rank() const noexcept { return rank_; }
    int nprocs() const noexcept { return static_cast<int>(offsets_.size()) - 1; }
    Index nlocal() const noexcept { return offsets_[rank_ + 1] - offsets_[rank_]; }
    Index ntlocal() const noexcept { return nlocal() + static_cast<Index>(halo_.size()); }
    Index nglobal() const noexcept { return offsets_.back(); }
    Index first() const noexcept { return offsets_[rank_]; }
    std::span<const Index> offsets() const noexcept { return offsets_; }
    std::span<const Index> halo_globals() const noexcept { return halo_; }

    bool owns(Index g) const noexcept { return g >= offsets_[rank_] && g < offsets_[rank_ + 1]; }
    int owner(Index g) const;
    Index local_to_global(Index local) const;
    std::optional<Index> global_to_local(Index g) const;

    std::shared_ptr<const IndexMap> with_halo(std::vector<Index> halo_globals) const;
    /// Same rank and same row distribution; halos may differ.
    bool same_distribution(const IndexMap& other) const noexcept;

private:
    int rank_;
    std::vector<Index> offsets_;
    std::vector<Index> halo_;
};

/// Halo-exchange plan (send/receive counts and displacements per peer,
/// indices to pack and local halo slots to fill).
class CommPlan {
public:
    CommPlan() = default;
    CommPlan(Index nlocal, std::vector<int> send_counts, std::vector<Index> send_index,
             std::vector<int> recv_counts, std::vector<Index> write_index);

    /// Collective construction from each rank's map.
    static CommPlan build(Comm& comm, const IndexMap& map);

    std::span<const int> send_counts() const noexcept { return scnts_; }
    std::span<const int> send_displs() const noexcept { return sdsps_; }
    std::span<const int> recv_counts() const noexcept { return rcnts_; }
    std::span<const int> recv_displs() const noexcept { return rdsps_; }
    std::span<const Index> send_index() const noexcept { return sidx_; }
    std::span<const Index> write_index() const noexcept { return widx_; }
    Index send_size() const noexcept { return static_cast<Index>(sidx_.size()); }
    Index recv_size() const noexcept { return static_cast<Index>(widx_.size()); }
    Index nlocal() const noexcept { return nlocal_; }

    /// Collective count handshake; throws plan-mismatch if my sends to p
    /// disagree with p's receives from me.
    void validate(Comm& comm) const;

    /// Fills halo slots from owned values. `block` values per index.
    void exchange(Comm& comm, std::span<const double> owned, std::span<double> halo, int block = 1) const;
    /// Convenience for a buffer laid out owned-then-halo.
    void exchange(Comm& comm, std::span<double> local_values, int block = 1) const;
    /// Reverse direction: halo contributions are added into their owners.
    void reverse_add(Comm& comm, std::span<const double> halo, std::span<double> owned, int block = 1) const;

private:
    Index nlocal_ = 0;
    std::vector<int> scnts_, sdsps_, rcnts_, rdsps_;
    std::vector<Index> sidx_, widx_;
};

}  // namespace resim
