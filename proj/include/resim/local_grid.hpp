#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "resim/grid.hpp"
#include "resim/index_map.hpp"
#include "resim/partition.hpp"
#include "resim/runtime.hpp"

namespace resim {

struct RemoteNeighbor {
    Index global_index = 0;
    int owner_rank = 0;
    Index owner_local_index = 0;
};

struct NeighborRef {
    enum Kind { local, remote, boundary };
    Kind kind = boundary;
    Index index = -1;  // local cell index, or slot in remote_neighbors()
    int boundary_tag = 0;
};

/// One rank's view of a partitioned grid: its owned cells (ascending
/// global index), the off-rank face neighbors, and the cell-level
/// halo-exchange plan once built.
class LocalGrid {
public:
    LocalGrid(std::shared_ptr<const StructuredGrid> grid, const Partition& part, int rank);

    const StructuredGrid& grid() const noexcept { return *grid_; }
    int rank() const noexcept { return rank_; }
    Index nowned() const noexcept { return static_cast<Index>(owned_.size()); }
    std::span<const Index> owned_cells() const noexcept { return owned_; }
    std::span<const RemoteNeighbor> remote_neighbors() const noexcept { return remote_; }

    Cell cell(Index local) const;
    std::array<NeighborRef, kFaces> neighbors(Index local) const;

    const std::shared_ptr<const IndexMap>& cell_map() const noexcept { return map_; }
    /// Collective.
    void build_comm_plan(Comm& comm);
    const CommPlan* comm_plan() const noexcept { return plan_ ? &*plan_ : nullptr; }

private:
    std::shared_ptr<const StructuredGrid> grid_;
    int rank_;
    std::vector<Index> owned_;
    std::vector<RemoteNeighbor> remote_;
    std::vector<std::array<NeighborRef, kFaces>> nbrs_;
    std::shared_ptr<const IndexMap> map_;
    std::optional<CommPlan> plan_;
};

enum class DofKind { cell, constant };

/// Cell-centered degrees of freedom. A cell field stores dim values per
/// owned cell and dim values per remote neighbor (the halo); a constant
/// field stores dim values total.
class DofField {
public:
    DofField(std::shared_ptr<const LocalGrid> local, std::string name, DofKind kind, int dim);

    const std::string& name() const noexcept { return name_; }
    DofKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    const LocalGrid& local_grid() const noexcept { return *local_; }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& halo() const noexcept { return halo_; }

    /// Value of component c of remote neighbor slot s; for constant
    /// fields this is the constant.
    double halo_value(Index slot, int c = 0) const;

    /// Collective. Throws not-assembled if the grid has no comm plan.
    void halo_exchange(Comm& comm);

private:
    std::shared_ptr<const LocalGrid> local_;
    std::string name_;
    DofKind kind_;
    int dim_;
    std::vector<double> values_;
    std::vector<double> halo_;
};

DofField dof_create(std::shared_ptr<const LocalGrid> local, std::string name, DofKind kind, int dim);

/// Collective: rank 0 writes "global_index,<name>_0,..." rows for all
/// cells in ascending global index.
void write_field_csv(Comm& comm, const DofField& field, const std::string& path);

}  // namespace resim
