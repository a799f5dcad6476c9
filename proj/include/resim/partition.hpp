#pragma once

#include <memory>
#include <string>
#include <vector>

#include "resim/grid.hpp"
#include "resim/index_map.hpp"
#include "resim/runtime.hpp"
#include "resim/sfc.hpp"

namespace resim {

/// Cell-to-rank assignment. members[p] lists the cells of rank p in
/// ascending global index; local_index[g] is g's position in that list.
struct Partition {
    int np = 0;
    std::vector<int> owner;
    std::vector<std::vector<Index>> members;
    std::vector<Index> local_index;

    static Partition from_owner(int np, std::vector<int> owner);

    Index ncells() const noexcept { return static_cast<Index>(owner.size()); }
    Index size(int rank) const { return static_cast<Index>(members.at(rank).size()); }

    /// Non-empty, pairwise disjoint, covering every cell.
    bool satisfies_subgrid_conditions() const;
};

enum class PartitionMethod { hsfc, hsfc_nd, morton, block };

std::string_view to_string(PartitionMethod m) noexcept;
PartitionMethod partition_method_from_string(std::string_view name);

/// Curve level used for a grid: ceil(log2(max axis count)), at least 1.
/// Non-uniform grids use a finer fixed lattice so distinct centroids
/// rarely share a curve cell.
unsigned sfc_level(const StructuredGrid& grid);

/// Sorts cells by the curve key of their normalized centroid (ties by
/// global index) and cuts the order into np runs whose sizes differ by at
/// most one.
Partition partition_sfc(const StructuredGrid& grid, int np, sfc::Encoder encoder);

/// Collective variant: every rank encodes a slab of cells, rank 0 sorts and
/// splits, the owner array is broadcast. Same result as partition_sfc.
Partition partition_sfc(Comm& comm, const StructuredGrid& grid, sfc::Encoder encoder);

/// Contiguous global-index slabs of near-equal size.
Partition partition_block(const StructuredGrid& grid, int np);

Partition make_partition(const StructuredGrid& grid, int np, PartitionMethod method);

double load_imbalance(const Partition& part);

struct SurfaceIndices {
    double max = 0.0;
    double global = 0.0;
    double average = 0.0;
    std::vector<Index> b;  // faces shared with another rank
    std::vector<Index> f;  // faces of the sub-grid
};

SurfaceIndices surface_indices(const StructuredGrid& grid, const Partition& part);

struct Connectivity {
    std::vector<int> per_rank;
    int max = 0;
};

Connectivity connectivity(const StructuredGrid& grid, const Partition& part);

struct PartitionQuality {
    double load_imbalance = 1.0;
    SurfaceIndices surface;
    Connectivity connectivity;
};

PartitionQuality partition_quality(const StructuredGrid& grid, const Partition& part);

/// Row map for a partitioned grid: rank p owns rows
/// [offset_p, offset_p + dofs * |G_p|), the dofs of one cell are
/// consecutive, and the halo holds every row of every off-rank face
/// neighbor.
std::shared_ptr<const IndexMap> build_index_map(const StructuredGrid& grid, const Partition& part, int rank,
                                                int dofs_per_cell);

/// Global row of unknown u of cell g.
Index cell_row(const Partition& part, Index g, int dofs_per_cell, int u = 0);

}  // namespace resim
