#include "resim/partition.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <string>

#include "resim/exact_sum.hpp"

namespace resim {

namespace {

constexpr unsigned kNonUniformLevel = 20;

struct KeyedCell {
    sfc::CurveKey key;
    Index cell;
};

sfc::CurveKey cell_key(const StructuredGrid& grid, Index g, sfc::Encoder encoder, unsigned level) {
    const auto u = sfc::normalize_to_unit_cube(grid.centroid(g), grid.spec().bbox);
    const std::array<std::uint32_t, 3> lat = {sfc::to_lattice(u[0], level), sfc::to_lattice(u[1], level),
                                              sfc::to_lattice(u[2], level)};
    return sfc::encode(encoder, lat, level);
}

void check_np(const StructuredGrid& grid, int np) {
    if (np < 1) fail(Errc::invalid_argument, "rank count must be >= 1");
    if (np > grid.ncells()) {
        fail(Errc::too_many_ranks, "cannot split " + std::to_string(grid.ncells()) + " cells over " +
                                       std::to_string(np) + " ranks");
    }
}

// Cuts an ordered cell list into np runs of near-equal length.
std::vector<int> split_order(const std::vector<Index>& order, int np) {
    const Index n = static_cast<Index>(order.size());
    std::vector<int> owner(order.size());
    const Index base = n / np;
    const Index extra = n % np;
    Index pos = 0;
    for (int p = 0; p < np; ++p) {
        const Index len = base + (p < extra ? 1 : 0);
        for (Index k = 0; k < len; ++k) owner[order[pos++]] = p;
    }
    return owner;
}

std::vector<Index> sorted_by_key(std::vector<KeyedCell> cells) {
    std::sort(cells.begin(), cells.end(), [](const KeyedCell& a, const KeyedCell& b) {
        if (auto c = a.key <=> b.key; c != 0) return c < 0;
        return a.cell < b.cell;
    });
    std::vector<Index> order(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) order[i] = cells[i].cell;
    return order;
}

}  // namespace

Partition Partition::from_owner(int np, std::vector<int> owner) {
    if (np < 1) fail(Errc::invalid_argument, "rank count must be >= 1");
    Partition p;
    p.np = np;
    p.owner = std::move(owner);
    p.members.assign(np, {});
    p.local_index.assign(p.owner.size(), 0);
    for (Index g = 0; g < static_cast<Index>(p.owner.size()); ++g) {
        const int r = p.owner[g];
        if (r < 0 || r >= np) fail(Errc::invalid_argument, "owner rank out of range for cell " + std::to_string(g));
        p.local_index[g] = static_cast<Index>(p.members[r].size());
        p.members[r].push_back(g);
    }
    return p;
}

bool Partition::satisfies_subgrid_conditions() const {
    std::vector<int> seen(owner.size(), 0);
    for (int r = 0; r < np; ++r) {
        if (members[r].empty()) return false;
        for (Index g : members[r]) {
            if (g < 0 || g >= ncells() || seen[g]++ != 0 || owner[g] != r) return false;
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

std::string_view to_string(PartitionMethod m) noexcept {
    switch (m) {
        case PartitionMethod::hsfc: return "hsfc";
        case PartitionMethod::hsfc_nd: return "hsfc-nd";
        case PartitionMethod::morton: return "morton";
        case PartitionMethod::block: return "block";
    }
    return "?";
}

PartitionMethod partition_method_from_string(std::string_view name) {
    if (name == "block") return PartitionMethod::block;
    switch (sfc::encoder_from_string(name)) {
        case sfc::Encoder::hilbert_3d_table: return PartitionMethod::hsfc;
        case sfc::Encoder::hilbert_nd: return PartitionMethod::hsfc_nd;
        case sfc::Encoder::morton: return PartitionMethod::morton;
    }
    fail(Errc::invalid_kind, "unknown partition method");
}

unsigned sfc_level(const StructuredGrid& grid) {
    if (!grid.spec().uniform()) return kNonUniformLevel;
    const auto& s = grid.spec();
    const auto n = static_cast<std::uint64_t>(std::max({s.ncx, s.ncy, s.ncz}));
    return std::max(1u, static_cast<unsigned>(std::bit_width(n - 1)));
}

Partition partition_sfc(const StructuredGrid& grid, int np, sfc::Encoder encoder) {
    check_np(grid, np);
    const unsigned level = sfc_level(grid);
    std::vector<KeyedCell> cells;
    cells.reserve(grid.ncells());
    for (Index g = 0; g < grid.ncells(); ++g) cells.push_back({cell_key(grid, g, encoder, level), g});
    return Partition::from_owner(np, split_order(sorted_by_key(std::move(cells)), np));
}

Partition partition_sfc(Comm& comm, const StructuredGrid& grid, sfc::Encoder encoder) {
    const int np = comm.size();
    check_np(grid, np);
    const unsigned level = sfc_level(grid);
    auto slab = IndexMap::block(comm.rank(), np, grid.ncells());

    // Keys of this rank's slab, flattened as (cell, digits...).
    const std::size_t stride = 1 + level;
    std::vector<std::uint32_t> mine;
    mine.reserve(slab->nlocal() * stride);
    for (Index g = slab->first(); g < slab->first() + slab->nlocal(); ++g) {
        auto key = cell_key(grid, g, encoder, level);
        mine.push_back(static_cast<std::uint32_t>(g - slab->first()));
        mine.insert(mine.end(), key.digits().begin(), key.digits().end());
    }
    auto gathered = comm.allgatherv<std::uint32_t>(mine);

    std::vector<int> owner;
    if (comm.rank() == 0) {
        std::vector<KeyedCell> cells;
        cells.reserve(grid.ncells());
        for (int p = 0; p < np; ++p) {
            const auto& buf = gathered[p];
            for (std::size_t at = 0; at + stride <= buf.size(); at += stride) {
                std::vector<std::uint32_t> digits(buf.begin() + at + 1, buf.begin() + at + stride);
                cells.push_back({sfc::CurveKey(3, std::move(digits)), slab->offsets()[p] + buf[at]});
            }
        }
        owner = split_order(sorted_by_key(std::move(cells)), np);
    }
    owner = comm.broadcast_vector<int>(0, owner);
    return Partition::from_owner(np, std::move(owner));
}

Partition partition_block(const StructuredGrid& grid, int np) {
    check_np(grid, np);
    std::vector<Index> order(grid.ncells());
    std::iota(order.begin(), order.end(), Index{0});
    return Partition::from_owner(np, split_order(order, np));
}

Partition make_partition(const StructuredGrid& grid, int np, PartitionMethod method) {
    switch (method) {
        case PartitionMethod::hsfc: return partition_sfc(grid, np, sfc::Encoder::hilbert_3d_table);
        case PartitionMethod::hsfc_nd: return partition_sfc(grid, np, sfc::Encoder::hilbert_nd);
        case PartitionMethod::morton: return partition_sfc(grid, np, sfc::Encoder::morton);
        case PartitionMethod::block: return partition_block(grid, np);
    }
    fail(Errc::invalid_kind, "unknown partition method");
}

double load_imbalance(const Partition& part) {
    Index largest = 0;
    Index total = 0;
    for (const auto& m : part.members) {
        largest = std::max(largest, static_cast<Index>(m.size()));
        total += static_cast<Index>(m.size());
    }
    if (total == 0) return 1.0;
    return static_cast<double>(part.np) * static_cast<double>(largest) / static_cast<double>(total);
}

SurfaceIndices surface_indices(const StructuredGrid& grid, const Partition& part) {
    SurfaceIndices s;
    s.b.assign(part.np, 0);
    s.f.assign(part.np, 0);
    for (Index g = 0; g < grid.ncells(); ++g) {
        const int r = part.owner[g];
        for (int face = 0; face < kFaces; ++face) {
            auto nb = grid.neighbor(g, face);
            if (!nb) {
                ++s.f[r];
            } else if (part.owner[*nb] != r) {
                ++s.f[r];
                ++s.b[r];
            } else if (*nb > g) {
                ++s.f[r];  // shared inside the rank: counted from the lower-index side only
            }
        }
    }
    ExactSum ratio_sum;
    Index sum_b = 0;
    Index sum_f = 0;
    for (int r = 0; r < part.np; ++r) {
        const double ratio = s.f[r] > 0 ? static_cast<double>(s.b[r]) / static_cast<double>(s.f[r]) : 0.0;
        s.max = std::max(s.max, ratio);
        ratio_sum.add(ratio);
        sum_b += s.b[r];
        sum_f += s.f[r];
    }
    s.global = sum_f > sum_b ? static_cast<double>(sum_b) / static_cast<double>(sum_f - sum_b) : 0.0;
    s.average = ratio_sum.round() / static_cast<double>(part.np);
    return s;
}

Connectivity connectivity(const StructuredGrid& grid, const Partition& part) {
    Connectivity c;
    c.per_rank.assign(part.np, 0);
    for (int r = 0; r < part.np; ++r) {
        std::set<int> peers;
        for (Index g : part.members[r]) {
            for (int face = 0; face < kFaces; ++face) {
                auto nb = grid.neighbor(g, face);
                if (nb && part.owner[*nb] != r) peers.insert(part.owner[*nb]);
            }
        }
        c.per_rank[r] = static_cast<int>(peers.size());
        c.max = std::max(c.max, c.per_rank[r]);
    }
    return c;
}

PartitionQuality partition_quality(const StructuredGrid& grid, const Partition& part) {
    return {load_imbalance(part), surface_indices(grid, part), connectivity(grid, part)};
}

Index cell_row(const Partition& part, Index g, int dofs_per_cell, int u) {
    const int r = part.owner.at(g);
    Index offset = 0;
    for (int p = 0; p < r; ++p) offset += static_cast<Index>(part.members[p].size());
    return (offset + part.local_index[g]) * dofs_per_cell + u;
}

std::shared_ptr<const IndexMap> build_index_map(const StructuredGrid& grid, const Partition& part, int rank,
                                                int dofs_per_cell) {
    if (dofs_per_cell < 1) fail(Errc::invalid_argument, "dofs per cell must be >= 1");
    if (rank < 0 || rank >= part.np) fail(Errc::invalid_argument, "rank out of range");
    std::vector<Index> cell_offset(part.np + 1, 0);
    for (int p = 0; p < part.np; ++p) cell_offset[p + 1] = cell_offset[p] + static_cast<Index>(part.members[p].size());
    std::vector<Index> offsets(part.np + 1);
    for (int p = 0; p <= part.np; ++p) offsets[p] = cell_offset[p] * dofs_per_cell;

    std::set<Index> halo_cells;
    for (Index g : part.members[rank]) {
        for (int face = 0; face < kFaces; ++face) {
            auto nb = grid.neighbor(g, face);
            if (nb && part.owner[*nb] != rank) halo_cells.insert(*nb);
        }
    }
    std::vector<Index> halo;
    halo.reserve(halo_cells.size() * dofs_per_cell);
    for (Index nb : halo_cells) {
        const Index row0 = (cell_offset[part.owner[nb]] + part.local_index[nb]) * dofs_per_cell;
        for (int u = 0; u < dofs_per_cell; ++u) halo.push_back(row0 + u);
    }
    std::sort(halo.begin(), halo.end());
    return std::make_shared<const IndexMap>(rank, std::move(offsets), std::move(halo));
}

}  // namespace resim
