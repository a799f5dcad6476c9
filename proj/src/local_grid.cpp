#include "resim/local_grid.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace resim {

LocalGrid::LocalGrid(std::shared_ptr<const StructuredGrid> grid, const Partition& part, int rank)
    : grid_(std::move(grid)), rank_(rank) {
    if (rank < 0 || rank >= part.np) fail(Errc::invalid_argument, "rank out of range");
    if (part.ncells() != grid_->ncells()) fail(Errc::invalid_argument, "partition does not match grid");
    owned_ = part.members[rank];
    map_ = build_index_map(*grid_, part, rank, 1);

    // Remote slots follow the halo order of the cell map (ascending row).
    std::map<Index, Index> slot_of_row;
    for (std::size_t s = 0; s < map_->halo_globals().size(); ++s) slot_of_row[map_->halo_globals()[s]] = static_cast<Index>(s);
    remote_.resize(slot_of_row.size());

    nbrs_.resize(owned_.size());
    for (std::size_t l = 0; l < owned_.size(); ++l) {
        const Index g = owned_[l];
        for (int f = 0; f < kFaces; ++f) {
            auto& ref = nbrs_[l][f];
            auto nb = grid_->neighbor(g, f);
            if (!nb) {
                ref = {NeighborRef::boundary, -1, kBoundaryClosed};
            } else if (part.owner[*nb] == rank) {
                ref = {NeighborRef::local, part.local_index[*nb], 0};
            } else {
                const Index slot = slot_of_row.at(cell_row(part, *nb, 1));
                remote_[slot] = {*nb, part.owner[*nb], part.local_index[*nb]};
                ref = {NeighborRef::remote, slot, 0};
            }
        }
    }
}

Cell LocalGrid::cell(Index local) const {
    if (local < 0 || local >= nowned()) fail(Errc::invalid_argument, "local cell index out of range");
    Cell c = grid_->cell(owned_[local]);
    c.local_index = local;
    return c;
}

std::array<NeighborRef, kFaces> LocalGrid::neighbors(Index local) const {
    if (local < 0 || local >= nowned()) fail(Errc::invalid_argument, "local cell index out of range");
    return nbrs_[local];
}

void LocalGrid::build_comm_plan(Comm& comm) { plan_ = CommPlan::build(comm, *map_); }

DofField::DofField(std::shared_ptr<const LocalGrid> local, std::string name, DofKind kind, int dim)
    : local_(std::move(local)), name_(std::move(name)), kind_(kind), dim_(dim) {
    if (dim < 1) fail(Errc::invalid_argument, "dof dimension must be >= 1");
    if (kind == DofKind::constant) {
        values_.assign(dim, 0.0);
    } else {
        values_.assign(static_cast<std::size_t>(dim) * local_->nowned(), 0.0);
        halo_.assign(static_cast<std::size_t>(dim) * local_->remote_neighbors().size(), 0.0);
    }
}

double DofField::halo_value(Index slot, int c) const {
    if (kind_ == DofKind::constant) return values_.at(c);
    return halo_.at(static_cast<std::size_t>(slot) * dim_ + c);
}

void DofField::halo_exchange(Comm& comm) {
    const CommPlan* plan = local_->comm_plan();
    if (plan == nullptr) fail(Errc::not_assembled, "halo exchange on '" + name_ + "' before the comm plan was built");
    if (kind_ == DofKind::constant) return;
    plan->exchange(comm, values_, halo_, dim_);
}

DofField dof_create(std::shared_ptr<const LocalGrid> local, std::string name, DofKind kind, int dim) {
    return DofField(std::move(local), std::move(name), kind, dim);
}

void write_field_csv(Comm& comm, const DofField& field, const std::string& path) {
    const auto& local = field.local_grid();
    const int dim = field.dim();
    std::vector<double> mine;
    mine.reserve(local.nowned() * (dim + 1));
    for (Index l = 0; l < local.nowned(); ++l) {
        mine.push_back(static_cast<double>(local.owned_cells()[l]));
        for (int c = 0; c < dim; ++c) {
            mine.push_back(field.kind() == DofKind::constant ? field.values()[c] : field.values()[l * dim + c]);
        }
    }
    auto all = comm.allgatherv<double>(mine);
    if (comm.rank() != 0) return;
    std::vector<std::pair<Index, const double*>> rows;
    for (const auto& part : all) {
        for (std::size_t at = 0; at < part.size(); at += dim + 1) {
            rows.emplace_back(static_cast<Index>(part[at]), &part[at + 1]);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ofstream out(path);
    if (!out) fail(Errc::io_error, "cannot write " + path);
    out << "global_index";
    for (int c = 0; c < dim; ++c) out << ',' << field.name() << '_' << c;
    out << '\n';
    char buf[32];
    for (const auto& [g, v] : rows) {
        out << g;
        for (int c = 0; c < dim; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", v[c]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace resim
