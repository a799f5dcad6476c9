#include "resim/index_map.hpp"

#include <algorithm>
#include <string>

namespace resim {

IndexMap::IndexMap(int rank, std::vector<Index> offsets, std::vector<Index> halo_globals)
    : rank_(rank), offsets_(std::move(offsets)), halo_(std::move(halo_globals)) {
    if (offsets_.size() < 2 || rank_ < 0 || rank_ >= nprocs()) {
        fail(Errc::invalid_argument, "index map needs offsets for every rank");
    }
    if (offsets_.front() != 0 || !std::is_sorted(offsets_.begin(), offsets_.end())) {
        fail(Errc::invalid_argument, "index map offsets must be monotone and start at 0");
    }
    if (!std::is_sorted(halo_.begin(), halo_.end()) ||
        std::adjacent_find(halo_.begin(), halo_.end()) != halo_.end()) {
        fail(Errc::invalid_argument, "halo globals must be sorted and unique");
    }
    for (Index g : halo_) {
        if (g < 0 || g >= nglobal() || owns(g)) {
            fail(Errc::invalid_argument, "halo global " + std::to_string(g) + " is owned or out of range");
        }
    }
}

std::shared_ptr<const IndexMap> IndexMap::block(int rank, int nprocs, Index nglobal) {
    if (nprocs < 1 || nglobal < 0) fail(Errc::invalid_argument, "bad block distribution");
    std::vector<Index> offsets(nprocs + 1);
    const Index base = nglobal / nprocs;
    const Index extra = nglobal % nprocs;
    for (int p = 0; p < nprocs; ++p) offsets[p + 1] = offsets[p] + base + (p < extra ? 1 : 0);
    return std::make_shared<const IndexMap>(rank, std::move(offsets));
}

std::shared_ptr<const IndexMap> IndexMap::from_local_size(Comm& comm, Index nlocal) {
    auto sizes = comm.allgather(nlocal);
    std::vector<Index> offsets(sizes.size() + 1, 0);
    for (std::size_t p = 0; p < sizes.size(); ++p) offsets[p + 1] = offsets[p] + sizes[p];
    return std::make_shared<const IndexMap>(comm.rank(), std::move(offsets));
}

int IndexMap::owner(Index g) const {
    if (g < 0 || g >= nglobal()) fail(Errc::invalid_argument, "global index " + std::to_string(g) + " out of range");
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), g);
    return static_cast<int>(it - offsets_.begin()) - 1;
}

Index IndexMap::local_to_global(Index local) const {
    if (local < 0 || local >= ntlocal()) fail(Errc::invalid_argument, "local index out of range");
    return local < nlocal() ? first() + local : halo_[local - nlocal()];
}

std::optional<Index> IndexMap::global_to_local(Index g) const {
    if (owns(g)) return g - first();
    auto it = std::lower_bound(halo_.begin(), halo_.end(), g);
    if (it != halo_.end() && *it == g) return nlocal() + (it - halo_.begin());
    return std::nullopt;
}

std::shared_ptr<const IndexMap> IndexMap::with_halo(std::vector<Index> halo_globals) const {
    return std::make_shared<const IndexMap>(rank_, offsets_, std::move(halo_globals));
}

bool IndexMap::same_distribution(const IndexMap& other) const noexcept {
    return rank_ == other.rank_ && offsets_ == other.offsets_;
}

namespace {

std::vector<int> displacements(const std::vector<int>& counts) {
    std::vector<int> d(counts.size(), 0);
    for (std::size_t p = 1; p < counts.size(); ++p) d[p] = d[p - 1] + counts[p - 1];
    return d;
}

}  // namespace

CommPlan::CommPlan(Index nlocal, std::vector<int> send_counts, std::vector<Index> send_index,
                   std::vector<int> recv_counts, std::vector<Index> write_index)
    : nlocal_(nlocal), scnts_(std::move(send_counts)), rcnts_(std::move(recv_counts)),
      sidx_(std::move(send_index)), widx_(std::move(write_index)) {
    sdsps_ = displacements(scnts_);
    rdsps_ = displacements(rcnts_);
    auto total = [](const std::vector<int>& c) {
        Index s = 0;
        for (int v : c) s += v;
        return s;
    };
    if (total(scnts_) != send_size() || total(rcnts_) != recv_size()) {
        fail(Errc::plan_mismatch, "communication plan counts do not match index lists");
    }
}

CommPlan CommPlan::build(Comm& comm, const IndexMap& map) {
    const int np = comm.size();
    if (map.nprocs() != np || map.rank() != comm.rank()) {
        fail(Errc::map_mismatch, "index map does not belong to this communicator");
    }
    // Ask each owner for the halo entries it holds; halo is sorted so the
    // request lists are sorted and the reply order equals the halo order.
    std::vector<std::vector<Index>> requests(np);
    std::vector<int> recv_counts(np, 0);
    std::vector<Index> write_index;
    write_index.reserve(map.halo_globals().size());
    std::vector<std::vector<Index>> slots(np);
    Index slot = map.nlocal();
    for (Index g : map.halo_globals()) {
        const int p = map.owner(g);
        requests[p].push_back(g);
        slots[p].push_back(slot++);
    }
    for (int p = 0; p < np; ++p) {
        recv_counts[p] = static_cast<int>(requests[p].size());
        write_index.insert(write_index.end(), slots[p].begin(), slots[p].end());
    }

    auto incoming = comm.alltoallv(requests);
    std::vector<int> send_counts(np, 0);
    std::vector<Index> send_index;
    for (int p = 0; p < np; ++p) {
        send_counts[p] = static_cast<int>(incoming[p].size());
        for (Index g : incoming[p]) {
            if (!map.owns(g)) {
                fail(Errc::plan_mismatch, "rank " + std::to_string(p) + " requested global " +
                                              std::to_string(g) + " which rank " +
                                              std::to_string(comm.rank()) + " does not own");
            }
            send_index.push_back(g - map.first());
        }
    }
    CommPlan plan(map.nlocal(), std::move(send_counts), std::move(send_index), std::move(recv_counts),
                  std::move(write_index));
    plan.validate(comm);
    return plan;
}

void CommPlan::validate(Comm& comm) const {
    const int np = comm.size();
    if (static_cast<int>(scnts_.size()) != np || static_cast<int>(rcnts_.size()) != np) {
        fail(Errc::plan_mismatch, "communication plan has wrong peer count");
    }
    std::vector<std::vector<int>> out(np);
    for (int p = 0; p < np; ++p) out[p] = {scnts_[p]};
    auto in = comm.alltoallv(out);
    for (int p = 0; p < np; ++p) {
        if (in[p].size() != 1 || in[p][0] != rcnts_[p]) {
            fail(Errc::plan_mismatch, "rank " + std::to_string(p) + " sends " +
                                          std::to_string(in[p].empty() ? -1 : in[p][0]) +
                                          " entries but rank " + std::to_string(comm.rank()) +
                                          " expects " + std::to_string(rcnts_[p]));
        }
    }
}

void CommPlan::exchange(Comm& comm, std::span<const double> owned, std::span<double> halo, int block) const {
    const int np = static_cast<int>(scnts_.size());
    const auto b = static_cast<std::size_t>(block);
    std::vector<double> buf;
    for (int p = 0; p < np; ++p) {
        if (scnts_[p] == 0) continue;
        buf.resize(static_cast<std::size_t>(scnts_[p]) * b);
        for (int k = 0; k < scnts_[p]; ++k) {
            const auto src = static_cast<std::size_t>(sidx_[sdsps_[p] + k]) * b;
            for (std::size_t c = 0; c < b; ++c) buf[k * b + c] = owned[src + c];
        }
        comm.send<double>(p, Comm::kTagHalo, buf);
    }
    for (int p = 0; p < np; ++p) {
        if (rcnts_[p] == 0) continue;
        auto data = comm.recv<double>(p, Comm::kTagHalo);
        if (data.size() != static_cast<std::size_t>(rcnts_[p]) * b) {
            fail(Errc::plan_mismatch, "halo message from rank " + std::to_string(p) + " has unexpected size");
        }
        for (int k = 0; k < rcnts_[p]; ++k) {
            const auto dst = static_cast<std::size_t>(widx_[rdsps_[p] + k] - nlocal_) * b;
            for (std::size_t c = 0; c < b; ++c) halo[dst + c] = data[k * b + c];
        }
    }
}

void CommPlan::exchange(Comm& comm, std::span<double> local_values, int block) const {
    const auto split = static_cast<std::size_t>(nlocal_) * block;
    exchange(comm, local_values.first(split), local_values.subspan(split), block);
}

void CommPlan::reverse_add(Comm& comm, std::span<const double> halo, std::span<double> owned, int block) const {
    const int np = static_cast<int>(scnts_.size());
    const auto b = static_cast<std::size_t>(block);
    std::vector<double> buf;
    for (int p = 0; p < np; ++p) {
        if (rcnts_[p] == 0) continue;
        buf.resize(static_cast<std::size_t>(rcnts_[p]) * b);
        for (int k = 0; k < rcnts_[p]; ++k) {
            const auto src = static_cast<std::size_t>(widx_[rdsps_[p] + k] - nlocal_) * b;
            for (std::size_t c = 0; c < b; ++c) buf[k * b + c] = halo[src + c];
        }
        comm.send<double>(p, Comm::kTagReverseHalo, buf);
    }
    for (int p = 0; p < np; ++p) {
        if (scnts_[p] == 0) continue;
        auto data = comm.recv<double>(p, Comm::kTagReverseHalo);
        if (data.size() != static_cast<std::size_t>(scnts_[p]) * b) {
            fail(Errc::plan_mismatch, "reverse halo message from rank " + std::to_string(p) + " has unexpected size");
        }
        for (int k = 0; k < scnts_[p]; ++k) {
            const auto dst = static_cast<std::size_t>(sidx_[sdsps_[p] + k]) * b;
            for (std::size_t c = 0; c < b; ++c) owned[dst + c] += data[k * b + c];
        }
    }
}

}  // namespace resim
