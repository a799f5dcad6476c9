#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "resim/partition.hpp"

using namespace resim;

namespace {

StructuredGrid make_grid(Index x, Index y, Index z) {
    GridSpec s;
    s.ncx = x;
    s.ncy = y;
    s.ncz = z;
    return StructuredGrid(s);
}

const sfc::Encoder kEncoders[] = {sfc::Encoder::hilbert_3d_table, sfc::Encoder::hilbert_nd, sfc::Encoder::morton};

// Independent face counter: enumerate every face of the lattice once.
void brute_surface(const StructuredGrid& g, const Partition& p, std::vector<Index>& b, std::vector<Index>& f) {
    b.assign(p.np, 0);
    f.assign(p.np, 0);
    const auto& s = g.spec();
    auto owner = [&](Index i, Index j, Index k) { return p.owner[g.global_index({i, j, k})]; };
    const Index n[3] = {s.ncx, s.ncy, s.ncz};
    for (int a = 0; a < 3; ++a) {
        Index m[3] = {n[0], n[1], n[2]};
        m[a] += 1;  // face planes along axis a
        for (Index k = 0; k < m[2]; ++k)
            for (Index j = 0; j < m[1]; ++j)
                for (Index i = 0; i < m[0]; ++i) {
                    Index c[3] = {i, j, k};
                    const bool lo_in = c[a] > 0;
                    const bool hi_in = c[a] < n[a];
                    Index lo[3] = {i, j, k};
                    lo[a] -= 1;
                    if (lo_in && hi_in) {
                        const int r1 = owner(lo[0], lo[1], lo[2]);
                        const int r2 = owner(i, j, k);
                        if (r1 == r2) {
                            f[r1]++;
                        } else {
                            f[r1]++;
                            f[r2]++;
                            b[r1]++;
                            b[r2]++;
                        }
                    } else if (lo_in) {
                        f[owner(lo[0], lo[1], lo[2])]++;
                    } else {
                        f[owner(i, j, k)]++;
                    }
                }
    }
}

}  // namespace

TEST(PartitionSfc, SingleRank) {
    auto g = make_grid(3, 2, 2);
    for (auto e : kEncoders) {
        auto p = partition_sfc(g, 1, e);
        EXPECT_TRUE(std::all_of(p.owner.begin(), p.owner.end(), [](int r) { return r == 0; }));
    }
}

TEST(PartitionSfc, LineGrid) {
    auto g = make_grid(4, 1, 1);
    for (auto e : kEncoders) {
        auto p = partition_sfc(g, 2, e);
        EXPECT_EQ(p.owner, (std::vector<int>{0, 0, 1, 1})) << to_string(e);
    }
}

TEST(PartitionSfc, SquareHalvesAreContiguous) {
    auto g = make_grid(4, 4, 1);
    auto p = partition_sfc(g, 2, sfc::Encoder::hilbert_3d_table);
    for (int r = 0; r < 2; ++r) {
        ASSERT_EQ(p.members[r].size(), 8u);
        // connected: flood fill inside the rank
        std::set<Index> seen = {p.members[r][0]};
        std::vector<Index> stack = {p.members[r][0]};
        while (!stack.empty()) {
            Index c = stack.back();
            stack.pop_back();
            for (int f = 0; f < kFaces; ++f) {
                auto nb = g.neighbor(c, f);
                if (nb && p.owner[*nb] == r && seen.insert(*nb).second) stack.push_back(*nb);
            }
        }
        EXPECT_EQ(seen.size(), 8u);
    }
}

TEST(PartitionSfc, BalancedAndValid) {
    for (auto dims : {std::array<Index, 3>{7, 5, 3}, {8, 8, 8}, {16, 4, 1}, {32, 32, 32}}) {
        auto g = make_grid(dims[0], dims[1], dims[2]);
        for (int np : {2, 4, 8, 16, 32}) {
            for (auto e : kEncoders) {
                auto p = partition_sfc(g, np, e);
                ASSERT_TRUE(p.satisfies_subgrid_conditions());
                Index lo = g.ncells(), hi = 0;
                for (auto& m : p.members) {
                    lo = std::min<Index>(lo, m.size());
                    hi = std::max<Index>(hi, m.size());
                }
                EXPECT_LE(hi - lo, 1);
            }
        }
    }
}

TEST(PartitionSfc, TooManyRanks) {
    auto g = make_grid(2, 2, 1);
    try {
        partition_sfc(g, 5, sfc::Encoder::morton);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::too_many_ranks);
    }
}

TEST(PartitionSfc, CollectiveMatchesSerial) {
    auto g = make_grid(6, 5, 4);
    for (int np : {1, 3, 8}) {
        for (auto e : kEncoders) {
            auto serial = partition_sfc(g, np, e);
            auto parts = spawn_ranks(np, [&](Comm& c) { return partition_sfc(c, g, e).owner; });
            for (auto& o : parts) EXPECT_EQ(o, serial.owner);
        }
    }
}

TEST(PartitionSfc, NonUniformGrid) {
    GridSpec s;
    s.ncx = 6;
    s.ncy = 3;
    s.vx = {0, 0.01, 0.02, 0.5, 0.9, 0.95, 1.0};
    StructuredGrid g(s);
    auto p = partition_sfc(g, 4, sfc::Encoder::hilbert_3d_table);
    EXPECT_TRUE(p.satisfies_subgrid_conditions());
}

TEST(PartitionBlock, Sizes) {
    auto g = make_grid(8, 1, 1);
    auto p = partition_block(g, 3);
    EXPECT_EQ(p.size(0), 3);
    EXPECT_EQ(p.size(1), 3);
    EXPECT_EQ(p.size(2), 2);
    EXPECT_TRUE(p.satisfies_subgrid_conditions());
    auto one = partition_block(g, 8);
    for (int r = 0; r < 8; ++r) EXPECT_EQ(one.members[r], std::vector<Index>{r});
}

TEST(Partition, SubgridConditionViolations) {
    auto p = Partition::from_owner(3, {0, 0, 1, 1});
    EXPECT_FALSE(p.satisfies_subgrid_conditions());
    p = Partition::from_owner(2, {0, 1, 1, 0});
    EXPECT_TRUE(p.satisfies_subgrid_conditions());
    p.members[1].push_back(0);
    EXPECT_FALSE(p.satisfies_subgrid_conditions());
}

TEST(Metrics, LoadImbalance) {
    EXPECT_DOUBLE_EQ(load_imbalance(Partition::from_owner(2, {0, 0, 1, 1})), 1.0);
    std::vector<int> owner(16, 1);
    std::fill(owner.begin(), owner.begin() + 6, 0);
    EXPECT_DOUBLE_EQ(load_imbalance(Partition::from_owner(2, owner)), 1.25);
    std::vector<int> skew(10, 1);
    skew[0] = 0;
    EXPECT_DOUBLE_EQ(load_imbalance(Partition::from_owner(2, skew)), 2.0 * 9 / 10);
}

TEST(Metrics, SurfaceIndicesExamples) {
    auto g1 = make_grid(3, 3, 2);
    auto s1 = surface_indices(g1, partition_block(g1, 1));
    EXPECT_EQ(s1.max, 0.0);
    EXPECT_EQ(s1.global, 0.0);
    EXPECT_EQ(s1.average, 0.0);

    auto g = make_grid(2, 1, 1);
    auto s = surface_indices(g, partition_block(g, 2));
    EXPECT_DOUBLE_EQ(s.max, 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(s.global, 0.2);
    EXPECT_DOUBLE_EQ(s.average, 1.0 / 6.0);
}

TEST(Metrics, SurfaceMatchesBruteForce) {
    auto g = make_grid(6, 5, 4);
    for (int np : {2, 5, 7}) {
        for (auto e : kEncoders) {
            auto p = partition_sfc(g, np, e);
            auto s = surface_indices(g, p);
            std::vector<Index> b, f;
            brute_surface(g, p, b, f);
            EXPECT_EQ(s.b, b);
            EXPECT_EQ(s.f, f);
            for (int r = 0; r < np; ++r) EXPECT_LE(s.b[r], s.f[r]);
        }
    }
}

TEST(Metrics, InvariantUnderRelabeling) {
    auto g = make_grid(5, 4, 3);
    auto p = partition_sfc(g, 4, sfc::Encoder::morton);
    std::vector<int> relabel(p.owner.size());
    for (std::size_t i = 0; i < relabel.size(); ++i) relabel[i] = 3 - p.owner[i];
    auto q = Partition::from_owner(4, relabel);
    auto a = partition_quality(g, p);
    auto b = partition_quality(g, q);
    EXPECT_EQ(a.surface.max, b.surface.max);
    EXPECT_EQ(a.surface.global, b.surface.global);
    EXPECT_EQ(a.surface.average, b.surface.average);
    EXPECT_EQ(a.connectivity.max, b.connectivity.max);
    EXPECT_EQ(a.load_imbalance, b.load_imbalance);
}

TEST(Metrics, Connectivity) {
    auto g = make_grid(3, 1, 1);
    auto c = connectivity(g, partition_block(g, 3));
    EXPECT_EQ(c.per_rank, (std::vector<int>{1, 2, 1}));
    EXPECT_EQ(c.max, 2);
    EXPECT_EQ(connectivity(g, partition_block(g, 1)).max, 0);
    auto big = make_grid(6, 6, 6);
    for (int np : {2, 9, 27}) {
        auto cc = connectivity(big, partition_sfc(big, np, sfc::Encoder::hilbert_3d_table));
        EXPECT_LE(cc.max, np - 1);
    }
}

TEST(IndexMapFromGrid, Examples) {
    auto g = make_grid(2, 1, 1);
    auto p = partition_block(g, 2);
    for (int r = 0; r < 2; ++r) {
        auto m = build_index_map(g, p, r, 1);
        EXPECT_EQ(std::vector<Index>(m->offsets().begin(), m->offsets().end()), (std::vector<Index>{0, 1, 2}));
        EXPECT_EQ(m->nlocal(), 1);
        EXPECT_EQ(m->ntlocal(), 2);
    }
    auto single = build_index_map(g, partition_block(g, 1), 0, 3);
    EXPECT_EQ(single->nlocal(), 6);
    EXPECT_EQ(single->ntlocal(), 6);
}

TEST(IndexMapFromGrid, RowsGroupedByCell) {
    auto g = make_grid(4, 3, 2);
    auto p = partition_sfc(g, 3, sfc::Encoder::hilbert_3d_table);
    std::set<Index> rows;
    for (Index c = 0; c < g.ncells(); ++c) {
        for (int u = 0; u < 2; ++u) {
            const Index row = cell_row(p, c, 2, u);
            rows.insert(row);
            auto m = build_index_map(g, p, p.owner[c], 2);
            EXPECT_TRUE(m->owns(row));
        }
        EXPECT_EQ(cell_row(p, c, 2, 1), cell_row(p, c, 2, 0) + 1);
    }
    EXPECT_EQ(rows.size(), static_cast<std::size_t>(g.ncells() * 2));
}
