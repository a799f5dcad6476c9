#include <gtest/gtest.h>

#include <random>
#include <set>

#include "resim/index_map.hpp"

using namespace resim;

TEST(IndexMap, BlockDistribution) {
    auto m = IndexMap::block(0, 3, 8);
    EXPECT_EQ(std::vector<Index>(m->offsets().begin(), m->offsets().end()), (std::vector<Index>{0, 3, 6, 8}));
    EXPECT_EQ(m->nlocal(), 3);
    EXPECT_EQ(m->ntlocal(), 3);
    auto last = IndexMap::block(2, 3, 8);
    EXPECT_EQ(last->nlocal(), 2);
    EXPECT_EQ(last->owner(5), 1);
    EXPECT_EQ(last->owner(7), 2);
}

TEST(IndexMap, HaloLookup) {
    IndexMap m(1, {0, 4, 8, 12}, {2, 9, 11});
    EXPECT_EQ(m.nlocal(), 4);
    EXPECT_EQ(m.ntlocal(), 7);
    EXPECT_EQ(m.global_to_local(5), 1);
    EXPECT_EQ(m.global_to_local(9), 5);
    EXPECT_EQ(m.global_to_local(10), std::nullopt);
    EXPECT_EQ(m.local_to_global(4), 2);
    for (Index l = 0; l < m.ntlocal(); ++l) EXPECT_EQ(m.global_to_local(m.local_to_global(l)), l);
}

TEST(IndexMap, RejectsBadInput) {
    EXPECT_THROW(IndexMap(0, {0, 2, 1}), Error);
    EXPECT_THROW(IndexMap(0, {0, 2, 4}, {3, 2}), Error);
    EXPECT_THROW(IndexMap(0, {0, 2, 4}, {1}), Error);
    EXPECT_THROW(IndexMap(2, {0, 2, 4}), Error);
}

TEST(CommPlan, EmptyHaloIsNoop) {
    spawn_ranks(3, [](Comm& c) {
        auto m = IndexMap::block(c.rank(), 3, 9);
        auto plan = CommPlan::build(c, *m);
        EXPECT_EQ(plan.send_size(), 0);
        EXPECT_EQ(plan.recv_size(), 0);
        std::vector<double> v(3, 1.0);
        plan.exchange(c, v);
        EXPECT_EQ(v, std::vector<double>(3, 1.0));
    });
}

TEST(CommPlan, ExchangeDeliversOwnerValues) {
    const int np = 4;
    const Index n = 23;
    for (int bound : {0, 1}) {
        spawn_ranks(np, [&](Comm& c) {
            auto base = IndexMap::block(c.rank(), np, n);
            std::mt19937 rng(c.rank() + 1);
            std::set<Index> halo;
            for (int t = 0; t < 6; ++t) {
                Index g = static_cast<Index>(rng() % n);
                if (!base->owns(g)) halo.insert(g);
            }
            auto m = base->with_halo({halo.begin(), halo.end()});
            auto plan = CommPlan::build(c, *m);
            // plan symmetry
            auto sends = c.allgatherv<int>(plan.send_counts());
            auto recvs = c.allgatherv<int>(plan.recv_counts());
            for (int p = 0; p < np; ++p) {
                for (int q = 0; q < np; ++q) EXPECT_EQ(sends[p][q], recvs[q][p]);
            }
            for (int block : {1, 3}) {
                std::vector<double> v(m->ntlocal() * block, -1.0);
                for (Index i = 0; i < m->nlocal(); ++i) {
                    for (int b = 0; b < block; ++b) v[i * block + b] = static_cast<double>((m->first() + i) * 10 + b);
                }
                plan.exchange(c, v, block);
                auto first = v;
                plan.exchange(c, v, block);
                EXPECT_EQ(first, v);
                for (Index l = m->nlocal(); l < m->ntlocal(); ++l) {
                    for (int b = 0; b < block; ++b) {
                        EXPECT_EQ(v[l * block + b], static_cast<double>(m->local_to_global(l) * 10 + b));
                    }
                }
            }
        }, GroupOptions{bound});
    }
}

TEST(CommPlan, ReverseAddAccumulatesIntoOwners) {
    const int np = 3;
    auto out = spawn_ranks(np, [&](Comm& c) {
        auto base = IndexMap::block(c.rank(), np, 6);
        std::vector<Index> halo;
        for (Index g = 0; g < 6; ++g) {
            if (!base->owns(g)) halo.push_back(g);
        }
        auto m = base->with_halo(halo);
        auto plan = CommPlan::build(c, *m);
        std::vector<double> owned(m->nlocal(), 0.0);
        std::vector<double> contrib(halo.size(), 1.0);
        plan.reverse_add(c, contrib, owned);
        return owned;
    });
    for (auto& v : out) {
        for (double x : v) EXPECT_EQ(x, 2.0);
    }
}

TEST(CommPlan, InconsistentPlansDetected) {
    try {
        spawn_ranks(2, [](Comm& c) {
            // rank 0 claims to send one value to rank 1; rank 1 expects two
            if (c.rank() == 0) {
                CommPlan p(1, {0, 1}, {0}, {0, 0}, {});
                p.validate(c);
            } else {
                CommPlan p(1, {0, 0}, {}, {2, 0}, {1, 2});
                p.validate(c);
            }
        });
        FAIL();
    } catch (const RankFailure& e) {
        EXPECT_EQ(e.code(), Errc::plan_mismatch);
    }
}
