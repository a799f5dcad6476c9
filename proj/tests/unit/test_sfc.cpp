#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>

#include "resim/sfc.hpp"

using namespace resim;
using namespace resim::sfc;

namespace {

std::vector<std::vector<std::uint32_t>> lattice(unsigned n, unsigned m) {
    const std::uint32_t side = 1u << m;
    std::uint64_t total = 1;
    for (unsigned i = 0; i < n; ++i) total *= side;
    std::vector<std::vector<std::uint32_t>> out;
    out.reserve(total);
    for (std::uint64_t t = 0; t < total; ++t) {
        std::vector<std::uint32_t> c(n);
        std::uint64_t rest = t;
        for (unsigned i = 0; i < n; ++i) {
            c[n - 1 - i] = static_cast<std::uint32_t>(rest % side);
            rest /= side;
        }
        out.push_back(std::move(c));
    }
    return out;
}

bool face_adjacent(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    int diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
        if (d > 1) return false;
        diff += static_cast<int>(d);
    }
    return diff == 1;
}

// Sorts lattice points by key; returns false if two points share a key.
template <class Enc>
bool curve_order(unsigned n, unsigned m, Enc enc, std::vector<std::vector<std::uint32_t>>& ordered) {
    std::map<std::uint64_t, std::vector<std::uint32_t>> by_key;
    for (auto& c : lattice(n, m)) {
        if (!by_key.emplace(enc(c).packed(), c).second) return false;
    }
    ordered.clear();
    std::uint64_t expect = 0;
    for (auto& [k, c] : by_key) {
        if (k != expect++) return false;
        ordered.push_back(c);
    }
    return true;
}

}  // namespace

TEST(GrayCode, ForwardExamples) {
    const std::uint8_t z[] = {0, 0};
    const std::uint8_t one_one[] = {1, 1};
    const std::uint8_t one_zero[] = {1, 0};
    EXPECT_EQ(gray_forward(z), 0u);
    EXPECT_EQ(gray_forward(one_one), 2u);
    EXPECT_EQ(gray_forward(one_zero), 3u);
}

TEST(GrayCode, BackwardExamples) {
    EXPECT_EQ(gray_backward(0, 2), (std::vector<std::uint8_t>{0, 0}));
    EXPECT_EQ(gray_backward(2, 2), (std::vector<std::uint8_t>{1, 1}));
}

TEST(GrayCode, RoundTripExhaustive) {
    for (unsigned n = 1; n <= 6; ++n) {
        std::set<std::vector<std::uint8_t>> seen;
        for (unsigned j = 0; j < (1u << n); ++j) {
            auto b = gray_backward(j, n);
            EXPECT_EQ(gray_forward(b), j);
            seen.insert(b);
        }
        EXPECT_EQ(seen.size(), 1u << n);
    }
}

TEST(GrayCode, Errors) {
    try {
        gray_forward({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_argument);
    }
    try {
        gray_backward(4, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_argument);
    }
}

TEST(Generators, SwapMaskHasTwoBitsOrIdentity) {
    for (unsigned n = 2; n <= 4; ++n) {
        auto g = hilbert_generators(n);
        ASSERT_EQ(g.size(), 1u << n);
        for (auto& e : g) {
            EXPECT_TRUE(e.swap == 0 || std::popcount(e.swap) == 2);
            EXPECT_LT(e.swap, 1u << n);
            EXPECT_LT(e.reflect, 1u << n);
        }
    }
    try {
        hilbert_generators(5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unsupported_dimension);
    }
}

TEST(Tables3d, RowsArePermutationsAndStatesInRange) {
    const auto& t = hilbert3d_tables();
    for (int s = 0; s < 24; ++s) {
        std::array<std::uint8_t, 8> row = t.ordering[s];
        std::sort(row.begin(), row.end());
        for (int i = 0; i < 8; ++i) EXPECT_EQ(row[i], i);
        for (auto o : t.orientation[s]) EXPECT_LT(o, 24);
    }
    EXPECT_EQ(t.ordering[0][1], 7);
}

TEST(HilbertNd, OriginIsZero) {
    for (unsigned n = 2; n <= 4; ++n) {
        for (unsigned m = 1; m <= 5; ++m) {
            std::vector<std::uint32_t> c(n, 0);
            auto k = hilbert_encode_nd(c, m);
            EXPECT_EQ(k.level(), m);
            EXPECT_EQ(k.packed(), 0u);
            EXPECT_EQ(k.normalized(), 0.0);
        }
    }
}

TEST(HilbertNd, BijectiveAndAdjacent) {
    for (unsigned n = 2; n <= 4; ++n) {
        const unsigned max_m = n == 4 ? 3 : 5;
        for (unsigned m = 1; m <= max_m; ++m) {
            std::vector<std::vector<std::uint32_t>> ordered;
            ASSERT_TRUE(curve_order(n, m, [&](auto& c) { return hilbert_encode_nd(c, m); }, ordered))
                << "n=" << n << " m=" << m;
            for (std::size_t i = 1; i < ordered.size(); ++i) {
                ASSERT_TRUE(face_adjacent(ordered[i - 1], ordered[i])) << "n=" << n << " m=" << m << " i=" << i;
            }
        }
    }
}

TEST(HilbertNd, UnsupportedDimension) {
    std::vector<std::uint32_t> c(5, 0);
    try {
        hilbert_encode_nd(c, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unsupported_dimension);
    }
}

TEST(Hilbert3dTable, Examples) {
    auto k0 = hilbert_encode_3d_table({0, 0, 0}, 1);
    EXPECT_EQ(k0.digits()[0], 0u);
    EXPECT_EQ(k0.normalized(), 0.0);
    auto k1 = hilbert_encode_3d_table({0, 0, 1}, 1);
    EXPECT_EQ(k1.digits()[0], 7u);
    EXPECT_DOUBLE_EQ(k1.normalized(), 7.0 / 8.0);
}

TEST(Hilbert3dTable, BijectiveAndAdjacent) {
    for (unsigned m = 1; m <= 5; ++m) {
        std::vector<std::vector<std::uint32_t>> ordered;
        ASSERT_TRUE(curve_order(3, m, [&](auto& c) { return hilbert_encode_3d_table({c[0], c[1], c[2]}, m); },
                                ordered));
        for (std::size_t i = 1; i < ordered.size(); ++i) {
            ASSERT_TRUE(face_adjacent(ordered[i - 1], ordered[i])) << "m=" << m << " i=" << i;
        }
    }
}

TEST(Hilbert3dTable, LevelLimit) {
    EXPECT_NO_THROW(hilbert_encode_3d_table({0, 0, 0}, 30));
    EXPECT_THROW(hilbert_encode_3d_table({0, 0, 0}, 31), Error);
}

TEST(Morton, Examples) {
    auto key = [](std::uint32_t x, std::uint32_t y, unsigned m) {
        std::uint32_t c[] = {x, y};
        return morton_encode(c, m).packed();
    };
    EXPECT_EQ(key(0, 0, 1), 0u);
    EXPECT_EQ(key(1, 0, 1), 2u);
    EXPECT_EQ(key(0, 1, 1), 1u);
    EXPECT_EQ(key(1, 1, 1), 3u);
}

TEST(Morton, HasJumps) {
    for (unsigned m = 2; m <= 5; ++m) {
        std::vector<std::vector<std::uint32_t>> ordered;
        ASSERT_TRUE(curve_order(2, m, [&](auto& c) { return morton_encode(c, m); }, ordered));
        EXPECT_FALSE(face_adjacent(ordered[3], ordered[4]));
    }
}

TEST(Keys, PrefixConsistency) {
    for (unsigned m = 2; m <= 5; ++m) {
        for (auto& c : lattice(3, m)) {
            std::vector<std::uint32_t> coarse = {c[0] >> 1, c[1] >> 1, c[2] >> 1};
            EXPECT_EQ(hilbert_encode_nd(c, m).truncated(m - 1), hilbert_encode_nd(coarse, m - 1));
            EXPECT_EQ(hilbert_encode_3d_table({c[0], c[1], c[2]}, m).truncated(m - 1),
                      hilbert_encode_3d_table({coarse[0], coarse[1], coarse[2]}, m - 1));
            EXPECT_EQ(morton_encode(c, m).truncated(m - 1), morton_encode(coarse, m - 1));
        }
    }
}

TEST(Keys, OrderingMatchesPacked) {
    std::uint32_t a[] = {3, 1, 2};
    std::uint32_t b[] = {0, 2, 3};
    auto ka = hilbert_encode_nd(a, 2);
    auto kb = hilbert_encode_nd(b, 2);
    EXPECT_EQ(ka < kb, ka.packed() < kb.packed());
}

TEST(Keys, LongKeysAreExact) {
    std::uint32_t a[] = {0, 0, 1};
    std::uint32_t b[] = {0, 0, 2};
    auto ka = hilbert_encode_nd(a, 25);
    auto kb = hilbert_encode_nd(b, 25);
    EXPECT_NE(ka, kb);
    EXPECT_THROW((void)ka.packed(), Error);
}

TEST(Coordinates, OutOfRange) {
    std::uint32_t c[] = {4, 0};
    try {
        morton_encode(c, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::invalid_coordinate);
    }
}

TEST(UnitCube, Examples) {
    Box3 box{{0, 0, 0}, {2, 2, 2}};
    auto u = normalize_to_unit_cube({1, 1, 1}, box);
    EXPECT_EQ(u, (std::array<double, 3>{0.5, 0.5, 0.5}));
    u = normalize_to_unit_cube({0, 0, 0}, box);
    EXPECT_EQ(u, (std::array<double, 3>{0, 0, 0}));
    Box3 box2{{1, 0, 0}, {3, 4, 1}};
    u = normalize_to_unit_cube({2, 2, 0.5}, box2);
    EXPECT_EQ(u, (std::array<double, 3>{0.5, 0.5, 0.5}));
}

TEST(UnitCube, UpperFaceClampedBelowOne) {
    Box3 box{{0, 0, 0}, {2, 2, 2}};
    auto u = normalize_to_unit_cube({2, 2, 2}, box);
    for (double v : u) {
        EXPECT_LT(v, 1.0);
        EXPECT_EQ(to_lattice(v, 4), 15u);
    }
}

TEST(UnitCube, DegenerateBox) {
    Box3 box{{0, 0, 0}, {1, 0, 1}};
    try {
        normalize_to_unit_cube({0, 0, 0}, box);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::degenerate_domain);
    }
}

TEST(Encoders, NamesRoundTrip) {
    for (auto e : {Encoder::hilbert_nd, Encoder::hilbert_3d_table, Encoder::morton}) {
        EXPECT_EQ(encoder_from_string(to_string(e)), e);
    }
    EXPECT_THROW(encoder_from_string("peano"), Error);
}
