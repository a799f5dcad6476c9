#include "resim/sfc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace resim::sfc {

namespace {

// Gray-code generator tables. Entry r holds (swap mask, reflect mask) for
// digit r; derived from the entry corner / exit direction of each sub-cube.
constexpr HilbertGenerator kGen2[] = {{3, 0}, {0, 0}, {0, 0}, {3, 3}};
constexpr HilbertGenerator kGen3[] = {{5, 0}, {6, 0}, {6, 0}, {0, 3},
                                      {6, 3}, {0, 0}, {6, 6}, {5, 5}};
constexpr HilbertGenerator kGen4[] = {{9, 0},  {10, 0}, {10, 0}, {12, 3},
                                      {10, 3}, {9, 0},  {9, 3},  {0, 3},
                                      {10, 3}, {10, 0}, {10, 0}, {10, 3},
                                      {12, 5}, {0, 0},  {10, 10}, {9, 9}};

// Ordering and orientation tables of the table-driven 3D encoder, row-major
// 24 states x 8 octants.
constexpr unsigned kOrdering3d[] = {
    0, 7, 3, 4, 1, 6, 2, 5, 0, 1, 3, 2, 7, 6, 4, 5,
    0, 3, 7, 4, 1, 2, 6, 5, 2, 3, 5, 4, 1, 0, 6, 7,
    4, 5, 3, 2, 7, 6, 0, 1, 4, 7, 3, 0, 5, 6, 2, 1,
    6, 7, 5, 4, 1, 0, 2, 3, 0, 1, 7, 6, 3, 2, 4, 5,
    2, 1, 5, 6, 3, 0, 4, 7, 6, 1, 5, 2, 7, 0, 4, 3,
    0, 7, 1, 6, 3, 4, 2, 5, 2, 1, 3, 0, 5, 6, 4, 7,
    4, 7, 5, 6, 3, 0, 2, 1, 4, 5, 7, 6, 3, 2, 0, 1,
    6, 1, 7, 0, 5, 2, 4, 3, 0, 3, 1, 2, 7, 4, 6, 5,
    2, 3, 1, 0, 5, 4, 6, 7, 6, 7, 1, 0, 5, 4, 2, 3,
    2, 5, 1, 6, 3, 4, 0, 7, 4, 3, 7, 0, 5, 2, 6, 1,
    4, 3, 5, 2, 7, 0, 6, 1, 6, 5, 1, 2, 7, 4, 0, 3,
    2, 5, 3, 4, 1, 6, 0, 7, 6, 5, 7, 4, 1, 2, 0, 3};

constexpr unsigned kOrientation3d[] = {
    1,  6,  3,  4,  2,  5,  0,  0,  0,  7,  8,  1,  9,  4,  5,  1,
    15, 22, 23, 20, 0,  2,  19, 2,  3,  23, 3,  15, 6,  20, 16, 22,
    11, 4,  12, 4,  20, 1,  22, 13, 22, 12, 20, 11, 5,  0,  5,  19,
    17, 0,  6,  21, 3,  9,  6,  2,  10, 1,  14, 13, 11, 7,  12, 7,
    8,  9,  8,  18, 14, 12, 10, 11, 21, 8,  9,  9,  1,  6,  17, 7,
    7,  17, 15, 12, 16, 13, 10, 10, 11, 14, 9,  5,  11, 22, 0,  8,
    18, 5,  12, 10, 19, 8,  12, 20, 8,  13, 19, 7,  5,  13, 18, 4,
    23, 11, 7,  17, 14, 14, 6,  1,  2,  18, 10, 15, 21, 19, 20, 15,
    16, 21, 17, 19, 16, 2,  3,  18, 6,  10, 16, 14, 17, 23, 17, 15,
    18, 18, 21, 8,  17, 7,  13, 16, 3,  4,  13, 16, 19, 19, 2,  5,
    16, 13, 20, 20, 4,  3,  15, 12, 9,  21, 18, 21, 15, 14, 23, 10,
    22, 22, 6,  1,  23, 11, 4,  3,  14, 23, 2,  9,  22, 23, 21, 0};

Hilbert3dTables make_tables() {
    Hilbert3dTables t{};
    for (int s = 0; s < 24; ++s) {
        for (int o = 0; o < 8; ++o) {
            t.ordering[s][o] = static_cast<std::uint8_t>(kOrdering3d[s * 8 + o]);
            t.orientation[s][o] = static_cast<std::uint8_t>(kOrientation3d[s * 8 + o]);
        }
    }
    return t;
}

void check_lattice(std::span<const std::uint32_t> coord, unsigned level) {
    if (level > 31) fail(Errc::invalid_argument, "curve level must be <= 31");
    const std::uint64_t extent = std::uint64_t{1} << level;
    for (auto c : coord) {
        if (c >= extent) {
            fail(Errc::invalid_coordinate,
                 "lattice component " + std::to_string(c) + " outside level " +
                     std::to_string(level));
        }
    }
}

}  // namespace

double CurveKey::normalized() const noexcept {
    const double base = std::ldexp(1.0, -static_cast<int>(dimension_));
    double scale = base;
    double h = 0.0;
    for (auto d : digits_) {
        h += d * scale;
        scale *= base;
    }
    return h;
}

std::uint64_t CurveKey::packed() const {
    if (dimension_ * digits_.size() > 64) {
        fail(Errc::invalid_argument, "curve key does not fit in 64 bits");
    }
    std::uint64_t v = 0;
    for (auto d : digits_) v = (v << dimension_) | d;
    return v;
}

CurveKey CurveKey::truncated(unsigned level) const {
    if (level > digits_.size()) fail(Errc::invalid_argument, "truncation level exceeds key level");
    return CurveKey(dimension_, std::vector<std::uint32_t>(digits_.begin(), digits_.begin() + level));
}

std::strong_ordering operator<=>(const CurveKey& a, const CurveKey& b) {
    if (auto c = a.dimension_ <=> b.dimension_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.digits_.begin(), a.digits_.end(),
                                                  b.digits_.begin(), b.digits_.end());
}

std::span<const HilbertGenerator> hilbert_generators(unsigned n) {
    switch (n) {
        case 2: return kGen2;
        case 3: return kGen3;
        case 4: return kGen4;
        default:
            fail(Errc::unsupported_dimension,
                 "no Hilbert generator table for dimension " + std::to_string(n));
    }
}

const Hilbert3dTables& hilbert3d_tables() noexcept {
    static const Hilbert3dTables tables = make_tables();
    return tables;
}

unsigned gray_forward(std::span<const std::uint8_t> bits) {
    if (bits.empty()) fail(Errc::invalid_argument, "gray_forward needs dimension >= 1");
    if (bits.size() > 31) fail(Errc::invalid_argument, "gray_forward dimension too large");
    unsigned parity = 0;
    unsigned j = 0;
    for (auto a : bits) {
        if (a > 1) fail(Errc::invalid_argument, "gray_forward input must be binary");
        j = (j << 1) | (a ^ parity);
        parity ^= a;
    }
    return j;
}

std::vector<std::uint8_t> gray_backward(unsigned j, unsigned n) {
    if (n == 0 || n > 31) fail(Errc::invalid_argument, "gray_backward dimension out of range");
    if (j >= (1u << n)) fail(Errc::invalid_argument, "gray_backward value out of range");
    std::vector<std::uint8_t> b(n);
    unsigned prev = 0;
    for (unsigned i = 0; i < n; ++i) {
        const unsigned a = (j >> (n - 1 - i)) & 1u;
        b[i] = static_cast<std::uint8_t>(a ^ prev);
        prev = a;
    }
    return b;
}

CurveKey hilbert_encode_nd(std::span<const std::uint32_t> coord, unsigned level) {
    const auto n = static_cast<unsigned>(coord.size());
    const auto gens = hilbert_generators(n);
    check_lattice(coord, level);

    // x[c] holds component x_{n-c}; mask bit (i-1) addresses component i.
    std::array<std::uint64_t, 4> x{};
    std::copy(coord.begin(), coord.end(), x.begin());
    auto comp = [&](unsigned i) -> std::uint64_t& { return x[n - i]; };

    std::vector<std::uint32_t> digits;
    digits.reserve(level);
    std::array<std::uint8_t, 4> bits{};
    for (unsigned k = level; k > 0; --k) {
        const std::uint64_t half = std::uint64_t{1} << (k - 1);
        for (unsigned c = 0; c < n; ++c) bits[c] = static_cast<std::uint8_t>((x[c] >> (k - 1)) & 1u);
        const unsigned r = gray_forward(std::span<const std::uint8_t>(bits.data(), n));
        digits.push_back(r);

        for (unsigned c = 0; c < n; ++c) {
            if (bits[c]) x[c] -= half;
        }
        const auto& g = gens[r];
        for (unsigned i = 1; i <= n; ++i) {
            if ((g.reflect >> (i - 1)) & 1u) comp(i) = half - 1 - comp(i);
        }
        if (g.swap != 0) {
            unsigned first = 0;
            unsigned second = 0;
            for (unsigned i = 1; i <= n; ++i) {
                if ((g.swap >> (i - 1)) & 1u) (first == 0 ? first : second) = i;
            }
            std::swap(comp(first), comp(second));
        }
    }
    return CurveKey(n, std::move(digits));
}

CurveKey hilbert_encode_3d_table(const std::array<std::uint32_t, 3>& coord, unsigned level) {
    if (level > kMaxLevel3d) fail(Errc::invalid_argument, "table-driven Hilbert level must be <= 30");
    check_lattice(coord, level);
    const auto& t = hilbert3d_tables();
    std::vector<std::uint32_t> digits;
    digits.reserve(level);
    unsigned state = 0;
    for (unsigned k = level; k > 0; --k) {
        const unsigned temp = (((coord[0] >> (k - 1)) & 1u) << 2) |
                              (((coord[1] >> (k - 1)) & 1u) << 1) |
                              ((coord[2] >> (k - 1)) & 1u);
        digits.push_back(t.ordering[state][temp]);
        state = t.orientation[state][temp];
    }
    return CurveKey(3, std::move(digits));
}

CurveKey morton_encode(std::span<const std::uint32_t> coord, unsigned level) {
    const auto n = static_cast<unsigned>(coord.size());
    if (n == 0 || n > 32) fail(Errc::unsupported_dimension, "Morton dimension out of range");
    check_lattice(coord, level);
    std::vector<std::uint32_t> digits;
    digits.reserve(level);
    for (unsigned k = level; k > 0; --k) {
        std::uint32_t d = 0;
        for (unsigned c = 0; c < n; ++c) d = (d << 1) | ((coord[c] >> (k - 1)) & 1u);
        digits.push_back(d);
    }
    return CurveKey(n, std::move(digits));
}

std::string_view to_string(Encoder e) noexcept {
    switch (e) {
        case Encoder::hilbert_nd: return "hsfc-nd";
        case Encoder::hilbert_3d_table: return "hsfc";
        case Encoder::morton: return "morton";
    }
    return "?";
}

Encoder encoder_from_string(std::string_view name) {
    if (name == "hsfc" || name == "hilbert_3d_table") return Encoder::hilbert_3d_table;
    if (name == "hsfc-nd" || name == "hilbert_nd") return Encoder::hilbert_nd;
    if (name == "morton" || name == "msfc") return Encoder::morton;
    fail(Errc::invalid_kind, "unknown curve encoder '" + std::string(name) + "'");
}

CurveKey encode(Encoder encoder, std::span<const std::uint32_t> coord, unsigned level) {
    switch (encoder) {
        case Encoder::hilbert_nd: return hilbert_encode_nd(coord, level);
        case Encoder::hilbert_3d_table: {
            if (coord.size() != 3) fail(Errc::unsupported_dimension, "table-driven Hilbert is 3D only");
            return hilbert_encode_3d_table({coord[0], coord[1], coord[2]}, level);
        }
        case Encoder::morton: return morton_encode(coord, level);
    }
    fail(Errc::invalid_kind, "unknown encoder");
}

std::array<double, 3> normalize_to_unit_cube(const std::array<double, 3>& point, const Box3& bbox) {
    static const double below_one = std::nextafter(1.0, 0.0);
    std::array<double, 3> u{};
    for (int a = 0; a < 3; ++a) {
        const double extent = bbox.hi[a] - bbox.lo[a];
        if (!(extent > 0.0)) {
            fail(Errc::degenerate_domain, "bounding box has zero extent on axis " + std::to_string(a));
        }
        u[a] = std::clamp((point[a] - bbox.lo[a]) / extent, 0.0, below_one);
    }
    return u;
}

std::uint32_t to_lattice(double u, unsigned level) {
    const double scaled = std::floor(u * std::ldexp(1.0, static_cast<int>(level)));
    const double last = std::ldexp(1.0, static_cast<int>(level)) - 1.0;
    return static_cast<std::uint32_t>(std::clamp(scaled, 0.0, last));
}

}  // namespace resim::sfc
