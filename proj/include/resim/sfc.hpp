#pragma once

// Space-filling-curve encoders: iterative n-dimensional Hilbert (Gray-code
// generator driven), table-driven 3D Hilbert, and Morton (bit interleaving).
//
// Coordinates are lattice points of level m: every component lies in
// [0, 2^m). Component 0 is the most significant one in every encoder
// (x is the high bit, then y, then z).

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "resim/error.hpp"

namespace resim::sfc {

/// Largest level accepted by the table-driven 3D encoder.
inline constexpr unsigned kMaxLevel3d = 30;

/// A curve index held exactly as its base-2^n digits, most significant first.
class CurveKey {
public:
    CurveKey() = default;
    CurveKey(unsigned dimension, std::vector<std::uint32_t> digits)
        : dimension_(dimension), digits_(std::move(digits)) {}

    unsigned dimension() const noexcept { return dimension_; }
    unsigned level() const noexcept { return static_cast<unsigned>(digits_.size()); }
    std::span<const std::uint32_t> digits() const noexcept { return digits_; }

    /// Lossy view in [0, 1): sum of digit_k * (2^n)^-(k+1).
    double normalized() const noexcept;

    /// Integer value of the digit string. Requires dimension * level <= 64.
    std::uint64_t packed() const;

    /// Key of the parent cell one level up (drops the last digit).
    CurveKey truncated(unsigned level) const;

    friend bool operator==(const CurveKey&, const CurveKey&) = default;
    friend std::strong_ordering operator<=>(const CurveKey& a, const CurveKey& b);

private:
    unsigned dimension_ = 0;
    std::vector<std::uint32_t> digits_;
};

/// Generator pair for one Gray-code digit. Bit (i-1) of each mask refers to
/// component i in the x_n...x_1 numbering, i.e. to coordinate index n-i.
/// `swap` has exactly two bits set, or is 0 for "no swap".
struct HilbertGenerator {
    std::uint32_t swap;
    std::uint32_t reflect;
};

/// Generator table for dimension n (2 <= n <= 4), indexed by digit.
std::span<const HilbertGenerator> hilbert_generators(unsigned n);

struct Hilbert3dTables {
    std::array<std::array<std::uint8_t, 8>, 24> ordering;
    std::array<std::array<std::uint8_t, 8>, 24> orientation;
};

const Hilbert3dTables& hilbert3d_tables() noexcept;

/// Parity-driven map from a bit vector (a_1..a_n) to (b_1..b_n)_2.
unsigned gray_forward(std::span<const std::uint8_t> bits);

/// Inverse of gray_forward for an n-bit integer.
std::vector<std::uint8_t> gray_backward(unsigned j, unsigned n);

CurveKey hilbert_encode_nd(std::span<const std::uint32_t> coord, unsigned level);
CurveKey hilbert_encode_3d_table(const std::array<std::uint32_t, 3>& coord, unsigned level);
CurveKey morton_encode(std::span<const std::uint32_t> coord, unsigned level);

enum class Encoder { hilbert_nd, hilbert_3d_table, morton };

std::string_view to_string(Encoder e) noexcept;
Encoder encoder_from_string(std::string_view name);

CurveKey encode(Encoder encoder, std::span<const std::uint32_t> coord, unsigned level);

struct Box3 {
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{1.0, 1.0, 1.0};
};

/// Affine map of a point into [0,1)^3. Points on the upper face are clamped
/// just below 1 so level-m truncation stays inside the lattice.
std::array<double, 3> normalize_to_unit_cube(const std::array<double, 3>& point,
                                             const Box3& bbox);

/// floor(u * 2^level), clamped to the last lattice cell.
std::uint32_t to_lattice(double u, unsigned level);

}  // namespace resim::sfc
