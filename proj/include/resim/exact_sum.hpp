#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace resim {

/// Exact accumulator for sums of doubles: a signed fixed-point number wide
/// enough for the whole double range, so additions are exact and
/// order-independent. round() returns the correctly rounded sum
/// (round-to-nearest-even).
class ExactSum {
public:
    static constexpr int kLimbBits = 32;
    static constexpr int kLimbs = 70;
    static constexpr int kOffset = 1126;  // bit position of 2^0

    void add(double v) noexcept;
    void add(const ExactSum& other) noexcept;
    double round() const noexcept;

    /// Flat representation used to ship accumulators between ranks.
    static constexpr int kWireSize = kLimbs + 1;
    void serialize(std::span<std::int64_t, kWireSize> out) const noexcept;
    static ExactSum deserialize(std::span<const std::int64_t, kWireSize> in) noexcept;

private:
    void normalize() noexcept;

    std::array<std::int64_t, kLimbs> limb_{};
    std::int64_t pending_ = 0;
    double nonfinite_ = 0.0;
    bool has_nonfinite_ = false;
};

}  // namespace resim
