#include "resim/exact_sum.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace resim {

namespace {
using u128 = unsigned __int128;
constexpr std::int64_t kLimbMask = (std::int64_t{1} << ExactSum::kLimbBits) - 1;
constexpr std::int64_t kNormalizeEvery = std::int64_t{1} << 28;
}  // namespace

void ExactSum::add(double v) noexcept {
    if (v == 0.0) return;
    if (!std::isfinite(v)) {
        nonfinite_ += v;
        has_nonfinite_ = true;
        return;
    }
    int exp = 0;
    const double m = std::frexp(v, &exp);
    const auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));
    const int pos = exp - 53 + kOffset;
    const bool negative = mant < 0;
    const u128 mag = static_cast<u128>(negative ? -mant : mant) << (pos % kLimbBits);
    const int idx = pos / kLimbBits;
    for (int part = 0; part < 3; ++part) {
        const auto digit = static_cast<std::int64_t>((mag >> (part * kLimbBits)) & kLimbMask);
        limb_[idx + part] += negative ? -digit : digit;
    }
    if (++pending_ >= kNormalizeEvery) normalize();
}

void ExactSum::add(const ExactSum& other) noexcept {
    ExactSum o = other;
    o.normalize();
    normalize();
    for (int i = 0; i < kLimbs; ++i) limb_[i] += o.limb_[i];
    pending_ = 2;
    if (o.has_nonfinite_) {
        nonfinite_ += o.nonfinite_;
        has_nonfinite_ = true;
    }
}

void ExactSum::normalize() noexcept {
    for (int i = 0; i + 1 < kLimbs; ++i) {
        const std::int64_t carry = limb_[i] >> kLimbBits;  // arithmetic shift: floor division
        limb_[i] -= carry * (std::int64_t{1} << kLimbBits);
        limb_[i + 1] += carry;
    }
    pending_ = 0;
}

double ExactSum::round() const noexcept {
    if (has_nonfinite_) return nonfinite_;
    ExactSum t = *this;
    t.normalize();
    double sign = 1.0;
    if (t.limb_[kLimbs - 1] < 0) {
        for (auto& l : t.limb_) l = -l;
        t.normalize();
        sign = -1.0;
    }
    int top = kLimbs - 1;
    while (top >= 0 && t.limb_[top] == 0) --top;
    if (top < 0) return 0.0;

    auto limb_at = [&](int i) -> u128 { return i >= 0 ? static_cast<u128>(t.limb_[i]) : 0; };
    u128 hi = (limb_at(top) << 64) | (limb_at(top - 1) << 32) | limb_at(top - 2);
    bool sticky = false;
    for (int i = top - 3; i >= 0; --i) {
        if (t.limb_[i] != 0) {
            sticky = true;
            break;
        }
    }
    const auto lo64 = static_cast<std::uint64_t>(hi);
    const auto hi64 = static_cast<std::uint64_t>(hi >> 64);
    const int nbits = hi64 != 0 ? 128 - std::countl_zero(hi64) : 64 - std::countl_zero(lo64);
    int shift = nbits - 53;
    std::uint64_t q = 0;
    if (shift > 0) {
        q = static_cast<std::uint64_t>(hi >> shift);
        const u128 rem = hi & ((u128{1} << shift) - 1);
        const u128 half = u128{1} << (shift - 1);
        if (rem > half || (rem == half && (sticky || (q & 1u)))) ++q;
    } else {
        q = static_cast<std::uint64_t>(hi);
        shift = 0;
    }
    const int scale = shift + (top - 2) * kLimbBits - kOffset;
    return sign * std::ldexp(static_cast<double>(q), scale);
}

void ExactSum::serialize(std::span<std::int64_t, kWireSize> out) const noexcept {
    ExactSum t = *this;
    t.normalize();
    for (int i = 0; i < kLimbs; ++i) out[i] = t.limb_[i];
    out[kLimbs] = 0;
    if (has_nonfinite_) std::memcpy(&out[kLimbs], &nonfinite_, sizeof(double));
}

ExactSum ExactSum::deserialize(std::span<const std::int64_t, kWireSize> in) noexcept {
    ExactSum s;
    for (int i = 0; i < kLimbs; ++i) s.limb_[i] = in[i];
    if (in[kLimbs] != 0) {
        std::memcpy(&s.nonfinite_, &in[kLimbs], sizeof(double));
        s.has_nonfinite_ = true;
    }
    return s;
}

}  // namespace resim
