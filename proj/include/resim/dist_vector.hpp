#pragma once

#include <memory>
#include <span>
#include <vector>

#include "resim/index_map.hpp"
#include "resim/runtime.hpp"

namespace resim {

/// Row-distributed vector: nlocal owned entries followed by the halo slots
/// of its map. Only the owned part is authoritative.
class DistVector {
public:
    DistVector() = default;
    explicit DistVector(std::shared_ptr<const IndexMap> map, double fill = 0.0);

    const std::shared_ptr<const IndexMap>& map() const noexcept { return map_; }
    Index nlocal() const noexcept { return map_ ? map_->nlocal() : 0; }

    std::span<double> owned() noexcept { return {values_.data(), static_cast<std::size_t>(nlocal())}; }
    std::span<const double> owned() const noexcept { return {values_.data(), static_cast<std::size_t>(nlocal())}; }
    std::span<double> halo() noexcept { return std::span<double>(values_).subspan(nlocal()); }
    std::span<double> local() noexcept { return values_; }
    std::span<const double> local() const noexcept { return values_; }

    double& operator[](Index i) { return values_[i]; }
    double operator[](Index i) const { return values_[i]; }

    void fill(double v);
    /// Fills halo slots from their owners (collective).
    void update_halo(Comm& comm, const CommPlan& plan);

    /// Same distribution, owned values copied (halo dropped).
    DistVector like() const;

private:
    std::shared_ptr<const IndexMap> map_;
    std::vector<double> values_;
};

/// Throws map-mismatch unless both vectors share a row distribution.
void check_same_map(const DistVector& a, const DistVector& b);

/// y = alpha x + beta y (owned entries).
void axpby(double alpha, const DistVector& x, double beta, DistVector& y);
/// z = alpha x + beta y.
void axpbyz(double alpha, const DistVector& x, double beta, const DistVector& y, DistVector& z);
void copy(const DistVector& x, DistVector& y);
void scale(double alpha, DistVector& x);

/// Global inner product over owned entries. Each rank accumulates exactly,
/// accumulators are combined in rank order and rounded once, so the result
/// does not depend on the rank count.
double dot(Comm& comm, const DistVector& x, const DistVector& y);
/// dot(vs[k], w) for every k in a single collective.
std::vector<double> dots(Comm& comm, std::span<const DistVector* const> vs, const DistVector& w);
double norm2(Comm& comm, const DistVector& x);

/// Every rank receives the full global vector.
std::vector<double> gather_all(Comm& comm, const DistVector& x);
/// Builds the owned part from a replicated global vector.
DistVector scatter(std::shared_ptr<const IndexMap> map, std::span<const double> global);

}  // namespace resim
