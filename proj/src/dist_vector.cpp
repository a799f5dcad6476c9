#include "resim/dist_vector.hpp"

#include <algorithm>
#include <cmath>

#include "resim/exact_sum.hpp"

namespace resim {

DistVector::DistVector(std::shared_ptr<const IndexMap> map, double fill)
    : map_(std::move(map)), values_(map_->ntlocal(), fill) {}

void DistVector::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

void DistVector::update_halo(Comm& comm, const CommPlan& plan) {
    if (plan.nlocal() != nlocal() || plan.recv_size() != map_->ntlocal() - map_->nlocal()) {
        fail(Errc::map_mismatch, "comm plan does not match the vector map");
    }
    plan.exchange(comm, values_);
}

DistVector DistVector::like() const {
    DistVector v(map_);
    std::copy(owned().begin(), owned().end(), v.owned().begin());
    return v;
}

void check_same_map(const DistVector& a, const DistVector& b) {
    if (!a.map() || !b.map() || !a.map()->same_distribution(*b.map())) {
        fail(Errc::map_mismatch, "vectors have different row distributions");
    }
}

void axpby(double alpha, const DistVector& x, double beta, DistVector& y) {
    check_same_map(x, y);
    auto xs = x.owned();
    auto ys = y.owned();
    if (beta == 0.0) {
        for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = alpha * xs[i];
    } else {
        for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = alpha * xs[i] + beta * ys[i];
    }
}

void axpbyz(double alpha, const DistVector& x, double beta, const DistVector& y, DistVector& z) {
    check_same_map(x, y);
    check_same_map(x, z);
    auto xs = x.owned();
    auto ys = y.owned();
    auto zs = z.owned();
    for (std::size_t i = 0; i < zs.size(); ++i) zs[i] = alpha * xs[i] + beta * ys[i];
}

void copy(const DistVector& x, DistVector& y) {
    check_same_map(x, y);
    std::copy(x.owned().begin(), x.owned().end(), y.owned().begin());
}

void scale(double alpha, DistVector& x) {
    for (double& v : x.owned()) v *= alpha;
}

std::vector<double> dots(Comm& comm, std::span<const DistVector* const> vs, const DistVector& w) {
    const std::size_t k = vs.size();
    std::vector<std::int64_t> wire(k * ExactSum::kWireSize);
    auto ws = w.owned();
    for (std::size_t v = 0; v < k; ++v) {
        check_same_map(*vs[v], w);
        ExactSum acc;
        auto xs = vs[v]->owned();
        for (std::size_t i = 0; i < ws.size(); ++i) acc.add(xs[i] * ws[i]);
        acc.serialize(std::span<std::int64_t, ExactSum::kWireSize>(wire.data() + v * ExactSum::kWireSize,
                                                                   ExactSum::kWireSize));
    }
    auto parts = comm.allgatherv<std::int64_t>(wire);
    std::vector<double> out(k);
    for (std::size_t v = 0; v < k; ++v) {
        ExactSum total;
        for (const auto& p : parts) {
            if (p.size() != wire.size()) fail(Errc::collective_mismatch, "dot product batch sizes differ across ranks");
            total.add(ExactSum::deserialize(std::span<const std::int64_t, ExactSum::kWireSize>(
                p.data() + v * ExactSum::kWireSize, ExactSum::kWireSize)));
        }
        out[v] = total.round();
    }
    return out;
}

double dot(Comm& comm, const DistVector& x, const DistVector& y) {
    const DistVector* v[] = {&x};
    return dots(comm, v, y)[0];
}

double norm2(Comm& comm, const DistVector& x) { return std::sqrt(dot(comm, x, x)); }

std::vector<double> gather_all(Comm& comm, const DistVector& x) {
    auto parts = comm.allgatherv<double>(x.owned());
    std::vector<double> out;
    out.reserve(x.map()->nglobal());
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

DistVector scatter(std::shared_ptr<const IndexMap> map, std::span<const double> global) {
    if (static_cast<Index>(global.size()) != map->nglobal()) fail(Errc::map_mismatch, "global vector has wrong size");
    DistVector v(map);
    std::copy_n(global.begin() + map->first(), map->nlocal(), v.owned().begin());
    return v;
}

}  // namespace resim
