#include "resim/dense_lu.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace resim {

DenseLu::DenseLu(Index n, std::vector<double> a) : n_(n), lu_(std::move(a)), perm_(n) {
    if (static_cast<Index>(lu_.size()) != n * n) fail(Errc::invalid_argument, "dense matrix size mismatch");
    for (Index i = 0; i < n; ++i) perm_[i] = i;
    auto at = [&](Index i, Index j) -> double& { return lu_[i * n + j]; };
    for (Index k = 0; k < n; ++k) {
        Index piv = k;
        for (Index i = k + 1; i < n; ++i) {
            if (std::abs(at(i, k)) > std::abs(at(piv, k))) piv = i;
        }
        if (at(piv, k) == 0.0) fail(Errc::singular_pivot, "singular matrix at column " + std::to_string(k));
        if (piv != k) {
            for (Index j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
            std::swap(perm_[k], perm_[piv]);
        }
        const double d = at(k, k);
        for (Index i = k + 1; i < n; ++i) {
            const double l = at(i, k) / d;
            at(i, k) = l;
            if (l == 0.0) continue;
            for (Index j = k + 1; j < n; ++j) at(i, j) -= l * at(k, j);
        }
    }
}

void DenseLu::solve(std::span<double> b) const {
    if (static_cast<Index>(b.size()) != n_) fail(Errc::invalid_argument, "dense solve size mismatch");
    std::vector<double> y(n_);
    for (Index i = 0; i < n_; ++i) {
        double s = b[perm_[i]];
        for (Index j = 0; j < i; ++j) s -= lu_[i * n_ + j] * y[j];
        y[i] = s;
    }
    for (Index i = n_ - 1; i >= 0; --i) {
        double s = y[i];
        for (Index j = i + 1; j < n_; ++j) s -= lu_[i * n_ + j] * y[j];
        y[i] = s / lu_[i * n_ + i];
    }
    std::copy(y.begin(), y.end(), b.begin());
}

DirectSolvePreconditioner::DirectSolvePreconditioner(Comm& comm, const DistMatrix& a) : lu_(a.gather_global(comm)) {}

void DirectSolvePreconditioner::apply(Comm& comm, const DistVector& r, DistVector& z) const {
    auto g = gather_all(comm, r);
    lu_.solve(g);
    const Index first = z.map()->first();
    auto out = z.owned();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[first + i];
}

}  // namespace resim
