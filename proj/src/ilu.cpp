#include "resim/ilu.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>

namespace resim {

namespace {

constexpr double kPivotFloor = 1e-12;

void check_square(const CsrMatrix& a) {
    if (a.nrows != a.ncols) fail(Errc::invalid_argument, "ILU needs a square matrix");
}

double row_norm(const CsrMatrix& a, Index i) {
    double s = 0.0;
    for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) s += a.values[k] * a.values[k];
    return std::sqrt(s);
}

double shifted_pivot(double d, double norm, Index row, Index& shifts) {
    const double floor = kPivotFloor * norm;
    if (std::abs(d) >= floor && d != 0.0 && std::isfinite(d)) return d;
    if (!(floor > 0.0) || !std::isfinite(d)) {
        fail(Errc::singular_pivot, "zero pivot in row " + std::to_string(row));
    }
    ++shifts;
    return d < 0.0 ? -floor : floor;
}

// Dense scatter of one row with a min-heap over the pending lower columns.
struct RowWork {
    std::vector<double> w;
    std::vector<int> lev;
    std::vector<char> mark;
    std::vector<Index> touched;
    std::priority_queue<Index, std::vector<Index>, std::greater<>> lower;

    explicit RowWork(Index n) : w(n, 0.0), lev(n, 0), mark(n, 0) {}

    void put(Index j, double v, int level, Index i) {
        mark[j] = 1;
        w[j] = v;
        lev[j] = level;
        touched.push_back(j);
        if (j < i) lower.push(j);
    }
    void clear() {
        for (Index j : touched) {
            mark[j] = 0;
            w[j] = 0.0;
            lev[j] = 0;
        }
        touched.clear();
    }
};

void append_row(CsrMatrix& m, std::vector<std::pair<Index, double>>& entries) {
    for (const auto& [c, v] : entries) {
        m.col_idx.push_back(c);
        m.values.push_back(v);
    }
    m.row_ptr.push_back(m.nnz());
}

IluFactors level_factor(const CsrMatrix& a, int max_level) {
    check_square(a);
    if (max_level < 0) fail(Errc::invalid_argument, "ILU(k) level must be >= 0");
    const Index n = a.nrows;
    IluFactors f;
    f.L = CsrMatrix(0, n);
    f.U = CsrMatrix(0, n);
    std::vector<int> ulev;  // fill level of each U entry
    RowWork row(n);
    std::vector<std::pair<Index, double>> lpart, upart;
    std::vector<int> uplev;

    for (Index i = 0; i < n; ++i) {
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const Index j = a.col_idx[k];
            if (row.mark[j]) row.w[j] += a.values[k];
            else row.put(j, a.values[k], 0, i);
        }
        if (!row.mark[i]) row.put(i, 0.0, 0, i);

        while (!row.lower.empty()) {
            const Index k = row.lower.top();
            row.lower.pop();
            const Index u0 = f.U.row_ptr[k];
            row.w[k] /= f.U.values[u0];
            const double lik = row.w[k];
            const int levk = row.lev[k];
            for (Index q = u0 + 1; q < f.U.row_ptr[k + 1]; ++q) {
                const Index j = f.U.col_idx[q];
                const int nl = levk + ulev[q] + 1;
                if (row.mark[j]) {
                    row.w[j] -= lik * f.U.values[q];
                    row.lev[j] = std::min(row.lev[j], nl);
                } else if (nl <= max_level) {
                    row.put(j, -lik * f.U.values[q], nl, i);
                }
            }
        }

        lpart.clear();
        upart.clear();
        uplev.clear();
        std::sort(row.touched.begin(), row.touched.end());
        for (Index j : row.touched) {
            if (j < i) lpart.emplace_back(j, row.w[j]);
            else if (j > i) {
                upart.emplace_back(j, row.w[j]);
                uplev.push_back(row.lev[j]);
            }
        }
        const double d = shifted_pivot(row.w[i], row_norm(a, i), i, f.shifted_pivots);
        upart.insert(upart.begin(), {i, d});
        uplev.insert(uplev.begin(), 0);
        append_row(f.L, lpart);
        append_row(f.U, upart);
        ulev.insert(ulev.end(), uplev.begin(), uplev.end());
        row.clear();
    }
    f.L.nrows = f.U.nrows = n;
    return f;
}

// Keeps at most cap entries of largest magnitude, then restores column order.
void keep_largest(std::vector<std::pair<Index, double>>& part, Index cap) {
    if (cap < 0 || static_cast<Index>(part.size()) <= cap) return;
    std::sort(part.begin(), part.end(), [](const auto& x, const auto& y) {
        if (std::abs(x.second) != std::abs(y.second)) return std::abs(x.second) > std::abs(y.second);
        return x.first < y.first;
    });
    part.resize(cap);
    std::sort(part.begin(), part.end());
}

}  // namespace

std::string_view to_string(IluVariant v) noexcept {
    switch (v) {
        case IluVariant::ilu0: return "ilu0";
        case IluVariant::iluk: return "iluk";
        case IluVariant::ilut: return "ilut";
    }
    return "?";
}

IluVariant ilu_variant_from_string(std::string_view name) {
    if (name == "ilu0") return IluVariant::ilu0;
    if (name == "iluk") return IluVariant::iluk;
    if (name == "ilut") return IluVariant::ilut;
    fail(Errc::invalid_kind, "unknown ILU variant '" + std::string(name) + "'");
}

IluFactors ilu0_factor(const CsrMatrix& a) {
    auto f = level_factor(a, 0);
    f.options = {IluVariant::ilu0, 0, -1, 0.0};
    return f;
}

IluFactors iluk_factor(const CsrMatrix& a, int level) {
    auto f = level_factor(a, level);
    f.options = {IluVariant::iluk, level, -1, 0.0};
    return f;
}

IluFactors ilut_factor(const CsrMatrix& a, int p, double tol) {
    check_square(a);
    if (!(tol >= 0.0)) fail(Errc::invalid_argument, "ILUT tolerance must be >= 0");
    const Index n = a.nrows;
    IluFactors f;
    f.options = {IluVariant::ilut, 0, p, tol};
    f.L = CsrMatrix(0, n);
    f.U = CsrMatrix(0, n);
    RowWork row(n);
    std::vector<std::pair<Index, double>> lpart, upart;

    for (Index i = 0; i < n; ++i) {
        Index nl_orig = 0, nu_orig = 0;
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            const Index j = a.col_idx[k];
            if (row.mark[j]) {
                row.w[j] += a.values[k];
                continue;
            }
            row.put(j, a.values[k], 0, i);
            if (j < i) ++nl_orig;
            else if (j > i) ++nu_orig;
        }
        if (!row.mark[i]) row.put(i, 0.0, 0, i);
        const double norm = row_norm(a, i);
        const double tau = tol * norm;

        while (!row.lower.empty()) {
            const Index k = row.lower.top();
            row.lower.pop();
            const Index u0 = f.U.row_ptr[k];
            row.w[k] /= f.U.values[u0];
            if (std::abs(row.w[k]) < tau) {
                row.w[k] = 0.0;
                continue;
            }
            const double lik = row.w[k];
            for (Index q = u0 + 1; q < f.U.row_ptr[k + 1]; ++q) {
                const Index j = f.U.col_idx[q];
                if (row.mark[j]) row.w[j] -= lik * f.U.values[q];
                else row.put(j, -lik * f.U.values[q], 0, i);
            }
        }

        lpart.clear();
        upart.clear();
        std::sort(row.touched.begin(), row.touched.end());
        for (Index j : row.touched) {
            if (j == i) continue;
            const double v = row.w[j];
            if (v == 0.0 || std::abs(v) < tau) continue;
            (j < i ? lpart : upart).emplace_back(j, v);
        }
        if (p >= 0) {
            keep_largest(lpart, nl_orig + p);
            keep_largest(upart, nu_orig + p);
        }
        const double d = shifted_pivot(row.w[i], norm, i, f.shifted_pivots);
        upart.insert(upart.begin(), {i, d});
        append_row(f.L, lpart);
        append_row(f.U, upart);
        row.clear();
    }
    f.L.nrows = f.U.nrows = n;
    return f;
}

IluFactors ilu_factor(const CsrMatrix& a, const IluOptions& o) {
    switch (o.variant) {
        case IluVariant::ilu0: return ilu0_factor(a);
        case IluVariant::iluk: return iluk_factor(a, o.level);
        case IluVariant::ilut: return ilut_factor(a, o.ilut_p, o.ilut_tol);
    }
    fail(Errc::invalid_kind, "unknown ILU variant");
}

void lu_solve(const IluFactors& f, std::span<const double> b, std::span<double> x) {
    const Index n = f.size();
    if (static_cast<Index>(b.size()) != n || static_cast<Index>(x.size()) != n) {
        fail(Errc::invalid_argument, "lu_solve size mismatch");
    }
    const auto& L = f.L;
    const auto& U = f.U;
    for (Index i = 0; i < n; ++i) {
        double s = b[i];
        for (Index k = L.row_ptr[i]; k < L.row_ptr[i + 1]; ++k) s -= L.values[k] * x[L.col_idx[k]];
        x[i] = s;
    }
    for (Index i = n - 1; i >= 0; --i) {
        const Index u0 = U.row_ptr[i];
        double s = x[i];
        for (Index k = u0 + 1; k < U.row_ptr[i + 1]; ++k) s -= U.values[k] * x[U.col_idx[k]];
        x[i] = s / U.values[u0];
    }
}

std::vector<double> lu_solve(const IluFactors& f, std::span<const double> b) {
    std::vector<double> x(b.size());
    lu_solve(f, b, x);
    return x;
}

}  // namespace resim
