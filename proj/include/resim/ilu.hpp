#pragma once

#include <span>
#include <string_view>

#include "resim/csr.hpp"

namespace resim {

enum class IluVariant { ilu0, iluk, ilut };

std::string_view to_string(IluVariant v) noexcept;
IluVariant ilu_variant_from_string(std::string_view name);

struct IluOptions {
    IluVariant variant = IluVariant::ilu0;
    int level = 0;           // ILU(k)
    int ilut_p = -1;         // extra entries kept per part of a row, -1 = no cap
    double ilut_tol = 1e-3;  // drop below tol * ||row||_2
};

/// L is strictly lower with an implied unit diagonal; U is upper with the
/// pivot stored first in every row.
struct IluFactors {
    CsrMatrix L;
    CsrMatrix U;
    IluOptions options;
    Index shifted_pivots = 0;

    Index size() const noexcept { return U.nrows; }
};

IluFactors ilu0_factor(const CsrMatrix& a);
IluFactors iluk_factor(const CsrMatrix& a, int level);
IluFactors ilut_factor(const CsrMatrix& a, int p, double tol);
IluFactors ilu_factor(const CsrMatrix& a, const IluOptions& options);

/// Solves L U x = b; x and b may alias.
void lu_solve(const IluFactors& f, std::span<const double> b, std::span<double> x);
std::vector<double> lu_solve(const IluFactors& f, std::span<const double> b);

}  // namespace resim
