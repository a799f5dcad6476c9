#pragma once

#include <string>

#include "resim/dist_vector.hpp"
#include "resim/runtime.hpp"

namespace resim {

/// z = M^{-1} r. Applications are collective when the preconditioner
/// communicates; r and z share the row distribution of the operator.
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual void apply(Comm& comm, const DistVector& r, DistVector& z) const = 0;
    virtual std::string name() const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
public:
    void apply(Comm&, const DistVector& r, DistVector& z) const override { copy(r, z); }
    std::string name() const override { return "none"; }
};

}  // namespace resim
