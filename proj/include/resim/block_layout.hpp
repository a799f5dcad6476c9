#pragma once

#include "resim/index_map.hpp"

namespace resim {

/// Interleaved unknown ordering: the unknowns of one cell occupy
/// consecutive rows, row = cell * unknowns + u.
struct BlockLayout {
    int unknowns = 1;
    int pressure = 0;  // which unknown of a cell is the pressure

    Index row(Index cell, int u) const noexcept { return cell * unknowns + u; }
    Index cell(Index row) const noexcept { return row / unknowns; }
    int unknown(Index row) const noexcept { return static_cast<int>(row % unknowns); }
    bool is_pressure(Index row) const noexcept { return unknown(row) == pressure; }

    /// Throws invalid-layout.
    void validate() const;
    /// Also requires every rank's row range to hold whole cells.
    void validate(const IndexMap& rows) const;
};

}  // namespace resim
