#include "resim/error.hpp"

namespace resim {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::unsupported_dimension: return "unsupported-dimension";
        case Errc::degenerate_domain: return "degenerate-domain";
        case Errc::invalid_coordinate: return "invalid-coordinate";
        case Errc::not_assembled: return "not-assembled";
        case Errc::already_assembled: return "already-assembled";
        case Errc::too_many_ranks: return "too-many-ranks";
        case Errc::wrong_owner: return "wrong-owner";
        case Errc::map_mismatch: return "map-mismatch";
        case Errc::plan_mismatch: return "plan-mismatch";
        case Errc::collective_mismatch: return "collective-mismatch";
        case Errc::deadlock: return "deadlock";
        case Errc::rank_failure: return "rank-failure";
        case Errc::singular_pivot: return "singular-pivot";
        case Errc::invalid_layout: return "invalid-layout";
        case Errc::invalid_kind: return "invalid-kind";
        case Errc::parse_error: return "parse-error";
        case Errc::io_error: return "io-error";
    }
    return "unknown";
}

}  // namespace resim
