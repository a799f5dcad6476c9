#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace resim {

/// Signed integer type used for every global/local index.
using Index = std::int64_t;

enum class Errc {
    invalid_argument,
    unsupported_dimension,
    degenerate_domain,
    invalid_coordinate,
    not_assembled,
    already_assembled,
    too_many_ranks,
    wrong_owner,
    map_mismatch,
    plan_mismatch,
    collective_mismatch,
    deadlock,
    rank_failure,
    singular_pivot,
    invalid_layout,
    invalid_kind,
    parse_error,
    io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, Errc code, const char* what) {
    if (!cond) fail(code, what);
}

}  // namespace resim
