#pragma once

#include <stdexcept>
#include <string>

namespace hqec {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operator algebra between operators living on different labeled spaces.
struct dimension_error : error {
    using error::error;
};

// Fock-tail population above the truncation guard; recoverable by enlarging N.
struct leakage_error : error {
    using error::error;
};

struct integration_error : error {
    using error::error;
};

// Rate-fit window cannot be placed (state depolarized past the usable range).
struct window_error : error {
    using error::error;
};

struct config_error : error {
    using error::error;
};

}  // namespace hqec
