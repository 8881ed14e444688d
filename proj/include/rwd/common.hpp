#pragma once

#include <stdexcept>
#include <string>

namespace rwd {

// Input files that do not conform to the expected schema.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Valid files whose content cannot support the requested computation
// (too few quotes, missing history, ...).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Quadrature failures, degenerate densities and the like.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rwd
