#ifndef EIP_ERRORS_HPP
#define EIP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eip {

// Configuration / input validation problems (CLI exit code 2).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation produced an unacceptable result (CLI exit code 3).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Discrete instability: singular factorization, non-positive inf-sup (CLI exit code 4).
struct InstabilityError : std::runtime_error {
  explicit InstabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace eip

#endif
