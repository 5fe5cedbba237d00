#ifndef MRA_ERRORS_HPP
#define MRA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mra {

/// Structural problem: shapes, specs or parameters do not line up.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A Gram moment that no signal of the given spec can produce.
struct InfeasibleGram : std::runtime_error {
  explicit InfeasibleGram(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mra

#endif
