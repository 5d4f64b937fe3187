#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fastmc {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical rank below the requested column count; `index` is the offending
// diagonal of the triangular factor.
struct RankDeficient : std::runtime_error {
  std::size_t index;
  RankDeficient(const std::string& msg, std::size_t idx)
      : std::runtime_error(msg), index(idx) {}
};

struct SingularTriangular : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LengthNotPowerOfTwo : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotOrthonormal : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionViolated : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IncoherenceUnreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fastmc
