#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace threatgraph {

enum class Errc {
  // ingest
  MalformedLine,
  OutOfBounds,
  BadKind,
  WrongPointCount,
  DegenerateQuad,
  BadConfig,
  // tracking
  NonMonotonicFrame,
  MixedIdMode,
  // geometry
  SingularSystem,
  AtInfinity,
  // grouping
  OutOfOrderFrame,
  // graph
  SchemaMismatch,
  // eval
  NoDefinedClasses,
  MissingFrame,
  // scenario
  OutsideCalibratedRegion,
  // any module
  IoFailure,
  InvalidArgument,
};

std::string_view to_string(Errc code);

/// Error raised for bad input. Carries the failing code and, for line-oriented
/// files, the 1-based line number and path.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::optional<std::size_t> line = std::nullopt,
        std::string path = {});

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }

 private:
  Errc code_;
  std::optional<std::size_t> line_;
  std::string path_;
};

/// Raised when an internal invariant does not hold (a bug, not bad input).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace threatgraph
