#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simplexdb {

enum class ErrorCode {
  InvalidArgument,
  UnknownDataType,
  UnknownSimplex,
  DimensionMismatch,
  LabelMismatch,
  InvalidSchema,
  UnrealizableMatching,
  NonConforming,
  KeyMapViolation,
  FaceIndexOutOfRange,
  NotEnumerable,
  SimplexMismatch,
  MissingTable,
  AmbiguousKeyMap,
  UnsupportedCombination,
  NotIncident,
  CurveOffRealization,
  PolicyRequired,
  InvalidSheaf,
  MalformedDocument,
  UnknownBuiltin,
  VersionMismatch,
  InvalidProvenance,
  NotFound,
};

std::string_view to_string(ErrorCode code);

// Every engine failure is reported through this type. `detail` carries the
// offending identifier(s) when there is one, so callers can surface it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace simplexdb
