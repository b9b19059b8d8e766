#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flowscope {

enum class ErrorCode
{
  // ingest
  MalformedRecord,
  DuplicateId,
  UnknownParent,
  CycleDetected,
  MultipleRoots,
  UnknownLabel,
  InvalidDecision,
  DuplicateItem,
  CrossReferenceError,
  // analyses
  UnknownCategory,
  UnknownFeature,
  UnknownRun,
  NoChildren,
  NotCategorical,
  NotNumeric,
  InsufficientData,
  EmptyFlow,
  InvalidArgument,
  Internal
};

std::string_view to_string(ErrorCode code);

//! All library failures are reported through this exception. `line()` is set
//! for record-level parse failures (1-based), `details()` carries one entry
//! per offending reference when several are collected at once.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code,
        const std::string& message,
        std::size_t line);
  Error(ErrorCode code,
        const std::string& message,
        std::vector<std::string> details);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::vector<std::string> details_;
};

} // namespace flowscope
