#include "flowscope/error.hpp"

namespace flowscope {

std::string_view to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::InvalidDecision: return "InvalidDecision";
    case ErrorCode::DuplicateItem: return "DuplicateItem";
    case ErrorCode::CrossReferenceError: return "CrossReferenceError";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::UnknownRun: return "UnknownRun";
    case ErrorCode::NoChildren: return "NoChildren";
    case ErrorCode::NotCategorical: return "NotCategorical";
    case ErrorCode::NotNumeric: return "NotNumeric";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptyFlow: return "EmptyFlow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

Error::Error(ErrorCode code, const std::string& message)
  : std::runtime_error(message)
  , code_(code)
{}

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
  : std::runtime_error("line " + std::to_string(line) + ": " + message)
  , code_(code)
  , line_(line)
{}

Error::Error(ErrorCode code,
             const std::string& message,
             std::vector<std::string> details)
  : std::runtime_error(message)
  , code_(code)
  , details_(std::move(details))
{}

} // namespace flowscope
