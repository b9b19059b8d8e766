#pragma once

// Line-delimited JSON helpers shared by the record parsers.

#include "flowscope/error.hpp"

#include <json.hpp>

#include <cmath>
#include <istream>
#include <optional>
#include <string>

namespace flowscope::detail {

using json = nlohmann::json;

//! Calls `fn(record, line)` for every non-blank line. Lines that are not JSON
//! objects raise MalformedRecord with their 1-based line number.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn)
{
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') {
      text.pop_back();
    }
    if (text.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    json record = json::parse(text, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw Error(ErrorCode::MalformedRecord, "not a JSON object", line);
    }
    fn(record, line);
  }
}

inline std::string required_string(const json& record,
                                   const char* key,
                                   std::size_t line)
{
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw Error(ErrorCode::MalformedRecord,
                std::string("missing or non-string field '") + key + "'",
                line);
  }
  return it->get<std::string>();
}

inline std::optional<std::string> optional_string(const json& record,
                                                  const char* key,
                                                  std::size_t line)
{
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::MalformedRecord,
                std::string("field '") + key + "' must be a string",
                line);
  }
  return it->get<std::string>();
}

inline long long required_integer(const json& record,
                                  const char* key,
                                  std::size_t line)
{
  auto it = record.find(key);
  if (it == record.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::MalformedRecord,
                std::string("missing or non-integer field '") + key + "'",
                line);
  }
  return it->get<long long>();
}

} // namespace flowscope::detail
