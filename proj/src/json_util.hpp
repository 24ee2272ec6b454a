#pragma once

// Internal helpers shared by the scenario and report readers and writers.

#include <cmath>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "cufair/errors.hpp"
#include "json.hpp"

namespace cufair::json_util {

using Json = nlohmann::ordered_json;

/// Parses text, turning syntax errors into ParseError with line and column.
Json parse(std::string_view text);

/// Pretty JSON with doubles written to 17 significant digits. Arrays of
/// scalars stay on one line.
std::string write(const Json& value);

/// Non-finite doubles become the strings "inf", "-inf" and "nan".
Json number(double value);

// Typed accessors; every failure is a SchemaError naming `field`.
const Json& member(const Json& object, const std::string& field,
                   std::string_view key);
const Json* optional_member(const Json& object, const std::string& field,
                            std::string_view key);
double as_number(const Json& value, const std::string& field);
std::string as_string(const Json& value, const std::string& field);
bool as_bool(const Json& value, const std::string& field);
std::size_t as_index(const Json& value, const std::string& field);
const Json& as_array(const Json& value, const std::string& field);
const Json& as_object(const Json& value, const std::string& field);

inline std::string at(const std::string& field, std::string_view key) {
  return field.empty() ? std::string(key) : field + "." + std::string(key);
}
inline std::string at(const std::string& field, std::size_t index) {
  return fmt::format("{}[{}]", field, index);
}

}  // namespace cufair::json_util
