#include "json_util.hpp"

#include <limits>

namespace cufair::json_util {

namespace {

void position_of(std::string_view text, std::size_t byte, std::size_t& line,
                 std::size_t& column) {
  line = 1;
  column = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

bool is_scalar(const Json& v) { return !v.is_object() && !v.is_array(); }

void write_value(const Json& v, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case Json::value_t::number_float:
      out += fmt::format("{:.17g}", v.get<double>());
      return;
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        out += Json(key).dump();
        out += ": ";
        write_value(item, indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& item : v) flat = flat && is_scalar(item);
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i > 0) out += ", ";
          write_value(v[i], indent + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ",\n";
        out += inner;
        write_value(v[i], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 0;
    std::size_t column = 0;
    // nlohmann reports the 1-based byte just past the offending token.
    position_of(text, e.byte > 0 ? e.byte - 1 : 0, line, column);
    throw ParseError("malformed JSON", line, column);
  }
}

std::string write(const Json& value) {
  std::string out;
  write_value(value, 0, out);
  out += "\n";
  return out;
}

Json number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

const Json& member(const Json& object, const std::string& field,
                   std::string_view key) {
  const Json* found = optional_member(object, field, key);
  if (found == nullptr) throw SchemaError(at(field, key), "is required");
  return *found;
}

const Json* optional_member(const Json& object, const std::string& field,
                            std::string_view key) {
  as_object(object, field.empty() ? "<root>" : field);
  auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

double as_number(const Json& value, const std::string& field) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw SchemaError(field, "expected a number");
}

std::string as_string(const Json& value, const std::string& field) {
  if (!value.is_string()) throw SchemaError(field, "expected a string");
  return value.get<std::string>();
}

bool as_bool(const Json& value, const std::string& field) {
  if (!value.is_boolean()) throw SchemaError(field, "expected true or false");
  return value.get<bool>();
}

std::size_t as_index(const Json& value, const std::string& field) {
  if (value.is_number_unsigned()) return value.get<std::size_t>();
  if (value.is_number_integer() && value.get<long long>() >= 0) {
    return static_cast<std::size_t>(value.get<long long>());
  }
  if (value.is_number_float()) {
    const double d = value.get<double>();
    if (d >= 0 && d == std::floor(d) && d < 9.0e15) {
      return static_cast<std::size_t>(d);
    }
  }
  throw SchemaError(field, "expected a non-negative integer");
}

const Json& as_array(const Json& value, const std::string& field) {
  if (!value.is_array()) throw SchemaError(field, "expected an array");
  return value;
}

const Json& as_object(const Json& value, const std::string& field) {
  if (!value.is_object()) throw SchemaError(field, "expected an object");
  return value;
}

}  // namespace cufair::json_util
