#ifndef NEVERFALL_TOML_LITE_HPP
#define NEVERFALL_TOML_LITE_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace neverfall::toml {

// Reader for the TOML subset the scenario files use: comments, [table]
// headers (dotted allowed), `key = value` with booleans, integers, floats,
// basic strings, and (possibly multi-line) arrays of those. Dates, inline
// tables, dotted keys and arrays-of-tables are rejected with a line number.

struct Value;
using Table = std::map<std::string, Value>;
using Array = std::vector<Value>;

struct Value {
  std::variant<bool, std::int64_t, double, std::string, Array, Table> data;

  bool is_table() const { return std::holds_alternative<Table>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_number() const {
    return std::holds_alternative<double>(data) || std::holds_alternative<std::int64_t>(data);
  }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }

  const Table& as_table() const { return std::get<Table>(data); }
  const Array& as_array() const { return std::get<Array>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  bool as_bool() const { return std::get<bool>(data); }
  double as_double() const {
    if (std::holds_alternative<std::int64_t>(data))
      return static_cast<double>(std::get<std::int64_t>(data));
    return std::get<double>(data);
  }
  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
};

struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& what, int line_)
      : std::runtime_error("toml:" + std::to_string(line_) + ": " + what), line(line_) {}
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

}  // namespace neverfall::toml

#endif
