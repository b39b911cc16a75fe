#include "neverfall/toml_lite.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace neverfall::toml {

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  int line;

  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
  void skip_ws() {
    while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
};

bool is_bare_key_char(char character) {
  return std::isalnum(static_cast<unsigned char>(character)) || character == '_' ||
         character == '-';
}

std::string parse_bare_key(Cursor& cur) {
  std::string key;
  while (!cur.done() && is_bare_key_char(cur.peek())) key.push_back(cur.s[cur.i++]);
  if (key.empty()) throw ParseError("expected a key", cur.line);
  return key;
}

std::string parse_basic_string(Cursor& cur) {
  ++cur.i;  // opening quote
  std::string out;
  while (!cur.done() && cur.peek() != '"') {
    char character = cur.s[cur.i++];
    if (character == '\\') {
      if (cur.done()) throw ParseError("dangling escape", cur.line);
      const char esc = cur.s[cur.i++];
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: throw ParseError(std::string("unsupported escape \\") + esc, cur.line);
      }
    } else {
      out.push_back(character);
    }
  }
  if (cur.done()) throw ParseError("unterminated string", cur.line);
  ++cur.i;  // closing quote
  return out;
}

Value parse_scalar(Cursor& cur) {
  cur.skip_ws();
  if (cur.done()) throw ParseError("expected a value", cur.line);
  const char character = cur.peek();
  if (character == '"') return Value{parse_basic_string(cur)};
  if (cur.s.compare(cur.i, 4, "true") == 0 &&
      (cur.i + 4 >= cur.s.size() || !is_bare_key_char(cur.s[cur.i + 4]))) {
    cur.i += 4;
    return Value{true};
  }
  if (cur.s.compare(cur.i, 5, "false") == 0 &&
      (cur.i + 5 >= cur.s.size() || !is_bare_key_char(cur.s[cur.i + 5]))) {
    cur.i += 5;
    return Value{false};
  }
  // number: consume the token, then decide int vs float
  std::size_t start = cur.i;
  while (!cur.done() && (std::isdigit(static_cast<unsigned char>(cur.peek())) ||
                         cur.peek() == '+' || cur.peek() == '-' || cur.peek() == '.' ||
                         cur.peek() == 'e' || cur.peek() == 'E' || cur.peek() == '_'))
    ++cur.i;
  std::string token = cur.s.substr(start, cur.i - start);
  if (token.empty()) throw ParseError("unrecognized value", cur.line);
  std::string digits;
  for (char d : token)
    if (d != '_') digits.push_back(d);
  const bool is_float = digits.find_first_of(".eE") != std::string::npos;
  char* end = nullptr;
  if (is_float) {
    const double v = std::strtod(digits.c_str(), &end);
    if (end != digits.c_str() + digits.size())
      throw ParseError("malformed float '" + token + "'", cur.line);
    return Value{v};
  }
  const long long v = std::strtoll(digits.c_str(), &end, 10);
  if (end != digits.c_str() + digits.size())
    throw ParseError("malformed integer '" + token + "'", cur.line);
  return Value{static_cast<std::int64_t>(v)};
}

Value parse_value(Cursor& cur);

Value parse_array(Cursor& cur) {
  ++cur.i;  // '['
  Array arr;
  for (;;) {
    cur.skip_ws();
    if (cur.done()) throw ParseError("unterminated array", cur.line);
    if (cur.peek() == ']') {
      ++cur.i;
      return Value{std::move(arr)};
    }
    arr.push_back(parse_value(cur));
    cur.skip_ws();
    if (!cur.done() && cur.peek() == ',') {
      ++cur.i;
      continue;
    }
    cur.skip_ws();
    if (cur.done() || cur.peek() != ']') throw ParseError("expected ',' or ']'", cur.line);
  }
}

Value parse_value(Cursor& cur) {
  cur.skip_ws();
  if (cur.done()) throw ParseError("expected a value", cur.line);
  if (cur.peek() == '[') return parse_array(cur);
  if (cur.peek() == '{') throw ParseError("inline tables are not supported", cur.line);
  return parse_scalar(cur);
}

// Strips a comment that is outside any string literal.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char character = line[i];
    if (character == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (character == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

int bracket_balance(const std::string& line) {
  bool in_string = false;
  int balance = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char character = line[i];
    if (character == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (in_string) continue;
    if (character == '[') ++balance;
    if (character == ']') --balance;
  }
  return balance;
}

Table* descend(Table& root, const std::vector<std::string>& path, int line) {
  Table* t = &root;
  for (const std::string& part : path) {
    auto [it, inserted] = t->try_emplace(part, Value{Table{}});
    if (!it->second.is_table())
      throw ParseError("'" + part + "' is already a non-table value", line);
    t = &std::get<Table>(it->second.data);
  }
  return t;
}

}  // namespace

Table parse(const std::string& text) {
  Table root;
  Table* current = &root;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);

    // join continuation lines of an open array
    int balance = bracket_balance(line);
    while (balance > 0) {
      std::string more;
      if (!std::getline(in, more)) throw ParseError("unterminated array", line_no);
      ++line_no;
      more = strip_comment(more);
      line += ' ' + more;
      balance = bracket_balance(line);
    }

    Cursor cur{line, 0, line_no};
    cur.skip_ws();
    if (cur.done()) continue;

    if (cur.peek() == '[') {
      ++cur.i;
      if (!cur.done() && cur.peek() == '[')
        throw ParseError("arrays of tables are not supported", line_no);
      std::vector<std::string> path;
      for (;;) {
        cur.skip_ws();
        path.push_back(parse_bare_key(cur));
        cur.skip_ws();
        if (!cur.done() && cur.peek() == '.') {
          ++cur.i;
          continue;
        }
        break;
      }
      if (cur.done() || cur.peek() != ']')
        throw ParseError("malformed table header", line_no);
      ++cur.i;
      cur.skip_ws();
      if (!cur.done()) throw ParseError("trailing characters after table header", line_no);
      current = descend(root, path, line_no);
      continue;
    }

    const std::string key = parse_bare_key(cur);
    cur.skip_ws();
    if (!cur.done() && cur.peek() == '.')
      throw ParseError("dotted keys are not supported; use a [table] header", line_no);
    if (cur.done() || cur.peek() != '=') throw ParseError("expected '=' after key", line_no);
    ++cur.i;
    Value value = parse_value(cur);
    cur.skip_ws();
    if (!cur.done()) throw ParseError("trailing characters after value", line_no);
    if (!current->emplace(key, std::move(value)).second)
      throw ParseError("duplicate key '" + key + "'", line_no);
  }
  return root;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace neverfall::toml
