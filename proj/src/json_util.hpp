#pragma once

#include <set>
#include <string>

#include "contestlab/errors.hpp"
#include "json.hpp"

namespace contestlab::detail {

using json = nlohmann::json;

// Parses text, reporting syntax errors as ParseError with 1-based line/column.
inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    long line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what(),
                     line, col);
  }
}

// Reads optional members of an object into existing defaults and rejects
// unknown keys, so typos in config files fail loudly.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string where) : obj_(object), where_(std::move(where)) {
    if (!obj_.is_object()) throw ArgumentError(where_ + ": expected a JSON object");
  }

  template <class T>
  void get(const char* key, T& target) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return;
    try {
      target = it->template get<T>();
    } catch (const json::exception&) {
      throw ArgumentError(where_ + "." + key + ": wrong type");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }

  const json& child(const char* key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ArgumentError(where_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace contestlab::detail
