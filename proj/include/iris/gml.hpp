// Copyright 2026 The iris-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IRIS_GML_HPP
#define IRIS_GML_HPP

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "iris/types.hpp"

namespace iris {
namespace gml {

/// A GML value: number, string or nested list of key/value pairs.
struct Value;
using List = std::vector<std::pair<std::string, Value>>;

struct Value {
  std::variant<double, std::string, List> v;

  bool is_number() const { return std::holds_alternative<double>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_list() const { return std::holds_alternative<List>(v); }
  double number() const { return std::get<double>(v); }
  const std::string& string() const { return std::get<std::string>(v); }
  const List& list() const { return std::get<List>(v); }
};

inline const Value* find(const List& l, std::string_view key) {
  for (const auto& [k, v] : l)
    if (k == key) return &v;
  return nullptr;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  List parse() {
    List top = parse_list(false);
    skip();
    if (pos_ < s_.size()) fail("unexpected ']'");
    return top;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("gml line " + std::to_string(line_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  List parse_list(bool nested) {
    List out;
    while (true) {
      skip();
      if (pos_ >= s_.size()) {
        if (nested) fail("unterminated list");
        return out;
      }
      if (s_[pos_] == ']') {
        if (!nested) return out;
        ++pos_;
        return out;
      }
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      if (pos_ == start) fail(std::string("expected a key, found '") + s_[pos_] + "'");
      std::string key(s_.substr(start, pos_ - start));
      skip();
      if (pos_ >= s_.size()) fail("missing value for '" + key + "'");
      out.emplace_back(std::move(key), parse_value());
    }
  }

  Value parse_value() {
    const char c = s_[pos_];
    if (c == '[') {
      ++pos_;
      return Value{parse_list(true)};
    }
    if (c == '"') {
      const std::size_t start = ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\n') ++line_;
        ++pos_;
      }
      if (pos_ >= s_.size()) fail("unterminated string");
      return Value{std::string(s_.substr(start, pos_++ - start))};
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != ']') ++pos_;
    const auto tok = s_.substr(start, pos_ - start);
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("bad number '" + std::string(tok) + "'");
    return Value{d};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline double unit_scale(std::string_view unit) {
  std::string u;
  for (char c : unit)
    if (!std::isspace(static_cast<unsigned char>(c))) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (u.ends_with("BPS")) u.resize(u.size() - 3);
  if (u.ends_with("B/S")) u.resize(u.size() - 3);
  if (u == "T") return 1e12;
  if (u == "G") return 1e9;
  if (u == "M") return 1e6;
  if (u == "K") return 1e3;
  if (u.empty()) return 1.0;
  return 0.0;
}

/// Parses labels such as "10 Gbps", "2.5G" or "<155 Mbps" into bits/s.
inline std::optional<double> parse_speed_label(std::string_view label) {
  std::size_t i = 0;
  while (i < label.size() && !std::isdigit(static_cast<unsigned char>(label[i]))) {
    if (std::isalpha(static_cast<unsigned char>(label[i]))) return std::nullopt;
    ++i;
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(label.data() + i, label.data() + label.size(), v);
  if (ec != std::errc()) return std::nullopt;
  const double scale = unit_scale(std::string_view(ptr, label.data() + label.size() - ptr));
  if (scale == 0.0 || !(v > 0.0)) return std::nullopt;
  return v * scale;
}

/// Link speed in bits/s from LinkSpeedRaw, LinkSpeed with LinkSpeedUnits,
/// or a LinkLabel such as "10 Gbps".
inline std::optional<double> edge_speed(const List& edge) {
  if (const Value* raw = find(edge, "LinkSpeedRaw"); raw && raw->is_number() && raw->number() > 0) return raw->number();
  if (const Value* sp = find(edge, "LinkSpeed")) {
    std::optional<double> v;
    if (sp->is_number()) v = sp->number();
    if (sp->is_string()) v = parse_speed_label(sp->string());
    const Value* units = find(edge, "LinkSpeedUnits");
    if (v && units && units->is_string()) {
      const double s = unit_scale(units->string());
      if (s > 0) return *v * s;
    }
  }
  if (const Value* lab = find(edge, "LinkLabel"); lab && lab->is_string()) return parse_speed_label(lab->string());
  return std::nullopt;
}

/// Converts a GML graph into the topology JSON document. Node names come
/// from labels; duplicate labels get the node id appended. Edges without a
/// recognizable speed use `default_gbps` if given, else fail.
inline nlohmann::json to_topology_json(std::string_view text, std::optional<double> default_gbps = std::nullopt) {
  const List top = Parser(text).parse();
  const Value* graph = find(top, "graph");
  if (!graph || !graph->is_list()) throw ParseError("gml: no graph block");
  const List& g = graph->list();
  bool directed = false;
  if (const Value* d = find(g, "directed"); d && d->is_number()) directed = d->number() != 0.0;

  std::map<long long, std::string> names;
  std::unordered_map<std::string, int> used;
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [k, v] : g) {
    if (k != "node") continue;
    if (!v.is_list()) throw ParseError("gml: node is not a list");
    const Value* id = find(v.list(), "id");
    if (!id || !id->is_number()) throw ParseError("gml: node without numeric id");
    const auto nid = static_cast<long long>(id->number());
    const Value* label = find(v.list(), "label");
    std::string name = label && label->is_string() ? label->string() : std::to_string(nid);
    if (used[name]++ > 0) name += "_" + std::to_string(nid);
    if (!names.emplace(nid, name).second) throw ValidationError("gml: duplicate node id " + std::to_string(nid));
    nodes.push_back(name);
  }

  nlohmann::json edges = nlohmann::json::array();
  std::size_t index = 0;
  for (const auto& [k, v] : g) {
    if (k != "edge") continue;
    const std::string where = "gml: edge " + std::to_string(index++);
    if (!v.is_list()) throw ParseError(where + " is not a list");
    const Value* s = find(v.list(), "source");
    const Value* t = find(v.list(), "target");
    if (!s || !t || !s->is_number() || !t->is_number()) throw ParseError(where + " lacks source/target");
    auto sn = names.find(static_cast<long long>(s->number()));
    auto tn = names.find(static_cast<long long>(t->number()));
    if (sn == names.end() || tn == names.end()) throw ValidationError(where + " references an unknown node");
    auto bps = edge_speed(v.list());
    double gbps = 0.0;
    if (bps)
      gbps = *bps / 1e9;
    else if (default_gbps)
      gbps = *default_gbps;
    else
      throw ValidationError(where + " (" + sn->second + "-" + tn->second + ") has no link speed");
    edges.push_back({{"src", sn->second}, {"dst", tn->second}, {"gbps", gbps}});
  }
  nlohmann::json doc;
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["directed"] = directed;
  return doc;
}

}  // namespace gml
}  // namespace iris

#endif  // IRIS_GML_HPP
