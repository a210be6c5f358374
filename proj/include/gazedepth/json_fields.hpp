#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace gazedepth::json_fields {

// Field accessors for strict document parsing. Every error message starts
// with the dotted path of the offending field; `Error` is the exception thrown.
template <typename Error>
struct Reader {
  const nlohmann::json& node;
  std::string path;

  [[noreturn]] void fail(std::string_view field, std::string_view what) const {
    throw Error(join(field) + ": " + std::string(what));
  }

  std::string join(std::string_view field) const {
    if (path.empty()) return std::string(field);
    if (field.empty()) return path;
    return path + "." + std::string(field);
  }

  void require_object() const {
    if (!node.is_object()) throw Error((path.empty() ? std::string("document") : path) + ": expected an object");
  }

  void only_keys(std::initializer_list<std::string_view> allowed) const {
    require_object();
    for (const auto& [key, value] : node.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) throw Error(join(key) + ": unknown key");
    }
  }

  bool has(std::string_view field) const { return node.contains(std::string(field)); }

  const nlohmann::json& at(std::string_view field) const {
    auto it = node.find(std::string(field));
    if (it == node.end()) fail(field, "missing required field");
    return *it;
  }

  Reader child(std::string_view field) const { return Reader{at(field), join(field)}; }

  double number(std::string_view field) const {
    const nlohmann::json& v = at(field);
    if (!v.is_number()) fail(field, "expected a number");
    return v.get<double>();
  }

  double number_or(std::string_view field, double fallback) const {
    return has(field) ? number(field) : fallback;
  }

  long long integer(std::string_view field) const {
    const nlohmann::json& v = at(field);
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<long long>();
  }

  std::string string(std::string_view field) const {
    const nlohmann::json& v = at(field);
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }

  std::string string_or(std::string_view field, std::string fallback) const {
    return has(field) ? string(field) : fallback;
  }

  bool boolean(std::string_view field) const {
    const nlohmann::json& v = at(field);
    if (!v.is_boolean()) fail(field, "expected true or false");
    return v.get<bool>();
  }

  Eigen::Vector3d vec3(std::string_view field) const {
    const nlohmann::json& v = at(field);
    if (!v.is_array() || v.size() != 3) fail(field, "expected [x, y, z]");
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) fail(field, "expected [x, y, z] of numbers");
      out[i] = v[i].get<double>();
    }
    return out;
  }

  const nlohmann::json& array(std::string_view field) const {
    const nlohmann::json& v = at(field);
    if (!v.is_array()) fail(field, "expected an array");
    return v;
  }
};

}  // namespace gazedepth::json_fields
