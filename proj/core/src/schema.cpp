#include "koopsub/schema.hpp"

#include <cmath>

#include <json.hpp>

#include "config_schema.hpp"
#include "koopsub/errors.hpp"

namespace koopsub::schema {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      return std::isfinite(d) && std::floor(d) == d;
    }
    return false;
  }
  return false;
}

void check(const json& v, const json& s, const json& root, const std::string& path,
           std::vector<std::string>& errs) {
  if (s.is_boolean()) {
    if (!s.get<bool>()) errs.push_back(path + ": no value is allowed here");
    return;
  }
  if (!s.is_object()) throw Error(ErrorCode::config_error, "schema: subschema at " + path + " is not an object");
  const std::string where = path.empty() ? "/" : path;

  if (auto it = s.find("$ref"); it != s.end()) {
    const std::string ref = it->get<std::string>();
    if (ref.empty() || ref[0] != '#') throw Error(ErrorCode::config_error, "schema: only local $ref is supported: " + ref);
    const json::json_pointer ptr(ref.substr(1));
    if (!root.contains(ptr)) throw Error(ErrorCode::config_error, "schema: unresolved $ref " + ref);
    check(v, root.at(ptr), root, path, errs);
  }

  if (auto it = s.find("type"); it != s.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = has_type(v, it->get<std::string>());
    } else {
      for (const auto& t : *it) ok = ok || has_type(v, t.get<std::string>());
    }
    if (!ok) {
      errs.push_back(where + ": expected type " + it->dump());
      return;
    }
  }
  if (auto it = s.find("const"); it != s.end() && v != *it) {
    errs.push_back(where + ": must equal " + it->dump());
  }
  if (auto it = s.find("enum"); it != s.end()) {
    bool ok = false;
    for (const auto& e : *it) ok = ok || v == e;
    if (!ok) errs.push_back(where + ": must be one of " + it->dump());
  }
  if (auto it = s.find("anyOf"); it != s.end()) {
    bool ok = false;
    for (const auto& alt : *it) {
      std::vector<std::string> sub;
      check(v, alt, root, path, sub);
      ok = ok || sub.empty();
    }
    if (!ok) errs.push_back(where + ": matches none of the alternatives");
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (auto it = s.find("minimum"); it != s.end() && d < it->get<double>()) {
      errs.push_back(where + ": must be >= " + it->dump());
    }
    if (auto it = s.find("maximum"); it != s.end() && d > it->get<double>()) {
      errs.push_back(where + ": must be <= " + it->dump());
    }
    if (auto it = s.find("exclusiveMinimum"); it != s.end() && d <= it->get<double>()) {
      errs.push_back(where + ": must be > " + it->dump());
    }
    if (auto it = s.find("exclusiveMaximum"); it != s.end() && d >= it->get<double>()) {
      errs.push_back(where + ": must be < " + it->dump());
    }
  }
  if (v.is_string()) {
    if (auto it = s.find("minLength"); it != s.end() && v.get<std::string>().size() < it->get<std::size_t>()) {
      errs.push_back(where + ": string shorter than " + it->dump());
    }
  }
  if (v.is_array()) {
    if (auto it = s.find("minItems"); it != s.end() && v.size() < it->get<std::size_t>()) {
      errs.push_back(where + ": fewer than " + it->dump() + " items");
    }
    if (auto it = s.find("maxItems"); it != s.end() && v.size() > it->get<std::size_t>()) {
      errs.push_back(where + ": more than " + it->dump() + " items");
    }
    if (auto it = s.find("items"); it != s.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], *it, root, path + "/" + std::to_string(i), errs);
    }
  }
  if (v.is_object()) {
    const json empty = json::object();
    const json& props = s.contains("properties") ? s.at("properties") : empty;
    if (auto it = s.find("required"); it != s.end()) {
      for (const auto& key : *it) {
        if (!v.contains(key.get<std::string>())) {
          errs.push_back(where + ": missing required property '" + key.get<std::string>() + "'");
        }
      }
    }
    for (const auto& [key, val] : v.items()) {
      const std::string child = path + "/" + key;
      if (props.contains(key)) {
        check(val, props.at(key), root, child, errs);
      } else if (auto it = s.find("additionalProperties"); it != s.end()) {
        if (it->is_boolean() && !it->get<bool>()) {
          errs.push_back(child + ": unknown property");
        } else if (it->is_object()) {
          check(val, *it, root, child, errs);
        }
      }
    }
  }
}

}  // namespace

std::string_view config_schema() { return detail::kConfigSchema; }

std::vector<std::string> validate(std::string_view instance, std::string_view schema) {
  json s;
  try {
    s = json::parse(schema);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("schema: ") + e.what());
  }
  json v;
  try {
    v = json::parse(instance);
  } catch (const json::exception& e) {
    return {std::string("malformed JSON: ") + e.what()};
  }
  std::vector<std::string> errs;
  check(v, s, s, "", errs);
  return errs;
}

}  // namespace koopsub::schema
