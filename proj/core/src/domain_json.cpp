#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "heisenbound/domains.hpp"
#include "heisenbound/errors.hpp"

namespace heisenbound {

namespace {

using nlohmann::json;

const json& require_key(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidArgument(fmt::format("domain spec: missing key \"{}\"", key));
  return *it;
}

Vec3 read_vec3(const json& obj, const char* key) {
  const json& v = require_key(obj, key);
  if (!v.is_array() || v.size() != 3) {
    throw InvalidArgument(fmt::format("domain spec: \"{}\" must be an array of 3 numbers", key));
  }
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) {
      throw InvalidArgument(fmt::format("domain spec: \"{}\"[{}] is not a number", key, i));
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

double read_number(const json& obj, const char* key) {
  const json& v = require_key(obj, key);
  if (!v.is_number()) throw InvalidArgument(fmt::format("domain spec: \"{}\" is not a number", key));
  return v.get<double>();
}

}  // namespace

DomainSpec parse_domain(const std::string& json_text) {
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(fmt::format("domain spec: malformed JSON ({})", e.what()));
  }
  if (!obj.is_object()) throw InvalidArgument("domain spec: expected a JSON object");
  const json& type = require_key(obj, "type");
  if (!type.is_string()) throw InvalidArgument("domain spec: \"type\" must be a string");
  const std::string kind = type.get<std::string>();
  if (kind == "box") return DomainSpec::box(read_vec3(obj, "min"), read_vec3(obj, "max"));
  if (kind == "euclidean_ball" || kind == "cc_ball") {
    const Vec3 c = read_vec3(obj, "center");
    const double r = read_number(obj, "radius");
    const GroupPoint center{c[0], c[1], c[2]};
    return kind == "cc_ball" ? DomainSpec::cc_ball(center, r) : DomainSpec::euclidean_ball(center, r);
  }
  throw InvalidArgument(fmt::format("domain spec: unknown \"type\" \"{}\"", kind));
}

DomainSpec load_domain_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("domain_file: cannot open \"{}\"", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_domain(text.str());
}

std::string to_json(const DomainSpec& spec) {
  json obj;
  obj["type"] = to_string(spec.kind);
  if (spec.kind == DomainKind::box) {
    obj["min"] = spec.min;
    obj["max"] = spec.max;
  } else {
    obj["center"] = {spec.center.x1, spec.center.x2, spec.center.x3};
    obj["radius"] = spec.radius;
  }
  return obj.dump();
}

}  // namespace heisenbound
