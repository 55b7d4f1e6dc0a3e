#include "cli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace arsm::cli {

namespace {

constexpr double kBuiltinTolerance = 1e-15;

bool has_option(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ConfigError("config key '" + key + "' must be a scalar");
}

}  // namespace

double default_tolerance() {
  const char* env = std::getenv("ARSM_DEFAULT_TOL");
  if (env == nullptr || *env == '\0') return kBuiltinTolerance;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !std::isfinite(v) || !(v > 0.0)) {
    throw ConfigError(std::string("ARSM_DEFAULT_TOL is not a positive number: ") +
                      env);
  }
  return v;
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file path");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  std::vector<std::string> out = args;
  for (const auto& [key, value] : j.items()) {
    std::string name = key;
    for (char& c : name) {
      if (c == '_') c = '-';
    }
    if (name == "config" || name == "command") continue;
    const std::string flag = "--" + name;
    if (has_option(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    out.push_back(flag + "=" + scalar_text(value, key));
  }
  return out;
}

std::vector<std::string> merge_config_file(const std::vector<std::string>& args,
                                           const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return merge_config(args, ss.str());
}

}  // namespace arsm::cli
