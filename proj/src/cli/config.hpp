#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace arsm::cli {

/// Invalid command line or config file; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default series tolerance, overridden by ARSM_DEFAULT_TOL.
double default_tolerance();

/// Path given by --config/--config=, if any.
std::optional<std::string> find_config_path(const std::vector<std::string>& args);

/// Appends the keys of a flat JSON object as --key=value for every option
/// not already present in `args`. Underscores in keys become dashes;
/// `true` becomes a bare flag and `false` is dropped.
std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::string& json_text);

std::vector<std::string> merge_config_file(const std::vector<std::string>& args,
                                           const std::string& path);

}  // namespace arsm::cli
