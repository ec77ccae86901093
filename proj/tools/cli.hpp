#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ptinv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

inline constexpr int kConfigVersion = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every key a config file or --set may touch, with its default value.
[[nodiscard]] nlohmann::json default_config();

/// Layers `overlay` onto `base`. Keys unknown to `base` are a UsageError.
void merge_config(nlohmann::json& base, const nlohmann::json& overlay, const std::string& where = "");

/// Applies one "a.b.c=value" assignment. The value is read as JSON when it
/// parses, otherwise taken as a string.
void apply_assignment(nlohmann::json& config, const std::string& assignment);

/// Runs one command line (args exclude the program name). Logs go to
/// standard error; returns the process exit code.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

}  // namespace ptinv::cli
