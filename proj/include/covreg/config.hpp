#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace covreg::cli {

/// `key = value` lines; blank lines and `#` comments ignored. Keys may use
/// `_` or `-` interchangeably. Throws Error(Format) on malformed lines or
/// duplicate keys.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in);
[[nodiscard]] std::vector<std::pair<std::string, std::string>> load_config(const std::filesystem::path& path);

/// Rewrites a subcommand's argument list so that settings from `--config
/// <path>` come first as `--key=value` arguments, followed by the explicit flags
/// (which therefore take precedence).
[[nodiscard]] std::vector<std::string> expand_config_args(const std::vector<std::string>& args);

}  // namespace covreg::cli
