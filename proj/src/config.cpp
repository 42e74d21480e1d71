#include "covreg/config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>

#include "covreg/errors.hpp"

namespace covreg::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Format, "config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) {
      throw Error(ErrorKind::Format, "config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    }
    std::replace(key.begin(), key.end(), '_', '-');
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::Format, "config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    out.emplace_back(std::move(key), value);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot open config '" + path.string() + "'");
  return parse_config(in);
}

std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> from_config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw Error(ErrorKind::InvalidArgument, "--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    if (!from_config.empty()) throw Error(ErrorKind::InvalidArgument, "--config given more than once");
    for (auto& [key, value] : load_config(path)) {
      if (key == "config") throw Error(ErrorKind::Format, "config files cannot include other configs");
      from_config.push_back("--" + key + "=" + value);
    }
  }
  from_config.insert(from_config.end(), rest.begin(), rest.end());
  return from_config;
}

}  // namespace covreg::cli
