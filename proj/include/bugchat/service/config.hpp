#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "bugchat/match/matcher.hpp"

namespace bugchat::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path asset_dir = "bugchat-data";
  match::MatchConfig thresholds;
  std::size_t upload_limit = 64 * 1024 * 1024;
};

/// Environment lookup; returns nullopt for unset variables.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

/// Reads
///   {"listen": "host:port", "asset_dir": "...", "upload_limit_bytes": N,
///    "thresholds": {"screen": 0.5, "edge": 0.5, "page_size": 5}}
/// Every key is optional. Relative asset dirs resolve against `base`.
ServiceConfig parse_config(std::string_view json_text,
                           const std::filesystem::path& base = {});

/// BUGCHAT_LISTEN ("host:port") and BUGCHAT_ASSET_DIR override the file.
void apply_env(ServiceConfig& config, const EnvLookup& env = process_env);

ServiceConfig load_config(const std::filesystem::path& path,
                          const EnvLookup& env = process_env);

/// "host:port"; throws ValidationError.
void parse_listen(std::string_view value, ServiceConfig& config);

}  // namespace bugchat::service
