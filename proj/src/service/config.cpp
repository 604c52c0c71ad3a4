#include "bugchat/service/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bugchat/errors.hpp"
#include "bugchat/json_util.hpp"

namespace bugchat::service {

std::optional<std::string> process_env(const std::string& name) {
  const char* value = std::getenv(name.c_str());
  if (!value) return std::nullopt;
  return std::string(value);
}

void parse_listen(std::string_view value, ServiceConfig& config) {
  auto colon = value.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ValidationError("listen address must be host:port", "listen");
  }
  auto port_text = value.substr(colon + 1);
  int port = -1;
  auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() || port < 0 ||
      port > 65535) {
    throw ValidationError("bad port in listen address", "listen");
  }
  config.host = std::string(value.substr(0, colon));
  config.port = port;
}

ServiceConfig parse_config(std::string_view json_text, const std::filesystem::path& base) {
  auto j = parse_json(json_text);
  require_object(j, "config");
  ServiceConfig config;
  if (auto listen = optional_string(j, "listen", "config")) parse_listen(*listen, config);
  if (auto dir = optional_string(j, "asset_dir", "config")) {
    std::filesystem::path p(*dir);
    config.asset_dir = p.is_relative() && !base.empty() ? base / p : p;
  }
  if (j.contains("upload_limit_bytes")) {
    auto limit = require_integer(j, "upload_limit_bytes", "config");
    if (limit <= 0) throw ValidationError("upload limit must be positive", "upload_limit_bytes");
    config.upload_limit = static_cast<std::size_t>(limit);
  }
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    require_object(t, "config.thresholds");
    auto unit = [&](const char* key, double& out) {
      if (!t.contains(key)) return;
      if (!t.at(key).is_number()) throw ValidationError("not a number", key);
      out = t.at(key).get<double>();
      if (out < 0 || out > 1) throw ValidationError("threshold outside [0, 1]", key);
    };
    unit("screen", config.thresholds.screen_threshold);
    unit("edge", config.thresholds.edge_threshold);
    if (t.contains("page_size")) {
      auto size = require_integer(t, "page_size", "config.thresholds");
      if (size <= 0) throw ValidationError("page size must be positive", "page_size");
      config.thresholds.page_size = static_cast<std::size_t>(size);
    }
  }
  return config;
}

void apply_env(ServiceConfig& config, const EnvLookup& env) {
  if (auto listen = env("BUGCHAT_LISTEN")) parse_listen(*listen, config);
  if (auto dir = env("BUGCHAT_ASSET_DIR")) config.asset_dir = *dir;
}

ServiceConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  auto config = parse_config(text.str(), path.parent_path());
  apply_env(config, env);
  return config;
}

}  // namespace bugchat::service
