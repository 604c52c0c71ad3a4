#include "bugchat/service/api.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bugchat/errors.hpp"
#include "bugchat/report/report.hpp"

namespace bugchat::service {
namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    auto j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    if (j > i) parts.push_back(path.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

ApiResponse json_response(int status, const Json& body) {
  return {status, "application/json", body.dump()};
}

std::string content_type_for(const std::string& path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == "png") return "image/png";
  if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
  if (ext == "webp") return "image/webp";
  if (ext == "gif") return "image/gif";
  return "application/octet-stream";
}

std::optional<std::string> read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Json parse_body(const ApiRequest& request) {
  auto j = parse_json(request.body.empty() ? std::string_view("{}") : request.body);
  require_object(j, "body");
  return j;
}

int parse_index(const std::string& text) {
  int value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw NotFoundError("bad step index " + text);
  }
  return value;
}

}  // namespace

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kBusy:
      return 409;
    case ErrorKind::kParse:
    case ErrorKind::kValidation:
    case ErrorKind::kProtocol:
    case ErrorKind::kInvalidOption:
    case ErrorKind::kInvalidatedPrediction:
    case ErrorKind::kEmptyInput:
      return 400;
    case ErrorKind::kModelIntegrity:
      return 422;
    case ErrorKind::kIo:
      return 500;
  }
  return 500;
}

ApiResponse error_response(int status, std::string_view kind, std::string_view message,
                           std::optional<std::string> reason) {
  Json j = {{"error", kind}, {"message", message}};
  if (reason) j["reason"] = *reason;
  return json_response(status, j);
}

Json summary_json(const ingest::AppSummary& s) {
  return {{"app_id", s.app_id},
          {"name", s.name},
          {"version", s.version},
          {"icon_url", s.has_icon ? Json("/apps/" + s.app_id + "/icon") : Json(nullptr)},
          {"node_count", s.node_count},
          {"edge_count", s.edge_count}};
}

dialogue::AppDirectory repository_directory(const ingest::AppRepository& repository) {
  dialogue::AppDirectory dir;
  dir.list = [&repository] {
    auto apps = repository.list();
    std::sort(apps.begin(), apps.end(), [](const auto& a, const auto& b) {
      return std::tie(a.name, a.version, a.app_id) < std::tie(b.name, b.version, b.app_id);
    });
    std::vector<dialogue::AppChoice> out;
    for (const auto& s : apps) {
      out.push_back({s.app_id, s.name + " " + s.version,
                     s.has_icon ? std::optional<std::string>("/apps/" + s.app_id + "/icon")
                                : std::nullopt});
    }
    return out;
  };
  dir.find = [&repository](const std::string& id) { return repository.find(id); };
  return dir;
}

ApiService::ApiService(ServiceConfig config, Clock clock) : config_(std::move(config)) {
  repository_ = std::make_unique<ingest::AppRepository>(config_.asset_dir,
                                                        text::Lexicon::builtin(), clock);
  repository_->load_existing();
  engine_ = std::make_unique<dialogue::Engine>(repository_directory(*repository_),
                                               text::Lexicon::builtin(), config_.thresholds,
                                               dialogue::Tips::builtin(), clock);
}

std::size_t ApiService::session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

ApiResponse ApiService::handle(const ApiRequest& request) {
  try {
    return route(request);
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

ApiResponse ApiService::route(const ApiRequest& request) {
  auto parts = split_path(request.path);
  const auto& m = request.method;
  auto not_allowed = [&] {
    return error_response(405, "method_not_allowed", m + " " + request.path);
  };

  if (parts.empty()) return error_response(404, "not_found", "no such endpoint");

  if (parts[0] == "apps") {
    if (parts.size() == 1) {
      if (m == "GET") return list_apps();
      if (m == "POST") return upload_app(request);
      return not_allowed();
    }
    if (parts.size() == 3 && parts[2] == "icon") {
      if (m != "GET") return not_allowed();
      return icon(parts[1]);
    }
    if (parts.size() == 5 && parts[2] == "screens" && parts[4] == "capture") {
      if (m != "GET") return not_allowed();
      return capture(parts[1], parts[3]);
    }
  } else if (parts[0] == "sessions") {
    if (parts.size() == 1) {
      if (m != "POST") return not_allowed();
      return create_session(request);
    }
    const auto& id = parts[1];
    if (parts.size() == 2) {
      if (m != "GET") return not_allowed();
      return json_response(200, dialogue::to_json(session(id)->view()));
    }
    if (parts.size() == 3 && (parts[2] == "report" || parts[2] == "report.md")) {
      if (m != "GET") return not_allowed();
      return session_report(id, parts[2] == "report.md");
    }
    if (parts.size() == 3) {
      if (m != "POST") return not_allowed();
      return session_event(id, parts[2], request);
    }
    if (parts.size() == 4 && parts[2] == "steps") {
      if (m != "PATCH") return not_allowed();
      return session_event(id, "steps/" + parts[3], request);
    }
  }
  return error_response(404, "not_found", "no such endpoint");
}

ApiResponse ApiService::list_apps() {
  auto apps = repository_->list();
  std::sort(apps.begin(), apps.end(), [](const auto& a, const auto& b) {
    return std::tie(a.name, a.version, a.app_id) < std::tie(b.name, b.version, b.app_id);
  });
  Json out = Json::array();
  for (const auto& s : apps) out.push_back(summary_json(s));
  return json_response(200, out);
}

ApiResponse ApiService::upload_app(const ApiRequest& request) {
  std::size_t total = request.body.size();
  for (const auto& [name, bytes] : request.files) total += bytes.size();
  if (total > config_.upload_limit) {
    return error_response(413, "payload_too_large",
                          "upload exceeds " + std::to_string(config_.upload_limit) + " bytes");
  }
  auto zip = request.files.find("zip");
  if (zip == request.files.end()) {
    throw ValidationError("multipart field 'zip' is required", "zip");
  }
  std::optional<std::string> icon;
  if (auto it = request.files.find("icon"); it != request.files.end()) icon = it->second;
  auto report = repository_->ingest(zip->second, std::move(icon));
  return json_response(report.ok ? 201 : 422, ingest::to_json(report));
}

ApiResponse ApiService::capture(const std::string& app_id, const std::string& fingerprint) {
  auto model = repository_->find(app_id);
  if (!model) return error_response(404, "not_found", "unknown app " + app_id, "unknown_app");
  model::Fingerprint fp{fingerprint};
  if (fp == model::start_fingerprint() || !model->contains(fp)) {
    return error_response(404, "not_found", "unknown screen " + fingerprint, "unknown_screen");
  }
  const auto& screen = model->screen(fp);
  if (!screen.screenshot) {
    return error_response(404, "not_found", "screen has no capture", "no_screenshot");
  }
  auto path = repository_->asset_path(app_id, *screen.screenshot);
  auto bytes = path ? read_binary(*path) : std::nullopt;
  if (!bytes) {
    return error_response(404, "not_found", "capture file missing: " + *screen.screenshot,
                          "capture_missing");
  }
  return {200, content_type_for(*screen.screenshot), std::move(*bytes)};
}

ApiResponse ApiService::icon(const std::string& app_id) {
  if (!repository_->find(app_id)) {
    return error_response(404, "not_found", "unknown app " + app_id, "unknown_app");
  }
  auto path = repository_->icon_path(app_id);
  auto bytes = path ? read_binary(*path) : std::nullopt;
  if (!bytes) return error_response(404, "not_found", "app has no icon", "no_icon");
  return {200, "image/png", std::move(*bytes)};
}

std::shared_ptr<dialogue::Session> ApiService::session(const std::string& id) const {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session " + id);
  return it->second;
}

ApiResponse ApiService::create_session(const ApiRequest& request) {
  auto body = parse_body(request);
  auto app_id = optional_string(body, "app_id", "body");
  std::string id;
  {
    std::lock_guard lock(sessions_mutex_);
    id = "s-" + std::to_string(next_session_++);
  }
  auto started = dialogue::start_session(*engine_, id, app_id);
  {
    std::lock_guard lock(sessions_mutex_);
    sessions_[id] = started.session;
  }
  return json_response(201, dialogue::to_json(started.response));
}

ApiResponse ApiService::session_event(const std::string& id, const std::string& event,
                                      const ApiRequest& request) {
  auto s = session(id);
  auto body = parse_body(request);
  dialogue::DialogueResponse response;
  if (event == "messages") {
    response = s->handle_text(require_string(body, "text", "body"));
  } else if (event == "selections") {
    const auto& ids = require_field(body, "option_ids", "body");
    if (!ids.is_array()) throw ValidationError("option_ids must be an array", "option_ids");
    std::vector<std::string> options;
    for (const auto& v : ids) {
      if (!v.is_string()) throw ValidationError("option ids are strings", "option_ids");
      options.push_back(v.get<std::string>());
    }
    response = s->handle_selection(options);
  } else if (event == "confirmations") {
    const auto& value = require_field(body, "value", "body");
    if (!value.is_boolean()) throw ValidationError("value must be a boolean", "value");
    response = s->handle_confirmation(value.get<bool>());
  } else if (event == "actions") {
    auto name = require_string(body, "action", "body");
    auto action = dialogue::parse_quick_action(name);
    if (!action) throw Error(ErrorKind::kInvalidOption, "unknown action " + name);
    response = s->handle_quick_action(*action);
  } else if (event.rfind("steps/", 0) == 0) {
    int index = parse_index(event.substr(6));
    response = s->edit_step(index, require_string(body, "text", "body"));
  } else {
    return error_response(404, "not_found", "no such endpoint");
  }
  return json_response(200, dialogue::to_json(response));
}

ApiResponse ApiService::session_report(const std::string& id, bool markdown) {
  auto s = session(id);
  auto state = s->snapshot();
  auto checked = report::check_assets(s->report(), [&](const std::string& relative) {
    return repository_->asset_path(state.app_id, relative).has_value();
  });
  if (markdown) {
    return {200, "text/markdown; charset=utf-8", report::render_markdown(checked.report)};
  }
  return {200, "application/json", report::render_structured(checked.report)};
}

}  // namespace bugchat::service
