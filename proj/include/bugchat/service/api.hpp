#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bugchat/clock.hpp"
#include "bugchat/dialogue/session.hpp"
#include "bugchat/errors.hpp"
#include "bugchat/ingest/repository.hpp"
#include "bugchat/service/config.hpp"

namespace bugchat::service {

struct ApiRequest {
  std::string method;
  std::string path;  // without query string
  std::string body;
  // Multipart parts by field name (uploads only).
  std::map<std::string, std::string> files;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// HTTP status for a library error kind.
int status_for(ErrorKind kind);

/// {"error": kind, "message": ..., "reason"?: ...}
ApiResponse error_response(int status, std::string_view kind, std::string_view message,
                           std::optional<std::string> reason = std::nullopt);

Json summary_json(const ingest::AppSummary& summary);

/// Transport-independent request handling. Thread-safe.
class ApiService {
 public:
  explicit ApiService(ServiceConfig config, Clock clock = system_clock());

  ApiResponse handle(const ApiRequest& request);

  ingest::AppRepository& repository() { return *repository_; }
  const ServiceConfig& config() const { return config_; }
  std::size_t session_count() const;

 private:
  ApiResponse route(const ApiRequest& request);
  ApiResponse list_apps();
  ApiResponse upload_app(const ApiRequest& request);
  ApiResponse capture(const std::string& app_id, const std::string& fingerprint);
  ApiResponse icon(const std::string& app_id);
  ApiResponse create_session(const ApiRequest& request);
  ApiResponse session_event(const std::string& id, const std::string& event,
                            const ApiRequest& request);
  ApiResponse session_report(const std::string& id, bool markdown);

  std::shared_ptr<dialogue::Session> session(const std::string& id) const;

  ServiceConfig config_;
  std::unique_ptr<ingest::AppRepository> repository_;
  std::unique_ptr<dialogue::Engine> engine_;

  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<dialogue::Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

/// Directory view of the repository for the dialogue engine.
dialogue::AppDirectory repository_directory(const ingest::AppRepository& repository);

}  // namespace bugchat::service
