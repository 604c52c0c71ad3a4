#include "bugchat/service/http_server.hpp"

#include <httplib.h>

#include "bugchat/errors.hpp"

namespace bugchat::service {

HttpServer::HttpServer(ApiService& api)
    : api_(&api), server_(std::make_unique<httplib::Server>()) {
  // Up to twice the limit reaches the API (JSON 413); beyond that httplib answers 413.
  server_->set_payload_max_length(api.config().upload_limit * 2 + (1 << 20));

  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    if (req.is_multipart_form_data()) {
      for (const auto& [name, part] : req.files) request.files.emplace(name, part.content);
    } else {
      request.body = req.body;
    }
    auto response = api_->handle(request);
    res.status = response.status;
    res.set_content(std::move(response.body), response.content_type);
  };
  const char* all = R"(/.*)";
  server_->Get(all, handler);
  server_->Post(all, handler);
  server_->Patch(all, handler);
  server_->Put(all, handler);
  server_->Delete(all, handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::kIo, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorKind::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::run() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_->is_running()) server_->stop();
}

}  // namespace bugchat::service
