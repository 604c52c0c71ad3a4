#pragma once

#include <memory>
#include <string>

#include "bugchat/service/api.hpp"

namespace httplib {
class Server;
}

namespace bugchat::service {

/// httplib front end for an ApiService.
class HttpServer {
 public:
  explicit HttpServer(ApiService& api);
  ~HttpServer();

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until `stop`.
  void run();
  void stop();

 private:
  ApiService* api_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace bugchat::service
