// HTTP session service for human-in-the-loop tuning. Sessions live under
// $PBO_DATA_DIR (default ./pbo_data). No authentication: bind to localhost.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pbo/service/http_server.hpp"
#include "pbo/service/session_store.hpp"

namespace {

pbo::service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Duel session service"};
  int port = 8080;
  std::string host = "127.0.0.1";
  app.add_option("--port", port, "TCP port")->capture_default_str();
  app.add_option("--host", host, "Bind address")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const char* env = std::getenv("PBO_DATA_DIR");
  const std::string data_dir = env && *env ? env : "pbo_data";

  try {
    pbo::service::SessionStore store(data_dir);
    pbo::service::HttpServer server(store);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "serving sessions from " << data_dir << " on http://" << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
