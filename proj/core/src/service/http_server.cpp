#include "pbo/service/http_server.hpp"

#include <httplib.h>

#include "pbo/common/errors.hpp"

namespace pbo::service {

using nlohmann::json;

struct HttpServer::Impl {
  SessionStore& store;
  httplib::Server server;

  explicit Impl(SessionStore& s) : store(s) {}

  template <class F>
  void handle(httplib::Response& res, F&& f) {
    json body;
    try {
      body = f();
      res.status = 200;
    } catch (const ServiceError& e) {
      res.status = e.status();
      body = e.extra();
      body["error"] = e.what();
    } catch (const MalformedInput& e) {
      res.status = 400;
      body = {{"error", e.what()}};
    } catch (const json::exception& e) {
      res.status = 400;
      body = {{"error", std::string("bad JSON: ") + e.what()}};
    } catch (const std::exception& e) {
      res.status = 500;
      body = {{"error", e.what()}};
    }
    res.set_content(body.dump(), "application/json");
  }

  void routes() {
    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] { return store.create(req.body.empty() ? json(nullptr) : json::parse(req.body)); });
    });
    server.Get("/sessions", [this](const httplib::Request&, httplib::Response& res) {
      handle(res, [&] { return store.list(); });
    });
    server.Get(R"(/sessions/([A-Za-z0-9_-]+)/duel)", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] { return store.duel(req.matches[1]); });
    });
    server.Post(R"(/sessions/([A-Za-z0-9_-]+)/choice)", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] {
        const json body = json::parse(req.body);
        if (!body.is_object() || !body.contains("duel_index") || !body.contains("winner") ||
            !body["duel_index"].is_number_integer() || !body["winner"].is_string()) {
          throw ServiceError(400, "body must be {\"duel_index\": int, \"winner\": \"first\"|\"second\"}");
        }
        return store.choose(req.matches[1], body["duel_index"].get<int>(), body["winner"].get<std::string>());
      });
    });
    server.Get(R"(/sessions/([A-Za-z0-9_-]+)/export)", [this](const httplib::Request& req, httplib::Response& res) {
      handle(res, [&] { return store.export_session(req.matches[1]); });
    });
  }
};

HttpServer::HttpServer(SessionStore& store) : impl_(std::make_unique<Impl>(store)) { impl_->routes(); }

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace pbo::service
