/**
 * @file server.hpp
 * @brief JSON-over-HTTP suggestion service.
 *
 * Endpoints:
 *   GET  /api/health    -> {status, model_topology, format_version}; 503 until a model is set
 *   POST /api/suggest   {label, prev_fingering?, k?} -> {label, suggestions: [...]}
 *   POST /api/continue  {labels: [...], first_fingering} -> {labels, fingerings, annotations}
 * Errors are {"error": {"code", "category", "message", "index"?, "field"?}} with status 400.
 *
 * Service holds the request logic and is usable without sockets; HttpServer
 * binds it to cpp-httplib and optionally serves a static UI bundle under "/".
 */
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "chordiag/model.hpp"

namespace chordiag::server {

inline constexpr int kDefaultK = 5;
inline constexpr int kMaxK = 25;

struct Response {
  int status = 200;
  std::string body;  ///< JSON text
};

struct RequestCounters {
  std::uint64_t health = 0;
  std::uint64_t suggest = 0;
  std::uint64_t continuation = 0;
  std::uint64_t client_errors = 0;
};

class Service {
 public:
  Service() = default;
  explicit Service(std::shared_ptr<const SuggestionModel> model) : model_(std::move(model)) {}

  /// Must be called before requests are served; the model is read-only afterwards.
  void set_model(std::shared_ptr<const SuggestionModel> model) { model_ = std::move(model); }
  bool has_model() const noexcept { return model_ != nullptr; }

  Response health() const;
  Response suggest(std::string_view body) const;
  Response continue_sequence(std::string_view body) const;

  RequestCounters counters() const;

 private:
  std::shared_ptr<const SuggestionModel> model_;
  mutable std::atomic<std::uint64_t> health_count_{0};
  mutable std::atomic<std::uint64_t> suggest_count_{0};
  mutable std::atomic<std::uint64_t> continue_count_{0};
  mutable std::atomic<std::uint64_t> error_count_{0};
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;          ///< 0 picks a free port
  std::string static_dir;   ///< served under "/" when non-empty
  bool permissive_cors = false;
};

class HttpServer {
 public:
  HttpServer(const Service& service, ServerOptions options);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket; returns the bound port or -1.
  int bind();
  /// Blocks serving requests until stop().
  bool serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chordiag::server
