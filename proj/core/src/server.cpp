#include "chordiag/server.hpp"

#include <optional>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "chordiag/chords.hpp"
#include "chordiag/error.hpp"
#include "chordiag/fretboard.hpp"
#include "chordiag/metrics.hpp"
#include "chordiag/suggest.hpp"

namespace chordiag::server {

namespace {

using nlohmann::json;

// A client error carrying the wire code and, optionally, where it happened.
struct RequestError {
  std::string code;
  std::string category;
  std::string message;
  std::optional<std::size_t> index;
  std::string field;
};

std::string category_of(ErrorCode code) {
  if (is_label_error(code)) return "MalformedLabel";
  if (is_fingering_error(code)) return "MalformedFingering";
  return std::string(to_string(code));
}

Response error_response(const RequestError& e) {
  json err = {{"code", e.code}, {"category", e.category}, {"message", e.message}};
  if (e.index) err["index"] = *e.index;
  if (!e.field.empty()) err["field"] = e.field;
  return {400, json{{"error", err}}.dump()};
}

RequestError from_error(const Error& e, std::string field, std::optional<std::size_t> index = std::nullopt) {
  return {std::string(to_string(e.code())), category_of(e.code()), e.what(), index, std::move(field)};
}

RequestError bad_request(std::string message, std::string field = {}) {
  return {"MalformedRequest", "MalformedRequest", std::move(message), std::nullopt, std::move(field)};
}

Response unavailable() { return {503, json{{"status", "unavailable"}}.dump()}; }

Response internal_error() {
  return {500, json{{"error", {{"code", "Internal"}, {"category", "Internal"}, {"message", "internal error"}}}}.dump()};
}

json texture_json(const TextureProfile& t) {
  return {{"muted_ratio", t.muted_ratio},
          {"open_ratio", t.open_ratio},
          {"string_centroid", t.string_centroid},
          {"unique_note_ratio", t.unique_note_ratio}};
}

json annotations_json(const Diagram& d, const Annotations& a) {
  json out = {{"playability", a.playability},
              {"unplayable", a.unplayable},
              {"pitch_f1", a.pitch_f1},
              {"texture", texture_json(texture(d))}};
  if (a.chord_change_ease) out["chord_change_ease"] = *a.chord_change_ease;
  return out;
}

json parse_body(std::string_view body) {
  json parsed = json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) throw bad_request("request body must be a JSON object");
  return parsed;
}

std::string string_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw bad_request(std::string("field '") + key + "' must be a string", key);
  return it->get<std::string>();
}

template <typename Fn>
Response guarded(std::atomic<std::uint64_t>& errors, Fn&& fn) {
  try {
    return fn();
  } catch (const RequestError& e) {
    ++errors;
    return error_response(e);
  } catch (...) {
    return internal_error();
  }
}

}  // namespace

RequestCounters Service::counters() const {
  return {health_count_.load(), suggest_count_.load(), continue_count_.load(), error_count_.load()};
}

Response Service::health() const {
  ++health_count_;
  if (!model_) return unavailable();
  return {200, json{{"status", "ok"},
                    {"model_topology", std::string(to_string(model_->topology()))},
                    {"format_version", kModelFormatVersion}}
                   .dump()};
}

Response Service::suggest(std::string_view body) const {
  ++suggest_count_;
  if (!model_) return unavailable();
  return guarded(error_count_, [&]() -> Response {
    const json request = parse_body(body);

    ChordLabel label;
    try {
      label = parse_label(string_field(request, "label"));
    } catch (const Error& e) {
      throw from_error(e, "label");
    }

    std::optional<Diagram> previous;
    if (const auto it = request.find("prev_fingering"); it != request.end() && !it->is_null()) {
      if (!it->is_string()) throw bad_request("field 'prev_fingering' must be a string", "prev_fingering");
      try {
        previous = parse_fingering(it->get<std::string>());
      } catch (const Error& e) {
        throw from_error(e, "prev_fingering");
      }
    }

    int k = kDefaultK;
    if (const auto it = request.find("k"); it != request.end() && !it->is_null()) {
      if (!it->is_number_integer()) throw bad_request("field 'k' must be an integer", "k");
      const auto requested = it->get<long long>();
      if (requested < 1 || requested > kMaxK) {
        throw bad_request("field 'k' must be between 1 and " + std::to_string(kMaxK), "k");
      }
      k = static_cast<int>(requested);
    }

    std::vector<Suggestion> suggestions;
    try {
      suggestions = chordiag::suggest(*model_, label, previous, k);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingContext) throw;
      throw from_error(e, "prev_fingering");
    }

    json list = json::array();
    for (const auto& s : suggestions) {
      json item = annotations_json(s.diagram, s.annotations);
      item["fingering"] = format_fingering(s.diagram);
      item["score"] = s.score;
      list.push_back(std::move(item));
    }
    return {200, json{{"label", format_label(label)}, {"suggestions", std::move(list)}}.dump()};
  });
}

Response Service::continue_sequence(std::string_view body) const {
  ++continue_count_;
  if (!model_) return unavailable();
  return guarded(error_count_, [&]() -> Response {
    const json request = parse_body(body);
    const auto labels_it = request.find("labels");
    if (labels_it == request.end() || !labels_it->is_array() || labels_it->empty()) {
      throw bad_request("field 'labels' must be a non-empty array", "labels");
    }
    std::vector<ChordLabel> labels;
    for (std::size_t i = 0; i < labels_it->size(); ++i) {
      const auto& item = (*labels_it)[i];
      if (!item.is_string()) {
        auto e = bad_request("label at index " + std::to_string(i) + " must be a string", "labels");
        e.index = i;
        throw e;
      }
      try {
        labels.push_back(parse_label(item.get<std::string>()));
      } catch (const Error& e) {
        throw from_error(e, "labels", i);
      }
    }

    std::optional<Diagram> first;
    try {
      first = parse_fingering(string_field(request, "first_fingering"));
    } catch (const Error& e) {
      throw from_error(e, "first_fingering");
    }

    const auto diagrams = chordiag::continue_sequence(*model_, labels, *first);
    json label_texts = json::array();
    json fingerings = json::array();
    json notes = json::array();
    for (std::size_t i = 0; i < diagrams.size(); ++i) {
      std::optional<Diagram> previous;
      if (i > 0) previous = diagrams[i - 1];
      label_texts.push_back(format_label(labels[i]));
      fingerings.push_back(format_fingering(diagrams[i]));
      json step = annotations_json(diagrams[i], annotate(diagrams[i], labels[i], previous));
      if (previous) step["texture_delta"] = texture_json(texture_delta(*previous, diagrams[i]));
      notes.push_back(std::move(step));
    }
    return {200, json{{"labels", std::move(label_texts)},
                      {"fingerings", std::move(fingerings)},
                      {"annotations", std::move(notes)}}
                     .dump()};
  });
}

struct HttpServer::Impl {
  const Service& service;
  ServerOptions options;
  httplib::Server http;
  int port = -1;

  Impl(const Service& s, ServerOptions o) : service(s), options(std::move(o)) {}
};

HttpServer::HttpServer(const Service& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto& http = impl_->http;
  const Service& svc = impl_->service;
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json; charset=utf-8");
  };

  if (impl_->options.permissive_cors) {
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }
  http.Get("/api/health", [&svc, reply](const httplib::Request&, httplib::Response& res) { reply(res, svc.health()); });
  http.Post("/api/suggest", [&svc, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.suggest(req.body));
  });
  http.Post("/api/continue", [&svc, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.continue_sequence(req.body));
  });
  if (!impl_->options.static_dir.empty()) http.set_mount_point("/", impl_->options.static_dir);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(o.host);
  } else {
    impl_->port = impl_->http.bind_to_port(o.host, o.port) ? o.port : -1;
  }
  return impl_->port;
}

bool HttpServer::serve() {
  if (impl_->port < 0 && bind() < 0) return false;
  return impl_->http.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

bool HttpServer::running() const { return impl_->http.is_running(); }

}  // namespace chordiag::server
