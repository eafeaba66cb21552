#include "iodeep/pacs/server.hpp"

#include <charconv>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "iodeep/dicom/file.hpp"
#include "iodeep/error.hpp"
#include "iodeep/pacs/render.hpp"
#include "iodeep/pacs/wire.hpp"

namespace iodeep::pacs {

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kUid = R"(([0-9.]+))";

void send_error(httplib::Response& res, const Error& e) {
  int status = wire::http_status(e.code());
  // Pipeline failures describe stored data, not a bad request.
  if (!e.stage().empty() && status == 400) status = 422;
  res.status = status;
  res.set_content(wire::error_to_json(e), kJson);
}

TagMap filters_of(const httplib::Request& req) {
  TagMap out;
  for (const auto& [k, v] : req.params) out[k] = v;
  return out;
}

std::span<const std::uint8_t> body_bytes(const httplib::Request& req) {
  return {reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size()};
}

std::string as_string(const std::vector<std::uint8_t>& bytes) { return {bytes.begin(), bytes.end()}; }

double number_param(const httplib::Request& req, const char* key) {
  const auto text = req.get_param_value(key);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::InvalidRequest, std::string(key) + " must be a number");
  }
  return v;
}

}  // namespace

ServerOptions parse_bind(std::string_view bind, ServerOptions defaults) {
  auto port_text = bind;
  if (const auto colon = bind.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) defaults.host = std::string(bind.substr(0, colon));
    port_text = bind.substr(colon + 1);
  }
  int port = -1;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw Error(Errc::InvalidRequest, "bind address '" + std::string(bind) + "' is not host:port");
  }
  defaults.port = port;
  return defaults;
}

struct HttpServer::Impl {
  PacsStore& store;
  workflow::WorkflowService& workflow;
  ServerOptions options;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  template <class F>
  static httplib::Server::Handler guard(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, Error(Errc::InvalidState, e.what()));
      }
    };
  }

  void query(httplib::Response& res, Level level, TagMap filters) {
    res.set_content(wire::summaries_to_json(store.query(level, filters)), kJson);
  }

  void routes() {
    using Req = httplib::Request;
    using Res = httplib::Response;
    const std::string uid = kUid;
    server.Get("/v1/health", guard([this](const Req&, Res& res) {
      res.set_content(R"({"status":"ok","revision":)" + std::to_string(store.revision()) + "}", kJson);
    }));
    server.Get("/v1/studies", guard([this](const Req& req, Res& res) { query(res, Level::Study, filters_of(req)); }));
    server.Get("/v1/studies/" + uid + "/series", guard([this](const Req& req, Res& res) {
      auto f = filters_of(req);
      f["StudyInstanceUID"] = req.matches[1];
      query(res, Level::Series, std::move(f));
    }));
    server.Get("/v1/series", guard([this](const Req& req, Res& res) { query(res, Level::Series, filters_of(req)); }));
    server.Get("/v1/series/" + uid + "/instances", guard([this](const Req& req, Res& res) {
      auto f = filters_of(req);
      f["SeriesInstanceUID"] = req.matches[1];
      query(res, Level::Instance, std::move(f));
    }));
    server.Get("/v1/instances", guard([this](const Req& req, Res& res) { query(res, Level::Instance, filters_of(req)); }));
    server.Get("/v1/instances/" + uid, guard([this](const Req& req, Res& res) {
      res.set_content(as_string(store.retrieve_instance(req.matches[1].str())), "application/dicom");
    }));
    server.Get("/v1/instances/" + uid + "/metadata", guard([this](const Req& req, Res& res) {
      res.set_content(wire::dataset_to_json(store.dataset(req.matches[1].str())), kJson);
    }));
    server.Get("/v1/instances/" + uid + "/rendered", guard([this](const Req& req, Res& res) {
      const auto ds = store.dataset(req.matches[1].str());
      std::optional<Window> window;
      if (req.has_param("center") || req.has_param("width")) {
        if (!req.has_param("center") || !req.has_param("width")) {
          throw Error(Errc::InvalidRequest, "center and width go together");
        }
        window = Window{number_param(req, "center"), number_param(req, "width")};
      }
      res.set_content(as_string(render_png(ds, window)), "image/png");
    }));
    server.Post("/v1/instances", guard([this](const Req& req, Res& res) {
      const auto stored = store.store_instance(body_bytes(req));
      res.set_content(wire::uid_to_json("SOPInstanceUID", stored), kJson);
    }));
    server.Get("/v1/weights/" + uid, guard([this](const Req& req, Res& res) {
      res.set_content(as_string(store.retrieve_weights(req.matches[1].str())), "application/octet-stream");
    }));
    server.Post("/v1/weights/" + uid, guard([this](const Req& req, Res& res) {
      store.store_weights(req.matches[1].str(), body_bytes(req));
      res.set_content(wire::uid_to_json("DnnUID", req.matches[1].str()), kJson);
    }));
    server.Post("/v1/predict/" + uid, guard([this](const Req& req, Res& res) {
      res.set_content(wire::prediction_to_json(workflow.run_roi_prediction(req.matches[1].str())), kJson);
    }));
    server.Post("/v1/rtstruct", guard([this](const Req& req, Res& res) {
      const auto request = wire::validation_from_json(req.body);
      const auto stored = workflow.submit_validation(request.session, request.decisions, request.reviewer);
      res.set_content(wire::uid_to_json("SOPInstanceUID", stored), kJson);
    }));
  }
};

HttpServer::HttpServer(PacsStore& store, workflow::WorkflowService& workflow, ServerOptions options)
    : impl_(new Impl{store, workflow, std::move(options), {}, {}, -1}) {
  const auto threads = std::max<std::size_t>(impl_->options.worker_threads, 1);
  impl_->server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  impl_->server.set_payload_max_length(std::size_t{1} << 30);
  impl_->routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (impl_->port >= 0) return impl_->port;
  const auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
  } else if (impl_->server.bind_to_port(o.host, o.port)) {
    impl_->port = o.port;
  }
  if (impl_->port < 0) {
    throw Error(Errc::IoFailure, "cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->port;
}

void HttpServer::listen() {
  bind();
  spdlog::info("serving /v1 on {}:{} from {}", impl_->options.host, impl_->port, impl_->store.root().string());
  impl_->server.listen_after_bind();
}

int HttpServer::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int HttpServer::port() const { return impl_->port; }

}  // namespace iodeep::pacs
