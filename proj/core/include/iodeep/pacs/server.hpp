#pragma once

#include <memory>
#include <string>

#include "iodeep/pacs/store.hpp"
#include "iodeep/workflow.hpp"

namespace iodeep::pacs {

struct ServerOptions {
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 8042;
  std::size_t worker_threads = 8;
};

/// Splits "host:port"; a bare port keeps the default host. Throws
/// Error(InvalidRequest).
ServerOptions parse_bind(std::string_view bind, ServerOptions defaults = {});

/// The /v1 HTTP API over a store and a prediction workflow.
///
///   GET  /v1/health
///   GET  /v1/studies                      ?<filters>
///   GET  /v1/studies/{uid}/series         ?<filters>
///   GET  /v1/series                       ?<filters>
///   GET  /v1/series/{uid}/instances       ?<filters>
///   GET  /v1/instances                    ?<filters>
///   GET  /v1/instances/{uid}              application/dicom
///   GET  /v1/instances/{uid}/metadata     DICOM JSON
///   GET  /v1/instances/{uid}/rendered     ?center=&width=  image/png
///   POST /v1/instances                    application/dicom
///   GET  /v1/weights/{dnn_uid}            application/octet-stream
///   POST /v1/weights/{dnn_uid}            application/octet-stream
///   POST /v1/predict/{slice_uid}
///   POST /v1/rtstruct                     {"session", "decisions", "reviewer"}
///
/// Failures answer {"error", "message", "stage"} with a 4xx/5xx status.
class HttpServer {
 public:
  HttpServer(PacsStore& store, workflow::WorkflowService& workflow, ServerOptions options = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket and returns the port. Throws Error(IoFailure).
  int bind();
  /// Serves until stop(); binds first if needed.
  void listen();
  /// bind() and serve on a background thread.
  int start();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace iodeep::pacs
