#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "faceseg/annotation.hpp"
#include "faceseg/manifest.hpp"

namespace faceseg {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path workdir;  // autosaved sessions and cached superpixels
  SLICParams slic;
  std::optional<std::filesystem::path> ui_dir;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Transport-independent request handling. Exposed for direct testing.
class AnnotationService {
 public:
  AnnotationService(Manifest manifest, ServerConfig config);
  ~AnnotationService();
  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body,
                      const std::string& client_id);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

class AnnotationServer {
 public:
  AnnotationServer(Manifest manifest, ServerConfig config);
  ~AnnotationServer();

  // Binds and returns the bound port; throws Io when binding fails.
  int bind();
  // Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace faceseg
