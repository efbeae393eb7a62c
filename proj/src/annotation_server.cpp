#include "faceseg/annotation_server.hpp"

#include <httplib.h>

#include <iostream>
#include <mutex>

#include "faceseg/png_io.hpp"

namespace faceseg {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

HttpResponse json_response(int status, const json& body) {
  return {status, body.dump(), "application/json"};
}

HttpResponse error_response(int status, const std::string& kind, const std::string& message) {
  return json_response(status, {{"error", kind}, {"message", message}});
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownSegment:
      return 404;
    case ErrorKind::kUnknownClass:
    case ErrorKind::kOutOfBounds:
    case ErrorKind::kInvalidManifest:
      return 422;
    default:
      return 500;
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t end = path.find('/', start);
    const std::string part = path.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (!part.empty()) parts.push_back(part);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return parts;
}

std::string as_string(const std::vector<std::uint8_t>& bytes) {
  return std::string(bytes.begin(), bytes.end());
}

std::string to_base64(const std::vector<std::uint8_t>& bytes) {
  return httplib::detail::base64_encode(as_string(bytes));
}

}  // namespace

struct ImageEntry {
  const FaceRecord* record = nullptr;
  std::mutex mu;
  std::string owner;
  std::shared_ptr<const SuperpixelMap> segmap;
  std::shared_ptr<const AnnotationSession> session;
};

struct AnnotationService::State {
  Manifest manifest;
  ServerConfig config;
  std::map<std::string, std::unique_ptr<ImageEntry>, std::less<>> images;

  fs::path session_path(const std::string& id) const { return config.workdir / "sessions" / (id + ".json"); }
  fs::path segments_path(const std::string& id) const { return config.workdir / "superpixels" / (id + ".png"); }

  // Caller holds entry.mu.
  void ensure_session(ImageEntry& e) {
    if (e.session) return;
    if (!e.segmap) {
      const fs::path cached = segments_path(e.record->id);
      if (fs::exists(cached)) {
        e.segmap = std::make_shared<SuperpixelMap>(load_segments(cached));
      } else {
        auto map = std::make_shared<SuperpixelMap>(
            slic(png::load_rgb(manifest.resolve(e.record->image_path)), config.slic));
        save_segments(cached, *map);
        e.segmap = std::move(map);
      }
    }
    auto s = std::make_shared<AnnotationSession>(e.record->id, e.segmap);
    const fs::path saved = session_path(e.record->id);
    if (fs::exists(saved)) {
      try {
        s->replace_edits(read_json_file(saved).at("edits"));
      } catch (const std::exception& ex) {
        std::cerr << "ignoring unreadable session " << saved << ": " << ex.what() << "\n";
      }
    }
    e.session = std::move(s);
  }

  void autosave(const AnnotationSession& s) {
    const fs::path path = session_path(s.image_id());
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    write_json_file(tmp, {{"image_id", s.image_id()}, {"edits", s.to_json().at("edits")}});
    fs::rename(tmp, path);
  }

  std::shared_ptr<const AnnotationSession> snapshot(ImageEntry& e) {
    std::lock_guard lock(e.mu);
    ensure_session(e);
    return e.session;
  }

  HttpResponse mutate(ImageEntry& e, const std::string& client,
                      const std::function<void(AnnotationSession&)>& fn) {
    std::lock_guard lock(e.mu);
    if (client.empty()) return error_response(422, "MissingClientId", "X-Client-Id header is required for edits");
    if (!e.owner.empty() && e.owner != client) {
      return error_response(409, "Locked", "image " + e.record->id + " is locked by another client");
    }
    ensure_session(e);
    auto next = std::make_shared<AnnotationSession>(*e.session);
    fn(*next);
    e.owner = client;
    autosave(*next);
    e.session = std::move(next);
    return json_response(200, e.session->to_json());
  }

  HttpResponse classes() const {
    json out = json::array();
    const Palette palette = Palette::standard();
    for (int i = 0; i < kNumClasses; ++i) {
      const ClassId c = class_from_index(i);
      const Rgb8 col = palette.color(c);
      out.push_back({{"id", i},
                     {"name", std::string(class_name(c))},
                     {"color", {col.r, col.g, col.b}},
                     {"annotatable", c != ClassId::kMouthMask}});
    }
    return json_response(200, out);
  }

  HttpResponse list_images() {
    json out = json::array();
    for (auto& [id, e] : images) {
      std::lock_guard lock(e->mu);
      out.push_back({{"id", id}, {"locked", !e->owner.empty()}, {"lock_owner", e->owner}});
    }
    return json_response(200, out);
  }

  HttpResponse route_image(ImageEntry& e, const std::string& method, const std::string& action,
                           const std::string& body, const std::string& client) {
    auto parse = [&]() {
      try {
        return json::parse(body);
      } catch (const json::exception& ex) {
        throw Error(ErrorKind::kInvalidManifest, std::string("malformed JSON body: ") + ex.what());
      }
    };
    auto points = [](const json& j) {
      if (!j.contains("points")) throw Error(ErrorKind::kInvalidManifest, "missing 'points'");
      json edit = {{"type", "pixels"}, {"points", j.at("points")}, {"class_id", j.value("class_id", -1)}};
      return std::get<PixelEdit>(edit_from_json(edit));
    };
    auto class_of = [](const json& j) {
      if (!j.contains("class_id") || !j.at("class_id").is_number_integer()) {
        throw Error(ErrorKind::kInvalidManifest, "missing integer 'class_id'");
      }
      return annotation_class(j.at("class_id").get<int>());
    };

    if (method == "GET") {
      if (action == "image") {
        return {200, as_string(png::read_bytes(manifest.resolve(e.record->image_path))), "image/png"};
      }
      if (action == "superpixels") {
        const auto s = snapshot(e);
        const SuperpixelMap& m = s->segments();
        Mask edges = boundaries(m);
        for (auto& v : edges.data()) v = v ? 255 : 0;
        return json_response(200, {{"width", m.width()},
                                   {"height", m.height()},
                                   {"segment_count", m.segment_count},
                                   {"segments_png", to_base64(encode_segments(m))},
                                   {"boundary_png", to_base64(png::encode_gray8(edges))}});
      }
      if (action == "session") return json_response(200, snapshot(e)->to_json());
      if (action == "export") {
        const LabelMap labels = snapshot(e)->export_labels();
        return {200, as_string(png::encode_rgb(encode_label_map(labels, Palette::standard()))), "image/png"};
      }
    } else if (method == "POST") {
      if (action == "session") {
        const json j = parse();
        return mutate(e, client, [&](AnnotationSession& s) { s.replace_edits(j.at("edits")); });
      }
      if (action == "click") {
        const json j = parse();
        if (!j.contains("segment_id") || !j.at("segment_id").is_number_integer()) {
          throw Error(ErrorKind::kInvalidManifest, "missing integer 'segment_id'");
        }
        const ClassId cls = class_of(j);
        return mutate(e, client, [&](AnnotationSession& s) { s.apply_click(j.at("segment_id").get<int>(), cls); });
      }
      if (action == "scribble") {
        const json j = parse();
        const ClassId cls = class_of(j);
        const PixelEdit pts = points(j);
        return mutate(e, client, [&](AnnotationSession& s) { s.apply_scribble(pts.pixels, cls); });
      }
      if (action == "pixels") {
        const json j = parse();
        const ClassId cls = class_of(j);
        const PixelEdit pts = points(j);
        return mutate(e, client, [&](AnnotationSession& s) { s.apply_pixel_correction(pts.pixels, cls); });
      }
      if (action == "undo") {
        bool popped = false;
        HttpResponse r = mutate(e, client, [&](AnnotationSession& s) { popped = s.undo(); });
        if (r.status == 200) {
          json j = json::parse(r.body);
          j["undone"] = popped;
          r.body = j.dump();
        }
        return r;
      }
      if (action == "release") {
        std::lock_guard lock(e.mu);
        if (!e.owner.empty() && e.owner != client) {
          return error_response(409, "Locked", "image " + e.record->id + " is locked by another client");
        }
        e.owner.clear();
        return json_response(200, {{"id", e.record->id}, {"locked", false}});
      }
    }
    return error_response(404, "NotFound", method + " /api/images/" + e.record->id + "/" + action);
  }
};

AnnotationService::AnnotationService(Manifest manifest, ServerConfig config)
    : state_(std::make_unique<State>()) {
  state_->manifest = std::move(manifest);
  state_->config = std::move(config);
  for (const auto& r : state_->manifest.records) {
    auto e = std::make_unique<ImageEntry>();
    e->record = &r;
    state_->images.emplace(r.id, std::move(e));
  }
}

AnnotationService::~AnnotationService() = default;

HttpResponse AnnotationService::handle(const std::string& method, const std::string& path,
                                       const std::string& body, const std::string& client_id) {
  const auto parts = split_path(path);
  try {
    if (parts.size() < 2 || parts[0] != "api") return error_response(404, "NotFound", path);
    if (parts.size() == 2 && parts[1] == "classes" && method == "GET") return state_->classes();
    if (parts[1] != "images") return error_response(404, "NotFound", path);
    if (parts.size() == 2 && method == "GET") return state_->list_images();
    if (parts.size() != 4) return error_response(404, "NotFound", path);
    const auto it = state_->images.find(parts[2]);
    if (it == state_->images.end()) return error_response(404, "UnknownImage", "no image '" + parts[2] + "'");
    return state_->route_image(*it->second, method, parts[3], body, client_id);
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), std::string(to_string(e.kind())), e.what());
  } catch (const json::exception& e) {
    return error_response(422, "InvalidPayload", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

struct AnnotationServer::Impl {
  ServerConfig config;
  AnnotationService service;
  httplib::Server server;
  int port = -1;

  Impl(Manifest m, ServerConfig c) : config(c), service(std::move(m), std::move(c)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      const HttpResponse r = service.handle(req.method, req.path, req.body, req.get_header_value("X-Client-Id"));
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server.Get(R"(/api/.*)", handler);
    server.Post(R"(/api/.*)", handler);
    if (config.ui_dir && !server.set_mount_point("/", config.ui_dir->string())) {
      throw Error(ErrorKind::kIo, "UI directory does not exist: " + config.ui_dir->string());
    }
  }
};

AnnotationServer::AnnotationServer(Manifest manifest, ServerConfig config)
    : impl_(std::make_unique<Impl>(std::move(manifest), std::move(config))) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind() {
  auto& s = impl_->server;
  const int port = impl_->config.port == 0 ? s.bind_to_any_port(impl_->config.host)
                                           : (s.bind_to_port(impl_->config.host, impl_->config.port)
                                                  ? impl_->config.port
                                                  : -1);
  if (port < 0) {
    throw Error(ErrorKind::kIo, "cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  }
  impl_->port = port;
  return port;
}

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool AnnotationServer::running() const { return impl_->server.is_running(); }

}  // namespace faceseg
