#include "faceseg/annotation.hpp"

#include <cstdlib>

namespace faceseg {
namespace {

using nlohmann::json;

json points_to_json(const std::vector<PixelPos>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

std::vector<PixelPos> points_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kInvalidManifest, "points must be an array");
  std::vector<PixelPos> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
      throw Error(ErrorKind::kInvalidManifest, "each point must be an [x, y] integer pair");
    }
    out.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  return out;
}

}  // namespace

ClassId annotation_class(int id) {
  const ClassId c = class_from_index(id);
  if (c == ClassId::kMouthMask) {
    throw Error(ErrorKind::kUnknownClass, "mouth-mask is synthetic-only and cannot be annotated");
  }
  return c;
}

std::vector<PixelPos> rasterize_polyline(const std::vector<PixelPos>& points) {
  std::vector<PixelPos> out;
  if (points.empty()) return out;
  out.push_back(points.front());
  for (std::size_t i = 1; i < points.size(); ++i) {
    int x = points[i - 1].x, y = points[i - 1].y;
    const int x1 = points[i].x, y1 = points[i].y;
    const int dx = std::abs(x1 - x), dy = -std::abs(y1 - y);
    const int sx = x < x1 ? 1 : -1, sy = y < y1 ? 1 : -1;
    int err = dx + dy;
    while (x != x1 || y != y1) {
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
      out.push_back({x, y});
    }
  }
  return out;
}

AnnotationSession::AnnotationSession(std::string image_id, std::shared_ptr<const SuperpixelMap> segmap)
    : image_id_(std::move(image_id)), segmap_(std::move(segmap)) {}

void AnnotationSession::check_point(const PixelPos& p) const {
  if (!segmap_->segments.contains(p.x, p.y)) {
    throw Error(ErrorKind::kOutOfBounds,
                "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is outside the image");
  }
}

void AnnotationSession::validate(const Edit& edit) const {
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        annotation_class(to_index(e.cls));
        if constexpr (std::is_same_v<T, ClickEdit>) {
          if (e.segment < 0 || e.segment >= segmap_->segment_count) {
            throw Error(ErrorKind::kUnknownSegment, "segment " + std::to_string(e.segment) + " does not exist");
          }
        } else if constexpr (std::is_same_v<T, ScribbleEdit>) {
          if (e.points.empty()) throw Error(ErrorKind::kOutOfBounds, "scribble has no points");
          for (const auto& p : e.points) check_point(p);
        } else {
          for (const auto& p : e.pixels) check_point(p);
        }
      },
      edit);
}

void AnnotationSession::apply(const Edit& edit) {
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ClickEdit>) {
          assignments_[e.segment] = e.cls;
        } else if constexpr (std::is_same_v<T, ScribbleEdit>) {
          for (const auto& p : rasterize_polyline(e.points)) {
            assignments_[segmap_->at(p.x, p.y)] = e.cls;
          }
        } else {
          for (const auto& p : e.pixels) overrides_[p] = e.cls;
        }
      },
      edit);
}

void AnnotationSession::replay() {
  assignments_.clear();
  overrides_.clear();
  for (const auto& e : edits_) apply(e);
}

void AnnotationSession::apply_click(int segment, ClassId cls) {
  Edit edit = ClickEdit{segment, cls};
  validate(edit);
  apply(edit);
  edits_.push_back(std::move(edit));
}

void AnnotationSession::apply_scribble(const std::vector<PixelPos>& polyline, ClassId cls) {
  Edit edit = ScribbleEdit{polyline, cls};
  validate(edit);
  apply(edit);
  edits_.push_back(std::move(edit));
}

void AnnotationSession::apply_pixel_correction(const std::vector<PixelPos>& pixels, ClassId cls) {
  if (pixels.empty()) return;
  Edit edit = PixelEdit{pixels, cls};
  validate(edit);
  apply(edit);
  edits_.push_back(std::move(edit));
}

bool AnnotationSession::undo() {
  if (edits_.empty()) return false;
  edits_.pop_back();
  replay();
  return true;
}

LabelMap AnnotationSession::export_labels() const {
  LabelMap out = rasterize(*segmap_, assignments_, ClassId::kBackground);
  for (const auto& [p, cls] : overrides_) out.at(p.x, p.y) = cls;
  return out;
}

json edit_to_json(const Edit& edit) {
  return std::visit(
      [](const auto& e) -> json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ClickEdit>) {
          return {{"type", "click"}, {"segment_id", e.segment}, {"class_id", to_index(e.cls)}};
        } else if constexpr (std::is_same_v<T, ScribbleEdit>) {
          return {{"type", "scribble"}, {"points", points_to_json(e.points)}, {"class_id", to_index(e.cls)}};
        } else {
          return {{"type", "pixels"}, {"points", points_to_json(e.pixels)}, {"class_id", to_index(e.cls)}};
        }
      },
      edit);
}

Edit edit_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    const ClassId cls = annotation_class(j.at("class_id").get<int>());
    if (type == "click") return ClickEdit{j.at("segment_id").get<int>(), cls};
    if (type == "scribble") return ScribbleEdit{points_from_json(j.at("points")), cls};
    if (type == "pixels") return PixelEdit{points_from_json(j.at("points")), cls};
    throw Error(ErrorKind::kInvalidManifest, "unknown edit type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidManifest, e.what());
  }
}

json AnnotationSession::to_json() const {
  json edits = json::array();
  for (const auto& e : edits_) edits.push_back(edit_to_json(e));
  json assignments = json::object();
  for (const auto& [seg, cls] : assignments_) assignments[std::to_string(seg)] = to_index(cls);
  return {{"image_id", image_id_},
          {"edits", edits},
          {"assignments", assignments},
          {"override_count", overrides_.size()}};
}

void AnnotationSession::replace_edits(const json& edits) {
  if (!edits.is_array()) throw Error(ErrorKind::kInvalidManifest, "edits must be an array");
  std::vector<Edit> parsed;
  for (const auto& j : edits) {
    Edit e = edit_from_json(j);
    validate(e);
    if (const auto* px = std::get_if<PixelEdit>(&e); px && px->pixels.empty()) continue;
    parsed.push_back(std::move(e));
  }
  edits_ = std::move(parsed);
  replay();
}

}  // namespace faceseg
