#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "faceseg/superpixels.hpp"

namespace faceseg {

struct ClickEdit {
  int segment = 0;
  ClassId cls = ClassId::kBackground;
};

struct ScribbleEdit {
  std::vector<PixelPos> points;
  ClassId cls = ClassId::kBackground;
};

struct PixelEdit {
  std::vector<PixelPos> pixels;
  ClassId cls = ClassId::kBackground;
};

using Edit = std::variant<ClickEdit, ScribbleEdit, PixelEdit>;

// Classes an annotator may paint: everything except the synthetic mouth-mask.
// Throws UnknownClass otherwise.
ClassId annotation_class(int id);

// Pixels of the 1-px-wide polyline through `points` (Bresenham per segment).
std::vector<PixelPos> rasterize_polyline(const std::vector<PixelPos>& points);

// Labelling state for one image. The edit log is the source of truth; the
// assignment/override maps are its replay.
class AnnotationSession {
 public:
  AnnotationSession(std::string image_id, std::shared_ptr<const SuperpixelMap> segmap);

  const std::string& image_id() const { return image_id_; }
  const SuperpixelMap& segments() const { return *segmap_; }

  // Each throws UnknownSegment / UnknownClass / OutOfBounds and leaves the
  // session untouched on error.
  void apply_click(int segment, ClassId cls);
  void apply_scribble(const std::vector<PixelPos>& polyline, ClassId cls);
  void apply_pixel_correction(const std::vector<PixelPos>& pixels, ClassId cls);

  // Pops exactly one edit; false when the log is empty.
  bool undo();

  LabelMap export_labels() const;

  const std::vector<Edit>& edits() const { return edits_; }
  const std::map<int, ClassId>& assignments() const { return assignments_; }
  const std::map<PixelPos, ClassId>& overrides() const { return overrides_; }

  nlohmann::json to_json() const;
  // Replaces the edit log; validates every edit by replay (all or nothing).
  void replace_edits(const nlohmann::json& edits);

 private:
  void check_point(const PixelPos& p) const;
  void validate(const Edit& edit) const;
  void apply(const Edit& edit);
  void replay();

  std::string image_id_;
  std::shared_ptr<const SuperpixelMap> segmap_;
  std::vector<Edit> edits_;
  std::map<int, ClassId> assignments_;
  std::map<PixelPos, ClassId> overrides_;
};

nlohmann::json edit_to_json(const Edit& edit);
Edit edit_from_json(const nlohmann::json& j);

}  // namespace faceseg
