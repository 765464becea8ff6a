#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drape/asset.hpp"
#include "drape/pose_fit.hpp"
#include "drape/raster.hpp"
#include "drape/schema.hpp"

namespace drape {

enum class LayoutClass : std::uint8_t {
  background = 0,
  hair,
  face,
  neckline_skin,
  arms,
  legs,
  top,
  bottom,
  outerwear,
  dress,
  shoes
};
inline constexpr std::size_t kLayoutClassCount = 11;
inline constexpr std::string_view kLayoutClassTableVersion = "drape-layout/1";

std::string_view to_string(LayoutClass c);
std::optional<LayoutClass> parse_layout_class(std::string_view s);
/// Display colours for indexed PNG output, one per class id.
std::span<const Rgba> layout_palette();

/// Class painted for a garment category (skirts paint as `bottom`).
LayoutClass garment_class(GarmentCategory c);
/// Skin classes directly connected to a garment category.
std::span<const LayoutClass> adjacent_skin(GarmentCategory c);

/// Per-pixel class map over the person canvas.
class SemanticLayout {
public:
  SemanticLayout() = default;
  explicit SemanticLayout(CanvasSize size) : classes_(size.width, size.height, 0) {}
  /// Throws ValidationError if any id is outside the class table.
  explicit SemanticLayout(Raster<std::uint8_t> classes);

  int width() const { return classes_.width(); }
  int height() const { return classes_.height(); }
  CanvasSize size() const { return size_of(classes_); }
  LayoutClass at(int x, int y) const { return static_cast<LayoutClass>(classes_(x, y)); }
  void set(int x, int y, LayoutClass c) { classes_(x, y) = static_cast<std::uint8_t>(c); }
  const Raster<std::uint8_t> &raster() const { return classes_; }
  std::size_t count(LayoutClass c) const;

  friend bool operator==(const SemanticLayout &, const SemanticLayout &) = default;

private:
  Raster<std::uint8_t> classes_;
};

/// Indexed PNG plus a sidecar class table `<path>.classes.txt`.
void write_layout(const std::filesystem::path &png, const SemanticLayout &layout);
SemanticLayout read_layout(const std::filesystem::path &png);
std::string class_table_text();

/// Occlusion rule: clears the garment's class and its connected skin classes to background.
SemanticLayout occlude(const SemanticLayout &layout, GarmentCategory category);

struct LayeredGarment {
  const Mask *mask = nullptr;
  GarmentCategory category = GarmentCategory::top;
};

/// Paints garment classes over `base` innermost-first (later entries win).
SemanticLayout rasterize_layout(const SemanticLayout &base, std::span<const LayeredGarment> garments);

struct StyleLabel {
  std::optional<Tuck> tuck;
  std::optional<Closure> closure;
  std::string notes;
};

struct ClosureThresholds {
  double min_area_fraction = 0.05; // each of the two largest regions, of the canvas
  double min_ratio = 0.5;
  double max_ratio = 2.0;
};

/// Open iff the two largest 4-connected outerwear regions are both large
/// and of similar size. Throws ValidationError if there is no outerwear.
StyleLabel label_closure(const SemanticLayout &layout, const ClosureThresholds &thresholds = {});

/// Compares hem heights (waistline when no hem is present) with the mean
/// hip height plus `tolerance`. Throws ValidationError without hips or
/// without hem/waistline points.
StyleLabel label_tuck(const ControlPointSet &points, const BodyPose &pose, const ControlPointSchema &schema,
                      double tolerance = 0.01);

/// One garment in an outfit, innermost first.
struct OutfitItem {
  ControlPointSet points;
  GarmentMeta meta;
};

struct CoordinationOptions {
  /// Distance a point may lie outside the outer hull before it is reported.
  double tolerance = 0.0;
  /// Inner categories to check; empty means every category.
  std::vector<GarmentCategory> inner_categories;
};

struct Violation {
  std::size_t inner = 0; // outfit index
  std::size_t outer = 0; // outfit index of the covering outerwear
  int point_id = 0;
  Vec2 position{};
  double distance = 0.0; // outside the hull
};

/// Reports inner points outside the convex hull of any outerwear layered above them.
std::vector<Violation> check_coordination(std::span<const OutfitItem> outfit, const CoordinationOptions &options = {});

/// Pulls each violating point into the offending hull, `margin` inside.
/// Throws ValidationError when an outer hull is degenerate.
std::vector<OutfitItem> fix_coordination(std::span<const OutfitItem> outfit, std::span<const Violation> violations,
                                         double margin = 0.01);

/// Convex hull of a point set's present points.
ConvexHull present_hull(const ControlPointSet &points);

} // namespace drape
