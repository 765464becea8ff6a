#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "drape/geometry.hpp"
#include "drape/raster.hpp"
#include "drape/schema.hpp"

namespace drape {

enum class Gender : std::uint8_t { female, male, unisex };
std::string_view to_string(Gender g);
std::optional<Gender> parse_gender(std::string_view s);

/// Catalog metadata that edit-template selectors match against.
struct GarmentMeta {
  std::string id;
  GarmentCategory category = GarmentCategory::top;
  std::set<std::string> tags;
  Gender gender = Gender::unisex;
};

/// A neutral (flat) garment: straight-alpha RGBA image, binary mask, and
/// control points in garment-image normalized coordinates.
struct GarmentAsset {
  GarmentMeta meta;
  Image image;
  Mask mask;
  ControlPointSet source_points;
  /// Outerwear only: polyline with strictly increasing y separating the
  /// left and right halves (garment-image normalized coordinates).
  std::vector<Vec2> split_polyline;

  /// Throws ValidationError if an invariant is broken.
  void validate(const ControlPointSchema &schema) const;
};

/// Reads an asset bundle directory: image.png, mask.png, points.json, meta.json.
GarmentAsset load_asset(const std::filesystem::path &dir, const ControlPointSchema &schema);
void save_asset(const GarmentAsset &asset, const std::filesystem::path &dir, const ControlPointSchema &schema);

} // namespace drape
