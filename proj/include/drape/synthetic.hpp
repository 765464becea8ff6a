#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "drape/asset.hpp"
#include "drape/layout.hpp"
#include "drape/pose_fit.hpp"
#include "drape/raster.hpp"
#include "drape/schema.hpp"

// Procedural stand-ins for the photographed assets: canonical templates,
// flat garment images with their control points, and a simple person.
namespace drape::synthetic {

inline constexpr double kReferenceAspect = 2.0 / 3.0;

BodyPose reference_pose();
/// Uniform per-joint jitter of up to `amount` (normalized units).
BodyPose perturb_pose(const BodyPose &pose, std::mt19937_64 &rng, double amount);

/// top x {untuck, full_tuck}, outerwear x {closed, open}, bottom, skirt, dress.
std::vector<CanonicalTemplate> canonical_templates(const ControlPointSchema &schema);
TemplateLibrary canonical_library(const ControlPointSchema &schema);

struct GarmentLook {
  Rgba base{40, 120, 220, 255};
  Rgba accent{230, 230, 240, 255};
  int stripe_period = 0; // pixels; 0 for a plain fill
  double width_scale = 1.0;
  double length_scale = 1.0;
  double jitter = 0.0; // per-point outline noise, normalized
  std::uint64_t seed = 0;
};

/// Flat garment image whose outline runs through the category's control
/// points. Outerwear gets a vertical split polyline through its centre.
GarmentAsset make_garment(const GarmentMeta &meta, const ControlPointSchema &schema, const GarmentLook &look,
                          CanvasSize size = {192, 192});
GarmentAsset random_garment(GarmentCategory category, const std::string &id, std::mt19937_64 &rng,
                            const ControlPointSchema &schema, CanvasSize size = {192, 192});

struct Person {
  Image image;
  SemanticLayout layout;
  BodyPose pose;
};

/// Figure with hair, face, skin and a tank top / shorts base layer.
Person make_person(const BodyPose &pose, CanvasSize canvas);

/// Scanline fill (even-odd, pixel centres) of a polygon given in normalized coordinates.
void fill_polygon(Mask &mask, std::span<const Vec2> polygon);

} // namespace drape::synthetic
