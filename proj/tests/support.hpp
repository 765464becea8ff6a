#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "drape/asset.hpp"
#include "drape/geometry.hpp"
#include "drape/layout.hpp"
#include "drape/pose_fit.hpp"
#include "drape/raster.hpp"
#include "drape/schema.hpp"

namespace drape::test {

using Rng = std::mt19937_64;

inline double uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng &rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::vector<Vec2> random_points(Rng &rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::vector<Vec2> pts(n);
  for (auto &p : pts)
    p = {uniform(rng, lo, hi), uniform(rng, lo, hi)};
  return pts;
}

/// Point set with the category's applicable points at random positions.
inline ControlPointSet random_point_set(Rng &rng, GarmentCategory c, double lo = 0.1, double hi = 0.9) {
  const ControlPointSchema &schema = default_schema();
  ControlPointSet k;
  k.schema_version = schema.version();
  k.present = schema.applicability(c);
  for (std::size_t i = 0; i < kPointCount; ++i)
    k.coords[i] = {uniform(rng, lo, hi), uniform(rng, lo, hi)};
  return k;
}

inline ControlPointSet point_set(std::initializer_list<std::pair<int, Vec2>> pts) {
  ControlPointSet k;
  k.schema_version = default_schema().version();
  for (const auto &[id, p] : pts) {
    k.coords[static_cast<std::size_t>(id)] = p;
    k.present.set(static_cast<std::size_t>(id));
  }
  return k;
}

inline int pid(std::string_view name) {
  const auto id = default_schema().find(name);
  if (!id)
    throw std::runtime_error("test: unknown point " + std::string(name));
  return *id;
}

inline Vec2 &at(ControlPointSet &k, std::string_view name) { return k.coords[static_cast<std::size_t>(pid(name))]; }
inline Vec2 at(const ControlPointSet &k, std::string_view name) { return k.coords[static_cast<std::size_t>(pid(name))]; }
inline bool has(const ControlPointSet &k, std::string_view name) { return k.present.test(static_cast<std::size_t>(pid(name))); }

inline GarmentMeta meta(const std::string &id, GarmentCategory c, std::set<std::string> tags = {},
                        Gender g = Gender::unisex) {
  return GarmentMeta{id, c, std::move(tags), g};
}

/// Rectangle garment whose four source points are the corners of the painted region.
inline GarmentAsset rect_garment(int w, int h, Rgba color) {
  GarmentAsset a;
  a.meta = meta("rect", GarmentCategory::top);
  a.image = Image(w, h, color);
  a.mask = Mask(w, h, 1);
  a.source_points.schema_version = default_schema().version();
  return a;
}

/// Fresh, empty scratch directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / ("drape-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace drape::test
