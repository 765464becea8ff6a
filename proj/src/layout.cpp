#include "drape/layout.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "drape/error.hpp"
#include "drape/io.hpp"

namespace drape {

namespace {

constexpr std::array<std::string_view, kLayoutClassCount> kClassNames = {
    "background", "hair", "face", "neckline_skin", "arms", "legs", "top", "bottom", "outerwear", "dress", "shoes"};

constexpr std::array<Rgba, kLayoutClassCount> kPalette = {{
    {0, 0, 0, 255},       // background
    {90, 50, 20, 255},    // hair
    {240, 200, 170, 255}, // face
    {230, 170, 140, 255}, // neckline_skin
    {220, 150, 120, 255}, // arms
    {200, 130, 100, 255}, // legs
    {40, 120, 220, 255},  // top
    {30, 60, 140, 255},   // bottom
    {200, 60, 50, 255},   // outerwear
    {170, 60, 170, 255},  // dress
    {60, 60, 60, 255},    // shoes
}};

constexpr std::array<LayoutClass, 2> kTorsoSkin = {LayoutClass::arms, LayoutClass::neckline_skin};
constexpr std::array<LayoutClass, 1> kLegSkin = {LayoutClass::legs};
constexpr std::array<LayoutClass, 3> kDressSkin = {LayoutClass::arms, LayoutClass::neckline_skin, LayoutClass::legs};

} // namespace

std::string_view to_string(LayoutClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<LayoutClass> parse_layout_class(std::string_view s) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i)
    if (kClassNames[i] == s)
      return static_cast<LayoutClass>(i);
  return std::nullopt;
}

std::span<const Rgba> layout_palette() { return kPalette; }

LayoutClass garment_class(GarmentCategory c) {
  switch (c) {
  case GarmentCategory::top:
    return LayoutClass::top;
  case GarmentCategory::bottom:
  case GarmentCategory::skirt:
    return LayoutClass::bottom;
  case GarmentCategory::outerwear:
    return LayoutClass::outerwear;
  case GarmentCategory::dress:
    return LayoutClass::dress;
  }
  throw ValidationError("unknown garment category");
}

std::span<const LayoutClass> adjacent_skin(GarmentCategory c) {
  switch (c) {
  case GarmentCategory::top:
  case GarmentCategory::outerwear:
    return kTorsoSkin;
  case GarmentCategory::bottom:
  case GarmentCategory::skirt:
    return kLegSkin;
  case GarmentCategory::dress:
    return kDressSkin;
  }
  throw ValidationError("unknown garment category");
}

SemanticLayout::SemanticLayout(Raster<std::uint8_t> classes) : classes_(std::move(classes)) {
  for (auto v : classes_.pixels())
    if (v >= kLayoutClassCount)
      throw ValidationError(fmt::format("layout class id {} outside the class table", v));
}

std::size_t SemanticLayout::count(LayoutClass c) const {
  const auto id = static_cast<std::uint8_t>(c);
  return static_cast<std::size_t>(std::count(classes_.pixels().begin(), classes_.pixels().end(), id));
}

std::string class_table_text() {
  std::string out = fmt::format("# {}\n", kLayoutClassTableVersion);
  for (std::size_t i = 0; i < kClassNames.size(); ++i)
    out += fmt::format("{} {}\n", i, kClassNames[i]);
  return out;
}

void write_layout(const std::filesystem::path &png, const SemanticLayout &layout) {
  write_indexed_png(png, layout.raster(), kPalette);
  io::write_text(std::filesystem::path(png.string() + ".classes.txt"), class_table_text());
}

SemanticLayout read_layout(const std::filesystem::path &png) {
  const std::filesystem::path sidecar(png.string() + ".classes.txt");
  if (std::filesystem::exists(sidecar)) {
    std::istringstream in(io::read_text(sidecar));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#')
        continue;
      std::istringstream fields(line);
      int id = -1;
      std::string name;
      fields >> id >> name;
      const auto cls = parse_layout_class(name);
      if (!cls || static_cast<int>(*cls) != id)
        throw ValidationError(fmt::format("{}: class table entry \"{}\" does not match {}", sidecar.string(), line,
                                          kLayoutClassTableVersion));
    }
  }
  return SemanticLayout(read_indexed_png(png));
}

SemanticLayout occlude(const SemanticLayout &layout, GarmentCategory category) {
  std::array<bool, kLayoutClassCount> clear{};
  clear[static_cast<std::size_t>(garment_class(category))] = true;
  for (LayoutClass c : adjacent_skin(category))
    clear[static_cast<std::size_t>(c)] = true;

  SemanticLayout out = layout;
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      if (clear[static_cast<std::size_t>(out.at(x, y))])
        out.set(x, y, LayoutClass::background);
  return out;
}

SemanticLayout rasterize_layout(const SemanticLayout &base, std::span<const LayeredGarment> garments) {
  SemanticLayout out = base;
  for (const LayeredGarment &g : garments) {
    if (!g.mask || size_of(*g.mask) != base.size())
      throw RenderError("rasterize_layout: garment mask does not match the canvas");
    const LayoutClass cls = garment_class(g.category);
    for (int y = 0; y < out.height(); ++y)
      for (int x = 0; x < out.width(); ++x)
        if ((*g.mask)(x, y))
          out.set(x, y, cls);
  }
  return out;
}

StyleLabel label_closure(const SemanticLayout &layout, const ClosureThresholds &thresholds) {
  const int w = layout.width();
  const int h = layout.height();
  Raster<std::int32_t> labels(w, h, -1);
  std::vector<std::size_t> sizes;
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      if (layout.at(x0, y0) != LayoutClass::outerwear || labels(x0, y0) >= 0)
        continue;
      const auto id = static_cast<std::int32_t>(sizes.size());
      std::size_t area = 0;
      labels(x0, y0) = id;
      stack.assign(1, {x0, y0});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++area;
        constexpr int dx[4] = {1, -1, 0, 0};
        constexpr int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + dx[k];
          const int ny = y + dy[k];
          if (labels.in_bounds(nx, ny) && labels(nx, ny) < 0 && layout.at(nx, ny) == LayoutClass::outerwear) {
            labels(nx, ny) = id;
            stack.emplace_back(nx, ny);
          }
        }
      }
      sizes.push_back(area);
    }
  if (sizes.empty())
    throw ValidationError("label_closure: layout has no outerwear pixels");

  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  StyleLabel label;
  label.closure = Closure::closed;
  const double canvas = static_cast<double>(w) * h;
  if (sizes.size() < 2) {
    label.notes = "single outerwear region";
    return label;
  }
  const double a = static_cast<double>(sizes[0]) / canvas;
  const double b = static_cast<double>(sizes[1]) / canvas;
  const double ratio = a / b;
  label.notes = fmt::format("{} regions; two largest cover {:.4f} and {:.4f} of the canvas, ratio {:.3f}", sizes.size(),
                            a, b, ratio);
  if (a > thresholds.min_area_fraction && b > thresholds.min_area_fraction && ratio >= thresholds.min_ratio &&
      ratio <= thresholds.max_ratio)
    label.closure = Closure::open;
  return label;
}

StyleLabel label_tuck(const ControlPointSet &points, const BodyPose &pose, const ControlPointSchema &schema,
                      double tolerance) {
  if (!pose.has(Joint::left_hip) || !pose.has(Joint::right_hip))
    throw ValidationError("label_tuck: pose is missing hip joints");
  const double waist = 0.5 * (pose.at(Joint::left_hip).y + pose.at(Joint::right_hip).y);

  auto heights = [&](PointGroup g) {
    std::vector<double> ys;
    for (const PointDef &p : schema.points())
      if (p.group == g && points.present.test(static_cast<std::size_t>(p.id)))
        ys.push_back(points.coords[static_cast<std::size_t>(p.id)].y);
    return ys;
  };
  auto ys = heights(PointGroup::hem);
  std::string_view used = "hem";
  if (ys.empty()) {
    ys = heights(PointGroup::waistline);
    used = "waistline";
  }
  if (ys.empty())
    throw ValidationError("label_tuck: no hem or waistline points present");

  const double limit = waist + tolerance;
  StyleLabel label;
  if (std::all_of(ys.begin(), ys.end(), [&](double y) { return y <= limit; }))
    label.tuck = Tuck::full_tuck;
  else if (std::all_of(ys.begin(), ys.end(), [&](double y) { return y >= limit; }))
    label.tuck = Tuck::untuck;
  else
    label.tuck = Tuck::half_tuck;
  label.notes = fmt::format("{} {} points against waist height {:.4f}", ys.size(), used, waist);
  return label;
}

ConvexHull present_hull(const ControlPointSet &points) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < kPointCount; ++i)
    if (points.present.test(i))
      pts.push_back(points.coords[i]);
  return convex_hull(pts);
}

namespace {

constexpr double kHullEps = 1e-9;

bool checked_inner(const CoordinationOptions &options, GarmentCategory c) {
  return options.inner_categories.empty() ||
         std::find(options.inner_categories.begin(), options.inner_categories.end(), c) !=
             options.inner_categories.end();
}

} // namespace

std::vector<Violation> check_coordination(std::span<const OutfitItem> outfit, const CoordinationOptions &options) {
  std::vector<Violation> out;
  for (std::size_t outer = 0; outer < outfit.size(); ++outer) {
    if (outfit[outer].meta.category != GarmentCategory::outerwear)
      continue;
    const ConvexHull hull = present_hull(outfit[outer].points);
    for (std::size_t inner = 0; inner < outer; ++inner) {
      if (!checked_inner(options, outfit[inner].meta.category))
        continue;
      const auto &pts = outfit[inner].points;
      for (std::size_t i = 0; i < kPointCount; ++i) {
        if (!pts.present.test(i))
          continue;
        const double d = outside_distance(hull, pts.coords[i]);
        if (d > options.tolerance + kHullEps)
          out.push_back({inner, outer, static_cast<int>(i), pts.coords[i], d});
      }
    }
  }
  return out;
}

std::vector<OutfitItem> fix_coordination(std::span<const OutfitItem> outfit, std::span<const Violation> violations,
                                         double margin) {
  std::vector<OutfitItem> out(outfit.begin(), outfit.end());
  for (const Violation &v : violations) {
    if (v.inner >= out.size() || v.outer >= out.size())
      throw ValidationError("fix_coordination: violation refers to a garment outside the outfit");
    const ConvexHull hull = present_hull(outfit[v.outer].points);
    if (hull.degenerate())
      throw ValidationError(
          fmt::format("fix_coordination: hull of \"{}\" is degenerate (<3 points)", outfit[v.outer].meta.id));
    auto &p = out[v.inner].points.coords[static_cast<std::size_t>(v.point_id)];
    p = pull_inside(hull, p, margin);
  }
  return out;
}

} // namespace drape
