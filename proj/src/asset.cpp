#include "drape/asset.hpp"

#include <fmt/format.h>

#include "drape/error.hpp"
#include "drape/io.hpp"

namespace drape {

namespace {
constexpr std::array<std::string_view, 3> kGenderNames = {"female", "male", "unisex"};
}

std::string_view to_string(Gender g) { return kGenderNames[static_cast<std::size_t>(g)]; }

std::optional<Gender> parse_gender(std::string_view s) {
  for (std::size_t i = 0; i < kGenderNames.size(); ++i)
    if (kGenderNames[i] == s)
      return static_cast<Gender>(i);
  return std::nullopt;
}

void GarmentAsset::validate(const ControlPointSchema &schema) const {
  const auto &id = meta.id;
  if (image.empty())
    throw ValidationError(fmt::format("garment \"{}\": empty image", id));
  if (size_of(image) != size_of(mask))
    throw ValidationError(fmt::format("garment \"{}\": image is {}x{} but mask is {}x{}", id, image.width(),
                                      image.height(), mask.width(), mask.height()));
  if (count_set(mask) == 0)
    throw ValidationError(fmt::format("garment \"{}\": mask is empty", id));
  if (source_points.present != schema.applicability(meta.category))
    throw ValidationError(
        fmt::format("garment \"{}\": source point presence does not match {} applicability", id, to_string(meta.category)));
  const bool outerwear = meta.category == GarmentCategory::outerwear;
  if (outerwear && split_polyline.size() < 2)
    throw ValidationError(fmt::format("garment \"{}\": outerwear needs a split polyline", id));
  if (!outerwear && !split_polyline.empty())
    throw ValidationError(fmt::format("garment \"{}\": only outerwear carries a split polyline", id));
  for (std::size_t i = 1; i < split_polyline.size(); ++i)
    if (!(split_polyline[i].y > split_polyline[i - 1].y))
      throw ValidationError(fmt::format("garment \"{}\": split polyline y must strictly increase", id));
}

GarmentAsset load_asset(const std::filesystem::path &dir, const ControlPointSchema &schema) {
  GarmentAsset a;
  const auto meta = io::read_json(dir / "meta.json");
  a.meta = io::meta_from_json(meta);
  if (meta.contains("split_polyline"))
    for (const auto &p : meta["split_polyline"])
      a.split_polyline.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  a.image = read_png(dir / "image.png");
  a.mask = read_mask_png(dir / "mask.png");
  a.source_points = io::points_from_json(io::read_json(dir / "points.json"), schema);
  a.validate(schema);
  return a;
}

void save_asset(const GarmentAsset &asset, const std::filesystem::path &dir, const ControlPointSchema &schema) {
  std::filesystem::create_directories(dir);
  auto meta = io::to_json(asset.meta);
  if (!asset.split_polyline.empty()) {
    auto line = io::json::array();
    for (Vec2 p : asset.split_polyline)
      line.push_back({p.x, p.y});
    meta["split_polyline"] = std::move(line);
  }
  io::write_text(dir / "meta.json", meta.dump(2) + "\n");
  write_png(dir / "image.png", asset.image);
  write_mask_png(dir / "mask.png", asset.mask);
  io::write_text(dir / "points.json", io::to_json(asset.source_points, schema).dump(2) + "\n");
}

} // namespace drape
