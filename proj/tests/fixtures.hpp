#pragma once

#include <memory>
#include <vector>

#include "drape/pipeline.hpp"
#include "drape/synthetic.hpp"
#include "support.hpp"

namespace drape::test {

inline const Engine &engine() {
  static const Engine e = Engine::load(DRAPE_DATA_DIR);
  return e;
}

inline std::shared_ptr<const GarmentAsset> garment(GarmentCategory c, const std::string &id, Rng &rng,
                                                   CanvasSize size = {96, 96}) {
  return std::make_shared<const GarmentAsset>(synthetic::random_garment(c, id, rng, default_schema(), size));
}

/// Outfit on the reference pose with a synthetic person; garments innermost first.
inline OutfitSpec outfit(std::vector<OutfitGarment> garments, CanvasSize canvas = {128, 192}) {
  OutfitSpec spec;
  spec.canvas = canvas;
  spec.pose = synthetic::reference_pose();
  spec.pose.canvas_aspect = static_cast<double>(canvas.width) / canvas.height;
  synthetic::Person person = synthetic::make_person(spec.pose, canvas);
  spec.person_image = std::move(person.image);
  spec.person_layout = std::move(person.layout);
  spec.garments = std::move(garments);
  spec.threads = 1;
  return spec;
}

inline OutfitGarment styled(std::shared_ptr<const GarmentAsset> a, const std::string &key = {},
                            const std::string &value = {}) {
  StyleVector s;
  if (!key.empty())
    s.set(key, value);
  return make_outfit_garment(std::move(a), s);
}

inline EditTemplate edit(const std::string &name) { return engine().edits().get(name); }

} // namespace drape::test
