// Regenerates the canonical templates and the demo assets under data/.
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "drape/asset.hpp"
#include "drape/io.hpp"
#include "drape/layout.hpp"
#include "drape/pose_fit.hpp"
#include "drape/synthetic.hpp"

namespace fs = std::filesystem;
using namespace drape;

namespace {

BodyPose demo_pose() {
  BodyPose p = synthetic::reference_pose();
  p.set(Joint::left_elbow, {0.36, 0.33});
  p.set(Joint::right_elbow, {0.64, 0.33});
  p.set(Joint::left_wrist, {0.335, 0.455});
  p.set(Joint::right_wrist, {0.665, 0.455});
  p.set(Joint::left_knee, {0.445, 0.68});
  p.set(Joint::right_knee, {0.56, 0.68});
  p.set(Joint::left_ankle, {0.44, 0.87});
  p.set(Joint::right_ankle, {0.57, 0.865});
  return p;
}

GarmentAsset demo_garment(const std::string &id, GarmentCategory c, std::set<std::string> tags, synthetic::GarmentLook look,
                          const ControlPointSchema &schema) {
  GarmentMeta meta;
  meta.id = id;
  meta.category = c;
  meta.tags = std::move(tags);
  return synthetic::make_garment(meta, schema, look, {256, 256});
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"drape-author: writes canonical templates and demo assets"};
  fs::path data = DRAPE_DATA_DIR;
  app.add_option("--data", data, "data directory to write into");
  CLI11_PARSE(app, argc, argv);

  try {
    const ControlPointSchema &schema = default_schema();
    fs::create_directories(data / "templates");
    for (const auto &t : synthetic::canonical_templates(schema))
      save_canonical_template(t, data / "templates" / (t.name + ".json"), schema);

    const fs::path demo = data / "demo";
    fs::create_directories(demo / "garments");
    synthetic::GarmentLook trousers{{52, 64, 110, 255}, {0, 0, 0, 255}, 0, 1.0, 1.0, 0.0, 1};
    synthetic::GarmentLook tshirt{{236, 236, 228, 255}, {200, 60, 60, 255}, 16, 1.0, 1.0, 0.0, 2};
    synthetic::GarmentLook jacket{{150, 110, 70, 255}, {0, 0, 0, 255}, 0, 1.0, 1.0, 0.0, 3};
    save_asset(demo_garment("trousers", GarmentCategory::bottom, {"trousers"}, trousers, schema),
               demo / "garments" / "trousers", schema);
    save_asset(demo_garment("tshirt", GarmentCategory::top, {"t_shirt"}, tshirt, schema), demo / "garments" / "tshirt",
               schema);
    save_asset(demo_garment("jacket", GarmentCategory::outerwear, {"jacket"}, jacket, schema),
               demo / "garments" / "jacket", schema);

    const auto person = synthetic::make_person(demo_pose(), {512, 768});
    write_png(demo / "person.png", person.image);
    write_layout(demo / "layout.png", person.layout);
    io::write_text(demo / "pose.json", io::to_json(person.pose).dump(2) + "\n");
    std::cout << fmt::format("wrote templates and demo assets under {}\n", data.string());
  } catch (const std::exception &e) {
    std::cerr << "drape-author: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
