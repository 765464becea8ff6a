#include <doctest.h>

#include <filesystem>

#include "drape/error.hpp"
#include "drape/io.hpp"
#include "drape/pipeline.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace drape;
using namespace drape::test;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kDemo = fs::path(DRAPE_DATA_DIR) / "demo";

json demo_doc() { return io::read_json(kDemo / "outfit.json"); }

std::string spec_error(const json &doc) {
  try {
    parse_outfit_spec(doc, kDemo, engine());
  } catch (const ValidationError &e) {
    return e.what();
  }
  FAIL("spec accepted: " << doc.dump());
  return {};
}

} // namespace

TEST_CASE("demo outfit document loads") {
  const OutfitSpec spec = load_outfit_spec(kDemo / "outfit.json", engine());
  CHECK(spec.canvas == CanvasSize{512, 768});
  REQUIRE(spec.garments.size() == 3);
  CHECK(spec.garments[0].asset->meta.category == GarmentCategory::bottom);
  CHECK(spec.garments[1].style.tuck == Tuck::untuck);
  CHECK(spec.garments[2].style.closure == Closure::open);
  REQUIRE(spec.templates.size() == 1);
  CHECK(spec.templates[0].tmpl.name == "front_tuck");
  CHECK(spec.person_image.has_value());
  CHECK(spec.person_layout.has_value());
}

TEST_CASE("outfit documents are validated") {
  SUBCASE("unknown key") {
    auto doc = demo_doc();
    doc["colour"] = "red";
    CHECK(spec_error(doc).find("colour") != std::string::npos);
  }
  SUBCASE("no garments") {
    auto doc = demo_doc();
    doc["garments"] = json::array();
    spec_error(doc);
  }
  SUBCASE("invalid style") {
    auto doc = demo_doc();
    doc["garments"][1]["style"]["tuck"] = "rolled";
    CHECK(spec_error(doc).find("rolled") != std::string::npos);
  }
  SUBCASE("unknown template") {
    auto doc = demo_doc();
    doc["templates"] = {"no_such_template"};
    CHECK(spec_error(doc).find("no_such_template") != std::string::npos);
  }
  SUBCASE("wrong types") {
    auto doc = demo_doc();
    doc["lambda"] = "small";
    spec_error(doc);
  }
  SUBCASE("negative lambda") {
    auto doc = demo_doc();
    doc["lambda"] = -1;
    spec_error(doc);
  }
  SUBCASE("template garment out of range") {
    auto doc = demo_doc();
    doc["templates"] = json::array({{{"name", "front_tuck"}, {"garment", 7}}});
    spec_error(doc);
  }
}

TEST_CASE("outerwear may not sit below a top") {
  Rng rng(60);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::outerwear, "coat", rng)),
                            styled(garment(GarmentCategory::top, "shirt", rng))});
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("layering"), ValidationError);
  std::swap(spec.garments[0], spec.garments[1]);
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("pose aspect must match the canvas") {
  Rng rng(61);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::dress, "d", rng))});
  spec.pose.canvas_aspect = 1.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("a single dress renders onto the person") {
  Rng rng(62);
  const OutfitSpec spec = outfit({styled(garment(GarmentCategory::dress, "d", rng))});
  const RenderResult r = render_outfit(spec, engine());
  CHECK(size_of(r.draft) == spec.canvas);
  CHECK(r.layout.size() == spec.canvas);
  std::size_t dress = 0;
  for (int y = 0; y < spec.canvas.height; ++y)
    for (int x = 0; x < spec.canvas.width; ++x) {
      const bool covered = r.garments[0].warped->mask(x, y) != 0;
      CHECK((r.layout.at(x, y) == LayoutClass::dress) == covered);
      dress += covered;
    }
  CHECK(dress > 500);
  CHECK(r.garments[0].layout_without == r.occluded_layout);
}

TEST_CASE("front_tuck pins the torso centre to the bottom waistline") {
  Rng rng(63);
  for (int trial = 0; trial < 5; ++trial) {
    OutfitSpec spec = outfit({styled(garment(GarmentCategory::bottom, "b", rng)),
                              styled(garment(GarmentCategory::top, "t", rng))});
    spec.templates.push_back({edit("front_tuck"), std::nullopt});
    const PreparedOutfit p = prepare_outfit(spec, engine());
    CHECK(at(p.points[1], "torso_center").y == at(p.points[0], "waistline_center").y);
    CHECK(p.points[0] == p.predicted[0]);
    REQUIRE(p.edits[1].size() == 1);
    CHECK(p.edits[1][0].template_name == "front_tuck");
  }
}

TEST_CASE("unmet require skips with a note") {
  Rng rng(64);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::top, "t", rng))});
  spec.templates.push_back({edit("front_tuck"), std::nullopt});
  const PreparedOutfit p = prepare_outfit(spec, engine());
  CHECK(p.points == p.predicted);
  REQUIRE(p.notes.size() == 1);
  CHECK(p.notes[0].note.find("skipped") != std::string::npos);
  CHECK(p.notes[0].garment == std::size_t{0});
}

TEST_CASE("template matching nothing leaves a note") {
  Rng rng(65);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::bottom, "b", rng))});
  spec.templates.push_back({edit("open_wide"), std::nullopt});
  const PreparedOutfit p = prepare_outfit(spec, engine());
  REQUIRE(p.notes.size() == 1);
  CHECK(p.notes[0].note == "matched no garment");
  spec.templates[0].garment = 0;
  CHECK_THROWS_AS(prepare_outfit(spec, engine()), EditError);
}

TEST_CASE("stage errors name the garment") {
  Rng rng(66);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::bottom, "jeans", rng)),
                            styled(garment(GarmentCategory::top, "shirt", rng)),
                            styled(garment(GarmentCategory::bottom, "shorts", rng))});
  spec.templates.push_back({edit("front_tuck"), std::nullopt});
  CHECK_THROWS_WITH_AS(prepare_outfit(spec, engine()), doctest::Contains("shirt"), EditError);

  OutfitSpec bad = outfit({styled(garment(GarmentCategory::top, "tee", rng), "tuck", "side_tuck")});
  CHECK_THROWS_WITH_AS(prepare_outfit(bad, engine()), doctest::Contains("tee"), ValidationError);
}

TEST_CASE("rendering is deterministic across runs and thread counts") {
  Rng rng(67);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::bottom, "b", rng)),
                            styled(garment(GarmentCategory::top, "t", rng)),
                            styled(garment(GarmentCategory::outerwear, "o", rng), "closure", "open")});
  const RenderResult a = render_outfit(spec, engine());
  const RenderResult b = render_outfit(spec, engine());
  spec.threads = 4;
  const RenderResult c = render_outfit(spec, engine());
  CHECK(a.draft == b.draft);
  CHECK(a.draft == c.draft);
  CHECK(a.layout == c.layout);
  CHECK(a.garments[2].split);
  CHECK_FALSE(a.garments[1].split);
}

TEST_CASE("warp cache reuses unchanged garments") {
  Rng rng(68);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::bottom, "b", rng)),
                            styled(garment(GarmentCategory::top, "t", rng))});
  WarpCache cache;
  const RenderResult a = render_outfit(spec, engine(), &cache);
  CHECK(cache.size() == 2);
  CHECK(cache.hits() == 0);
  spec.templates.push_back({edit("half_tuck"), std::nullopt});
  const RenderResult b = render_outfit(spec, engine(), &cache);
  CHECK(cache.hits() == 1);
  CHECK(cache.size() == 3);
  CHECK(a.garments[0].warped == b.garments[0].warped);
  const RenderResult fresh = render_outfit(spec, engine());
  CHECK(fresh.draft == b.draft);
}

TEST_CASE("editing the outerwear leaves other garments untouched outside it") {
  Rng rng(69);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::bottom, "b", rng)),
                            styled(garment(GarmentCategory::top, "t", rng)),
                            styled(garment(GarmentCategory::outerwear, "o", rng), "closure", "open")});
  const RenderResult before = render_outfit(spec, engine());
  spec.templates.push_back({edit("open_wide"), std::nullopt});
  const RenderResult after = render_outfit(spec, engine());
  const Mask &m0 = before.garments[2].warped->mask;
  const Mask &m1 = after.garments[2].warped->mask;
  CHECK(m0 != m1);
  std::size_t outside = 0;
  for (int y = 0; y < spec.canvas.height; ++y)
    for (int x = 0; x < spec.canvas.width; ++x)
      if (!m0(x, y) && !m1(x, y)) {
        CHECK(before.draft(x, y) == after.draft(x, y));
        ++outside;
      }
  CHECK(outside > 0);
  CHECK(before.prepared.points[0] == after.prepared.points[0]);
  CHECK(before.prepared.points[1] == after.prepared.points[1]);
}

TEST_CASE("interpolation ends on the edited points") {
  Rng rng(70);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::top, "t", rng)),
                            styled(garment(GarmentCategory::outerwear, "o", rng), "closure", "open")});
  const PreparedOutfit start = prepare_outfit(spec, engine());
  OutfitSpec edited = spec;
  edited.templates.push_back({edit("open_wide"), std::nullopt});
  const PreparedOutfit end = prepare_outfit(edited, engine());

  const auto frames = interpolate(spec, engine(), edit("open_wide"), 4);
  REQUIRE(frames.size() == 4);
  CHECK(frames.back().prepared.points == end.points);
  const int left = pid("split_left_hem");
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const double t = static_cast<double>(k + 1) / 4;
    const double expect = start.points[1].coords[static_cast<std::size_t>(left)].x +
                          t * (end.points[1].coords[static_cast<std::size_t>(left)].x -
                               start.points[1].coords[static_cast<std::size_t>(left)].x);
    CHECK(frames[k].prepared.points[1].coords[static_cast<std::size_t>(left)].x == doctest::Approx(expect).epsilon(1e-12));
  }

  OutfitSpec closed = outfit({styled(garment(GarmentCategory::outerwear, "c", rng))});
  CHECK_THROWS_WITH_AS(interpolate(closed, engine(), edit("open_wide"), 3), doctest::Contains("cannot be interpolated"),
                       ValidationError);
  CHECK_THROWS_AS(interpolate(spec, engine(), edit("open_wide"), 0), ValidationError);
}

TEST_CASE("lerp keeps the endpoints and shared presence") {
  Rng rng(71);
  const auto a = random_point_set(rng, GarmentCategory::top);
  auto b = random_point_set(rng, GarmentCategory::top);
  b.present.reset(static_cast<std::size_t>(pid("hem_center")));
  CHECK(lerp_points(a, b, 0.0) == a);
  CHECK(lerp_points(a, b, 1.0) == b);
  const auto mid = lerp_points(a, b, 0.5);
  CHECK_FALSE(has(mid, "hem_center"));
  CHECK(at(mid, "torso_center").x == doctest::Approx(0.5 * (at(a, "torso_center").x + at(b, "torso_center").x)));
}

TEST_CASE("warped open jacket edges track the split-edge points") {
  Rng rng(72);
  const OutfitSpec spec = outfit({styled(garment(GarmentCategory::outerwear, "o", rng), "closure", "open")},
                                 CanvasSize{256, 384});
  const RenderResult r = render_outfit(spec, engine());
  const Mask &mask = r.garments[0].warped->mask;
  for (int id : default_schema().match("split_*")) {
    const Vec2 p = r.prepared.points[0].coords[static_cast<std::size_t>(id)];
    CAPTURE(default_schema().point(id).name);
    CHECK(oracle::boundary_distance(mask, p) < 0.02);
  }
}

TEST_CASE("coordination fixes inner garments that stick out") {
  Rng rng(73);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::skirt, "s", rng)),
                            styled(garment(GarmentCategory::outerwear, "o", rng))});
  spec.templates.push_back(
      {parse_template("template \"wide\" for category=skirt { offset points(waistline_left) by (-0.3, 0); }",
                      default_schema()),
       std::nullopt});
  const PreparedOutfit fixed = prepare_outfit(spec, engine());
  CHECK_FALSE(fixed.coordination.found.empty());
  CHECK(fixed.coordination.fixed);
  CHECK(fixed.coordination.remaining.empty());
  CHECK(fixed.points[1] == fixed.predicted[1]);

  spec.coordination.fix = false;
  const PreparedOutfit kept = prepare_outfit(spec, engine());
  CHECK(kept.coordination.remaining.size() == kept.coordination.found.size());
  CHECK_FALSE(kept.coordination.fixed);
}

TEST_CASE("batch application over a catalog") {
  Rng rng(74);
  std::vector<std::shared_ptr<const GarmentAsset>> coats, bottoms, mixed;
  for (int i = 0; i < 10; ++i)
    coats.push_back(garment(GarmentCategory::outerwear, "coat" + std::to_string(i), rng));
  for (int i = 0; i < 4; ++i)
    bottoms.push_back(garment(GarmentCategory::bottom, "pants" + std::to_string(i), rng));
  const BodyPose pose = synthetic::reference_pose();
  const CanvasSize canvas{128, 192};

  const auto closed = batch_apply(coats, edit("closed"), pose, canvas, engine(), 1e-3, 1);
  REQUIRE(closed.size() == 10);
  for (const BatchItem &item : closed) {
    REQUIRE(item.result);
    CHECK(item.error.empty());
    CHECK(item.result->prepared.points[0].style.closure == Closure::closed);
    CHECK_FALSE(item.result->garments[0].split);
  }

  const auto none = batch_apply(bottoms, edit("half_tuck"), pose, canvas, engine(), 1e-3, 1);
  for (const BatchItem &item : none) {
    CHECK_FALSE(item.result);
    CHECK_FALSE(item.skipped.empty());
  }

  mixed = {coats[0], bottoms[0], garment(GarmentCategory::top, "tee", rng), coats[1]};
  const auto some = batch_apply(mixed, edit("open_wide"), pose, canvas, engine(), 1e-3, 1);
  CHECK(std::count_if(some.begin(), some.end(), [](const BatchItem &i) { return i.result.has_value(); }) == 2);
  CHECK(some[1].garment == "pants0");
  CHECK(some[3].result->garments[0].split);
}

TEST_CASE("render outputs and reports") {
  Rng rng(75);
  OutfitSpec spec = outfit({styled(garment(GarmentCategory::bottom, "b", rng)),
                            styled(garment(GarmentCategory::top, "t", rng))});
  spec.templates.push_back({edit("front_tuck"), std::nullopt});
  const RenderResult r = render_outfit(spec, engine());
  const json report = report_json(r, spec, default_schema());
  CHECK(report["garments"].size() == 2);
  CHECK(report.contains("coordination"));
  CHECK(report.contains("layout_classes"));

  const auto dir = scratch_dir("render");
  write_render(r, spec, default_schema(), dir);
  for (const char *f : {"draft.png", "layout.png", "layout.png.classes.txt", "occluded.png", "points_pre.json",
                        "points_post.json", "report.json", "layout_without_0.png", "layout_without_1.png"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  CHECK(read_layout(dir / "layout.png") == r.layout);
  const json post = io::read_json(dir / "points_post.json");
  CHECK(io::points_from_json(post["garments"][1]["points"], default_schema()) == r.prepared.points[1]);
  fs::remove_all(dir);
}
