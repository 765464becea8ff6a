#include <doctest.h>

#include <fstream>

#include "drape/error.hpp"
#include "drape/layout.hpp"
#include "drape/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace drape;
using namespace drape::test;

namespace {

using L = LayoutClass;

SemanticLayout striped_layout(int w, int h) {
  // One band per class, top to bottom.
  SemanticLayout layout(CanvasSize{w, h});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      layout.set(x, y, static_cast<L>((y * 11) / h));
  return layout;
}

void fill_rect(SemanticLayout &layout, int x0, int y0, int x1, int y1, L c) {
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x)
      layout.set(x, y, c);
}

Mask rect_mask(int w, int h, int x0, int y0, int x1, int y1) {
  Mask m(w, h);
  for (int y = y0; y < std::min(y1, h); ++y)
    for (int x = x0; x < std::min(x1, w); ++x)
      m(x, y) = 1;
  return m;
}

OutfitItem item(const ControlPointSet &k, GarmentCategory c) { return {k, meta("g", c)}; }

ControlPointSet square_coat(double lo, double hi) {
  ControlPointSet k;
  k.schema_version = default_schema().version();
  const std::vector<std::pair<std::string, Vec2>> corners = {
      {"shoulder_left", {lo, lo}}, {"shoulder_right", {hi, lo}}, {"hem_left", {lo, hi}}, {"hem_right", {hi, hi}}};
  for (const auto &[name, p] : corners) {
    at(k, name) = p;
    k.present.set(static_cast<std::size_t>(pid(name)));
  }
  return k;
}

} // namespace

TEST_CASE("class table") {
  CHECK(to_string(L::background) == "background");
  CHECK(static_cast<int>(L::background) == 0);
  CHECK(parse_layout_class("outerwear") == L::outerwear);
  CHECK(garment_class(GarmentCategory::skirt) == L::bottom);
  CHECK(garment_class(GarmentCategory::dress) == L::dress);
  const std::string table = class_table_text();
  CHECK(table.find("neckline_skin") != std::string::npos);
  CHECK_THROWS_AS(SemanticLayout(Raster<std::uint8_t>(2, 2, 200)), ValidationError);
}

TEST_CASE("occluding a top clears arms and neckline but not legs") {
  const SemanticLayout base = striped_layout(4, 110);
  const SemanticLayout out = occlude(base, GarmentCategory::top);
  CHECK(out.count(L::top) == 0);
  CHECK(out.count(L::arms) == 0);
  CHECK(out.count(L::neckline_skin) == 0);
  CHECK(out.count(L::legs) == base.count(L::legs));
  CHECK(out.count(L::bottom) == base.count(L::bottom));
}

TEST_CASE("occluding a bottom clears legs and keeps arms") {
  const SemanticLayout base = striped_layout(4, 110);
  const SemanticLayout out = occlude(base, GarmentCategory::bottom);
  CHECK(out.count(L::bottom) == 0);
  CHECK(out.count(L::legs) == 0);
  CHECK(out.count(L::arms) == base.count(L::arms));
}

TEST_CASE("occlusion without the garment class still clears skin") {
  SemanticLayout base(CanvasSize{6, 6});
  fill_rect(base, 0, 0, 3, 6, L::arms);
  fill_rect(base, 3, 0, 6, 6, L::face);
  const SemanticLayout out = occlude(base, GarmentCategory::outerwear);
  CHECK(out.count(L::arms) == 0);
  CHECK(out.count(L::face) == 18);
}

TEST_CASE("occlusion is idempotent and local") {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    SemanticLayout base(CanvasSize{24, 24});
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x)
        base.set(x, y, static_cast<L>(uniform_int(rng, 0, 10)));
    const GarmentCategory c = kAllCategories[static_cast<std::size_t>(trial) % 5];
    const SemanticLayout once = occlude(base, c);
    CHECK(occlude(once, c) == once);
    std::set<L> touched{garment_class(c)};
    for (L s : adjacent_skin(c))
      touched.insert(s);
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x) {
        if (touched.contains(base.at(x, y)))
          CHECK(once.at(x, y) == L::background);
        else
          CHECK(once.at(x, y) == base.at(x, y));
      }
  }
}

TEST_CASE("rasterize paints innermost first") {
  SemanticLayout base(CanvasSize{10, 10});
  fill_rect(base, 0, 0, 10, 10, L::arms);
  CHECK(rasterize_layout(base, {}) == base);

  const Mask top = rect_mask(10, 10, 0, 0, 6, 10);
  const Mask coat = rect_mask(10, 10, 4, 0, 10, 10);
  const std::vector<LayeredGarment> layers{{&top, GarmentCategory::top}, {&coat, GarmentCategory::outerwear}};
  const SemanticLayout out = rasterize_layout(base, layers);
  CHECK(out.at(0, 0) == L::top);
  CHECK(out.at(5, 5) == L::outerwear);
  CHECK(out.at(9, 9) == L::outerwear);

  const Mask wrong(4, 4);
  const std::vector<LayeredGarment> bad{{&wrong, GarmentCategory::top}};
  CHECK_THROWS_AS(rasterize_layout(base, bad), RenderError);
}

TEST_CASE("rasterize: topmost covering garment wins") {
  Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Mask> masks;
    std::vector<LayeredGarment> layers;
    for (int g = 0; g < 4; ++g) {
      const int x0 = uniform_int(rng, 0, 15), y0 = uniform_int(rng, 0, 15);
      masks.push_back(rect_mask(20, 20, x0, y0, x0 + uniform_int(rng, 1, 8), y0 + uniform_int(rng, 1, 8)));
    }
    for (int g = 0; g < 4; ++g)
      layers.push_back({&masks[static_cast<std::size_t>(g)], kAllCategories[static_cast<std::size_t>(g + trial) % 5]});
    const SemanticLayout out = rasterize_layout(SemanticLayout(CanvasSize{20, 20}), layers);
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 20; ++x) {
        L expect = L::background;
        for (const auto &l : layers)
          if ((*l.mask)(x, y))
            expect = garment_class(l.category);
        CHECK(out.at(x, y) == expect);
      }
  }
}

TEST_CASE("layouts round-trip through indexed PNG") {
  const auto dir = scratch_dir("layout");
  const SemanticLayout layout = striped_layout(16, 33);
  write_layout(dir / "l.png", layout);
  CHECK(std::filesystem::exists(dir / "l.png.classes.txt"));
  CHECK(read_layout(dir / "l.png") == layout);
  std::ofstream(dir / "l.png.classes.txt") << "# drape-layout/1\n0 sky\n";
  CHECK_THROWS_AS(read_layout(dir / "l.png"), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("closure labels") {
  SUBCASE("single blob is closed") {
    SemanticLayout l(CanvasSize{100, 100});
    fill_rect(l, 20, 20, 80, 80, L::outerwear);
    CHECK(label_closure(l).closure == Closure::closed);
  }
  SUBCASE("two equal blobs of 8% are open") {
    SemanticLayout l(CanvasSize{100, 100});
    fill_rect(l, 10, 10, 30, 50, L::outerwear);
    fill_rect(l, 60, 10, 80, 50, L::outerwear);
    CHECK(oracle::component_sizes(l.raster(), static_cast<std::uint8_t>(L::outerwear)) ==
          std::vector<std::size_t>{800, 800});
    CHECK(label_closure(l).closure == Closure::open);
  }
  SUBCASE("ratio 10:1 is closed") {
    SemanticLayout l(CanvasSize{200, 200});
    fill_rect(l, 0, 0, 150, 200, L::outerwear);   // 30000
    fill_rect(l, 170, 0, 185, 200, L::outerwear); // 3000, above 5%
    CHECK(label_closure(l).closure == Closure::closed);
  }
  SUBCASE("diagonal contact does not connect") {
    SemanticLayout l(CanvasSize{100, 100});
    fill_rect(l, 0, 0, 50, 50, L::outerwear);
    fill_rect(l, 50, 50, 100, 100, L::outerwear);
    CHECK(label_closure(l).closure == Closure::open);
  }
  SUBCASE("no outerwear") {
    CHECK_THROWS_AS(label_closure(SemanticLayout(CanvasSize{5, 5})), ValidationError);
  }
}

TEST_CASE("tuck labels") {
  const BodyPose pose = synthetic::reference_pose();
  const double waist = 0.5 * (pose.at(Joint::left_hip).y + pose.at(Joint::right_hip).y);
  auto hems = [&](std::vector<double> ys) {
    ControlPointSet k;
    const char *names[] = {"hem_left", "hem_left_mid", "hem_center", "hem_right_mid", "hem_right"};
    for (std::size_t i = 0; i < ys.size(); ++i) {
      at(k, names[i]) = {0.4 + 0.05 * static_cast<double>(i), ys[i]};
      k.present.set(static_cast<std::size_t>(pid(names[i])));
    }
    return k;
  };
  const ControlPointSchema &schema = default_schema();
  CHECK(label_tuck(hems({waist - 0.05, waist - 0.05, waist - 0.05}), pose, schema).tuck == Tuck::full_tuck);
  CHECK(label_tuck(hems({waist + 0.05, waist + 0.06, waist + 0.07}), pose, schema).tuck == Tuck::untuck);
  CHECK(label_tuck(hems({waist - 0.05, waist + 0.06, waist + 0.07}), pose, schema).tuck == Tuck::half_tuck);

  ControlPointSet waistline;
  at(waistline, "waistline_center") = {0.5, waist - 0.1};
  waistline.present.set(static_cast<std::size_t>(pid("waistline_center")));
  CHECK(label_tuck(waistline, pose, schema).tuck == Tuck::full_tuck);

  CHECK_THROWS_AS(label_tuck(ControlPointSet{}, pose, schema), ValidationError);
  BodyPose no_hips = pose;
  no_hips.confidence[static_cast<std::size_t>(Joint::left_hip)] = 0;
  CHECK_THROWS_AS(label_tuck(hems({0.6}), no_hips, schema), ValidationError);
}

TEST_CASE("coordination: contained skirt and no outerwear") {
  const ControlPointSet coat = square_coat(0.2, 0.8);
  ControlPointSet skirt = point_set({{pid("hem_left"), {0.3, 0.7}}, {pid("hem_right"), {0.7, 0.7}}});
  const std::vector<OutfitItem> ok{item(skirt, GarmentCategory::skirt), item(coat, GarmentCategory::outerwear)};
  CHECK(check_coordination(ok).empty());
  const std::vector<OutfitItem> no_coat{item(skirt, GarmentCategory::skirt), item(coat, GarmentCategory::top)};
  CHECK(check_coordination(no_coat).empty());
  const std::vector<OutfitItem> coat_below{item(coat, GarmentCategory::outerwear), item(skirt, GarmentCategory::skirt)};
  CHECK(check_coordination(coat_below).empty());
}

TEST_CASE("coordination: sticking-out hem point") {
  const ControlPointSet coat = square_coat(0.2, 0.8);
  const ControlPointSet skirt = point_set({{pid("hem_left"), {0.3, 0.85}}, {pid("hem_right"), {0.7, 0.7}}});
  const std::vector<OutfitItem> outfit{item(skirt, GarmentCategory::skirt), item(coat, GarmentCategory::outerwear)};
  const auto v = check_coordination(outfit);
  REQUIRE(v.size() == 1);
  CHECK(v[0].point_id == pid("hem_left"));
  CHECK(v[0].inner == 0);
  CHECK(v[0].outer == 1);
  CHECK(v[0].distance == doctest::Approx(0.05));
  CHECK_FALSE(oracle::in_convex_polygon(oracle::hull({{0.2, 0.2}, {0.8, 0.2}, {0.2, 0.8}, {0.8, 0.8}}), {0.3, 0.85}));

  CoordinationOptions tolerant;
  tolerant.tolerance = 0.06;
  CHECK(check_coordination(outfit, tolerant).empty());
  CoordinationOptions dresses_only;
  dresses_only.inner_categories = {GarmentCategory::dress};
  CHECK(check_coordination(outfit, dresses_only).empty());

  const auto fixed = fix_coordination(outfit, v, 0.01);
  CHECK(check_coordination(fixed).empty());
  CHECK(at(fixed[0].points, "hem_left").y == doctest::Approx(0.79));
  CHECK(at(fixed[0].points, "hem_right") == at(skirt, "hem_right"));
  CHECK(fixed[1].points == coat);
}

TEST_CASE("coordination: zero margin lands on the boundary") {
  const ControlPointSet coat = square_coat(0.2, 0.8);
  const ControlPointSet skirt = point_set({{pid("hem_left"), {0.1, 0.9}}});
  const std::vector<OutfitItem> outfit{item(skirt, GarmentCategory::skirt), item(coat, GarmentCategory::outerwear)};
  const auto fixed = fix_coordination(outfit, check_coordination(outfit), 0.0);
  const Vec2 p = at(fixed[0].points, "hem_left");
  CHECK(p.x == doctest::Approx(0.2));
  CHECK(p.y == doctest::Approx(0.8));
  CHECK(check_coordination(fixed).empty());
}

TEST_CASE("coordination: degenerate outer hull") {
  const ControlPointSet coat = point_set({{pid("hem_left"), {0.2, 0.8}}, {pid("hem_right"), {0.8, 0.8}}});
  const ControlPointSet skirt = point_set({{pid("hem_left"), {0.5, 0.9}}});
  const std::vector<OutfitItem> outfit{item(skirt, GarmentCategory::skirt), item(coat, GarmentCategory::outerwear)};
  const auto v = check_coordination(outfit);
  CHECK_FALSE(v.empty());
  CHECK_THROWS_AS(fix_coordination(outfit, v, 0.01), ValidationError);
}

TEST_CASE("convex hull agrees with gift wrapping") {
  Rng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(rng, static_cast<std::size_t>(uniform_int(rng, 3, 30)));
    const ConvexHull h = convex_hull(pts);
    const auto ref = oracle::hull(pts);
    CHECK(h.vertices.size() == ref.size());
    for (const Vec2 probe : random_points(rng, 40, -0.1, 1.1)) {
      const bool inside = oracle::in_convex_polygon(ref, probe, 1e-9);
      CHECK((outside_distance(h, probe) == 0.0) == inside);
    }
  }
}
