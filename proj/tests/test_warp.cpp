#include <doctest.h>

#include <cmath>

#include "drape/error.hpp"
#include "drape/synthetic.hpp"
#include "drape/tps.hpp"
#include "drape/warp.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace drape;
using namespace drape::test;

namespace {

double max_residual(const TpsWarp &w, const std::vector<Vec2> &src, const std::vector<Vec2> &dst) {
  double r = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i)
    r = std::max(r, distance(w.apply(src[i]), dst[i]));
  return r;
}

// Four corners plus interior points, in garment-image normalized units.
GarmentAsset corner_garment(const Image &image) {
  GarmentAsset a;
  a.meta = meta("g", GarmentCategory::top);
  a.image = image;
  a.mask = alpha_support(image);
  a.source_points.schema_version = default_schema().version();
  const std::vector<std::pair<std::string, Vec2>> pts = {{"collar_left", {0, 0}},
                                                           {"collar_right", {1, 0}},
                                                           {"hem_left", {0, 1}},
                                                           {"hem_right", {1, 1}},
                                                           {"torso_center", {0.5, 0.5}}};
  for (const auto &[name, p] : pts) {
    at(a.source_points, name) = p;
    a.source_points.present.set(static_cast<std::size_t>(pid(name)));
  }
  return a;
}

ControlPointSet mapped(const GarmentAsset &a, auto f) {
  ControlPointSet k = a.source_points;
  for (auto &p : k.coords)
    p = f(p);
  return k;
}

Image checkerboard(int w, int h, int cell) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool dark = ((x / cell) + (y / cell)) % 2 == 0;
      img(x, y) = dark ? Rgba{0, 0, 0, 255} : Rgba{255, 255, 255, 255};
    }
  return img;
}

} // namespace

TEST_CASE("tps identity on the unit square") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  const TpsWarp w = fit_tps(sq, sq, 0.0);
  CHECK(std::abs(w.affine(0, 0)) < 1e-12);
  CHECK(std::abs(w.affine(0, 1) - 1) < 1e-12);
  CHECK(std::abs(w.affine(0, 2)) < 1e-12);
  CHECK(std::abs(w.affine(1, 0)) < 1e-12);
  CHECK(std::abs(w.affine(1, 1)) < 1e-12);
  CHECK(std::abs(w.affine(1, 2) - 1) < 1e-12);
  CHECK(w.weights.norm() < 1e-12);
  CHECK(distance(w.apply({0.3, 0.8}), {0.3, 0.8}) < 1e-12);
}

TEST_CASE("tps translation is pure affine") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.4, 0.6}};
  std::vector<Vec2> dst;
  for (Vec2 p : sq)
    dst.push_back(p + Vec2{0.1, 0});
  const TpsWarp w = fit_tps(sq, dst, 0.0);
  CHECK(w.weights.norm() <= 1e-9);
  CHECK(std::abs(w.affine(0, 0) - 0.1) < 1e-9);
  const Vec2 p = w.apply({0.2, 0.2});
  CHECK(std::abs(p.x - 0.3) < 1e-9);
  CHECK(std::abs(p.y - 0.2) < 1e-9);
}

TEST_CASE("tps matches an independent dense solver") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 3, 25));
    const auto src = random_points(rng, n);
    const auto dst = random_points(rng, n);
    const double lambda = trial % 2 ? 0.0 : uniform(rng, 0.0, 0.1);
    const TpsWarp w = fit_tps(src, dst, lambda);
    const auto ref = oracle::Tps::fit(src, dst, lambda);
    for (const Vec2 probe : random_points(rng, 20, -0.2, 1.2))
      CHECK(distance(w.apply(probe), ref(probe)) < 1e-7);
    if (lambda == 0.0)
      CHECK(max_residual(w, src, dst) < 1e-6);
  }
}

TEST_CASE("tps side conditions hold") {
  Rng rng(32);
  const auto src = random_points(rng, 12);
  const auto dst = random_points(rng, 12);
  const TpsWarp w = fit_tps(src, dst, 0.01);
  for (int c = 0; c < 2; ++c) {
    double s = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double wi = w.weights(static_cast<Eigen::Index>(i), c);
      s += wi;
      sx += wi * src[i].x;
      sy += wi * src[i].y;
    }
    CHECK(std::abs(s) < 1e-8);
    CHECK(std::abs(sx) < 1e-8);
    CHECK(std::abs(sy) < 1e-8);
  }
}

TEST_CASE("tps reproduces affine maps") {
  Rng rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    const auto src = random_points(rng, static_cast<std::size_t>(uniform_int(rng, 3, 20)));
    const double a = uniform(rng, -2, 2), b = uniform(rng, -2, 2), c = uniform(rng, -2, 2), d = uniform(rng, -2, 2);
    const Vec2 t{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    auto m = [&](Vec2 p) { return Vec2{a * p.x + b * p.y + t.x, c * p.x + d * p.y + t.y}; };
    std::vector<Vec2> dst;
    for (Vec2 p : src)
      dst.push_back(m(p));
    const TpsWarp w = fit_tps(src, dst, 0.0);
    CHECK(w.weights.norm() < 1e-8);
    for (const Vec2 probe : random_points(rng, 10, -1, 2))
      CHECK(distance(w.apply(probe), m(probe)) < 1e-6);
  }
}

TEST_CASE("tps residual grows with smoothing") {
  Rng rng(34);
  const auto src = random_points(rng, 15);
  const auto dst = random_points(rng, 15);
  double previous = -1.0;
  for (double lambda : {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
    const double r = max_residual(fit_tps(src, dst, lambda), src, dst);
    CHECK(r >= previous - 1e-12);
    previous = r;
  }
}

TEST_CASE("tps rejects bad inputs") {
  const std::vector<Vec2> line{{0, 0}, {0.5, 0.5}, {1, 1}};
  CHECK_THROWS_AS(fit_tps(line, line, 0.0), FitError);
  const std::vector<Vec2> two{{0, 0}, {1, 0}};
  CHECK_THROWS_AS(fit_tps(two, two, 0.0), FitError);
  const std::vector<Vec2> three{{0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(fit_tps(three, two, 0.0), FitError);
  const std::vector<Vec2> dup{{0, 0}, {0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(fit_tps(dup, dup, 0.0), FitError);
}

TEST_CASE("transform_points applies the warp pointwise") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  std::vector<Vec2> dst;
  for (Vec2 p : sq)
    dst.push_back(p + Vec2{0.1, 0});
  const TpsWarp w = fit_tps(sq, dst, 0.0);
  const std::vector<Vec2> pts{{0.2, 0.2}, {0.7, 0.1}};
  const auto out = transform_points(w, pts);
  CHECK(distance(out[0], {0.3, 0.2}) < 1e-9);
  CHECK(distance(out[1], {0.8, 0.1}) < 1e-9);
}

TEST_CASE("identity warp reproduces the garment") {
  Rng rng(35);
  Image img(40, 30);
  for (auto &p : img.pixels())
    p = {static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
         static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), 255};
  const GarmentAsset a = corner_garment(img);
  const WarpedGarment w = warp_image(a, a.source_points, {40, 30}, {0.0, 1});
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 40; ++x) {
      const Rgba s = img(x, y), o = w.image(x, y);
      CHECK(std::abs(s.r - o.r) <= 1);
      CHECK(std::abs(s.g - o.g) <= 1);
      CHECK(std::abs(s.b - o.b) <= 1);
      CHECK(std::abs(s.a - o.a) <= 1);
    }
}

TEST_CASE("constant colour survives any warp") {
  Rng rng(36);
  const Rgba red{230, 10, 20, 255};
  const GarmentAsset a = corner_garment(Image(32, 32, red));
  for (int trial = 0; trial < 5; ++trial) {
    const auto k = mapped(a, [&](Vec2 p) {
      return Vec2{0.2 + 0.6 * p.x + uniform(rng, -0.03, 0.03), 0.1 + 0.7 * p.y + uniform(rng, -0.03, 0.03)};
    });
    const WarpedGarment w = warp_image(a, k, {64, 64}, {1e-3, 1});
    CHECK(count_set(w.mask) > 0);
    for (const Rgba p : w.image.pixels())
      if (p.a != 0)
        CHECK(p == red);
  }
}

TEST_CASE("checkerboard period doubles under 2x scale") {
  const int cell = 4;
  const GarmentAsset a = corner_garment(checkerboard(64, 64, cell));
  const int before = oracle::autocorrelation_period(a.image, 6 * cell);
  CHECK(before == 2 * cell);
  // Garment fills the canvas at twice its pixel size.
  const WarpedGarment w = warp_image(a, a.source_points, {128, 128}, {0.0, 1});
  CHECK(oracle::autocorrelation_period(w.image, 6 * cell) == 4 * cell);
}

TEST_CASE("warp output only uses source colours blended from at most four pixels") {
  Rng rng(37);
  Image img(16, 16);
  for (auto &p : img.pixels())
    p = {static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), 0, 0, 255};
  const GarmentAsset a = corner_garment(img);
  const auto k = mapped(a, [](Vec2 p) { return Vec2{0.1 + 0.8 * p.x + 0.05 * p.y, 0.1 + 0.8 * p.y}; });
  const WarpedGarment w = warp_image(a, k, {48, 48}, {1e-3, 1});
  int lo = 255, hi = 0;
  for (const Rgba p : img.pixels()) {
    lo = std::min<int>(lo, p.r);
    hi = std::max<int>(hi, p.r);
  }
  for (const Rgba p : w.image.pixels())
    if (p.a) {
      CHECK(p.r >= lo);
      CHECK(p.r <= hi);
      CHECK(p.g == 0);
      CHECK(p.b == 0);
    }
}

TEST_CASE("warp is independent of thread count") {
  Rng rng(38);
  const GarmentAsset g = synthetic::random_garment(GarmentCategory::top, "t", rng, default_schema());
  ControlPointSet k = g.source_points;
  for (auto &p : k.coords)
    p = {0.15 + 0.7 * p.x, 0.1 + 0.6 * p.y};
  const auto one = warp_image(g, k, {96, 144}, {1e-3, 1});
  const auto four = warp_image(g, k, {96, 144}, {1e-3, 4});
  const auto again = warp_image(g, k, {96, 144}, {1e-3, 1});
  CHECK(one.image == four.image);
  CHECK(one.image == again.image);
  CHECK(one.mask == alpha_support(one.image));
}

TEST_CASE("warp needs three shared points") {
  const GarmentAsset a = corner_garment(Image(8, 8, {1, 2, 3, 255}));
  ControlPointSet k = a.source_points;
  k.present.reset();
  k.present.set(static_cast<std::size_t>(pid("collar_left")));
  k.present.set(static_cast<std::size_t>(pid("collar_right")));
  CHECK_THROWS_AS(warp_image(a, k, {8, 8}), RenderError);
}

TEST_CASE("split partitions the mask exactly") {
  Rng rng(39);
  for (int trial = 0; trial < 10; ++trial) {
    const GarmentAsset g = synthetic::random_garment(GarmentCategory::outerwear, "j", rng, default_schema());
    const auto [left, right] = split_garment(g, default_schema());
    std::size_t l = 0, r = 0;
    for (int y = 0; y < g.mask.height(); ++y)
      for (int x = 0; x < g.mask.width(); ++x) {
        CHECK((left.mask(x, y) | right.mask(x, y)) == g.mask(x, y));
        CHECK((left.mask(x, y) & right.mask(x, y)) == 0);
        l += left.mask(x, y);
        r += right.mask(x, y);
      }
    CHECK(l + r == count_set(g.mask));
    CHECK(l > 0);
    CHECK(r > 0);
  }
}

TEST_CASE("split assigns points by schema side") {
  Rng rng(40);
  const ControlPointSchema &schema = default_schema();
  const GarmentAsset g = synthetic::random_garment(GarmentCategory::outerwear, "j", rng, schema);
  const auto [left, right] = split_garment(g, schema);
  for (const PointDef &p : schema.points()) {
    const auto i = static_cast<std::size_t>(p.id);
    const bool in_left = p.side == Side::left || (p.side == Side::center && p.shared_on_split);
    const bool in_right = p.side == Side::right || (p.side == Side::center && p.shared_on_split);
    CHECK_MESSAGE(left.source_points.present[i] == (g.source_points.present[i] && in_left), p.name);
    CHECK_MESSAGE(right.source_points.present[i] == (g.source_points.present[i] && in_right), p.name);
  }
  CHECK(left.source_points.present[static_cast<std::size_t>(pid("collar_front_center"))]);
  CHECK(right.source_points.present[static_cast<std::size_t>(pid("collar_front_center"))]);
}

TEST_CASE("split needs a polyline spanning the mask") {
  Rng rng(41);
  GarmentAsset g = synthetic::random_garment(GarmentCategory::outerwear, "j", rng, default_schema());
  GarmentAsset shortened = g;
  shortened.split_polyline = {{0.5, 0.3}, {0.5, 0.6}};
  CHECK_THROWS_AS(split_garment(shortened, default_schema()), ValidationError);
  g.split_polyline.clear();
  CHECK_THROWS_AS(split_garment(g, default_schema()), ValidationError);
}

TEST_CASE("composite matches the integer over oracle") {
  Rng rng(42);
  Image dst(32, 32), src(32, 32);
  for (auto &p : dst.pixels())
    p = {static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
         static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255))};
  for (auto &p : src.pixels())
    p = {static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
         static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255))};
  Image out = dst;
  composite_over(out, src);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Rgba want = oracle::over(src.pixels()[i], dst.pixels()[i]);
    const Rgba got = out.pixels()[i];
    if (want.a == 0) {
      CHECK(got.a == 0);
      continue;
    }
    CHECK(std::abs(got.a - want.a) <= 1);
    CHECK(std::abs(got.r - want.r) <= 1);
    CHECK(std::abs(got.g - want.g) <= 1);
    CHECK(std::abs(got.b - want.b) <= 1);
  }
}

TEST_CASE("merge: disjoint halves, covering right half") {
  WarpedGarment left, right;
  left.image = Image(8, 4);
  right.image = Image(8, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      left.image(x, y) = {255, 0, 0, 255};
      right.image(x + 4, y) = {0, 0, 255, 255};
    }
  left.mask = alpha_support(left.image);
  right.mask = alpha_support(right.image);
  const auto lr = merge_warped(left, right);
  const auto rl = merge_warped(right, left);
  CHECK(lr.image == rl.image);
  CHECK(count_set(lr.mask) == 32);

  WarpedGarment cover;
  cover.image = Image(8, 4, {9, 9, 9, 255});
  cover.mask = alpha_support(cover.image);
  CHECK(merge_warped(left, cover).image == cover.image);
  CHECK_THROWS_AS(merge_warped(left, WarpedGarment{Image(3, 3), Mask(3, 3), {}, {}}), RenderError);
}
