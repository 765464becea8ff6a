#include "drape/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include <fmt/format.h>

#include "drape/error.hpp"

namespace drape::synthetic {

namespace {

using PointTable = std::vector<std::pair<std::string, Vec2>>;

std::string mirror_name(const std::string &name) {
  std::string out = name;
  const auto at = out.find("left");
  if (at != std::string::npos)
    out.replace(at, 4, "right");
  return out;
}

// Left-side and centre points; right-side points are mirrored about x = 0.5.
ControlPointSet build_points(const PointTable &table, const ControlPointSchema &schema) {
  ControlPointSet k;
  k.schema_version = schema.version();
  auto put = [&](const std::string &name, Vec2 p) {
    const auto id = schema.find(name);
    if (!id)
      throw SchemaError(fmt::format("synthetic template uses unknown point \"{}\"", name));
    k.coords[static_cast<std::size_t>(*id)] = p;
    k.present.set(static_cast<std::size_t>(*id));
  };
  for (const auto &[name, p] : table) {
    put(name, p);
    if (name.find("left") != std::string::npos)
      put(mirror_name(name), {1.0 - p.x, p.y});
  }
  return k;
}

void replace(PointTable &table, const std::string &name, Vec2 p) {
  for (auto &entry : table)
    if (entry.first == name) {
      entry.second = p;
      return;
    }
  table.emplace_back(name, p);
}

void drop(PointTable &table, const std::string &name) {
  std::erase_if(table, [&](const auto &e) { return e.first == name; });
}

const std::vector<Joint> kCore = {Joint::neck, Joint::left_shoulder, Joint::right_shoulder, Joint::left_hip,
                                  Joint::right_hip};

std::vector<AnchorRule> upper_body_anchors() {
  return {{"sleeve_*_left_*", {Joint::left_shoulder, Joint::left_elbow, Joint::left_wrist}},
          {"sleeve_*_right_*", {Joint::right_shoulder, Joint::right_elbow, Joint::right_wrist}},
          {"*", kCore}};
}

const std::vector<Joint> kHipsKnees = {Joint::left_hip, Joint::right_hip, Joint::left_knee, Joint::right_knee};

PointTable top_untuck() {
  return {
      {"collar_left", {0.465, 0.165}},
      {"collar_front_center", {0.5, 0.2}},
      {"shoulder_left", {0.405, 0.185}},
      {"sleeve_outer_left_upper", {0.38, 0.235}},
      {"sleeve_outer_left_elbow", {0.355, 0.33}},
      {"sleeve_outer_left_cuff", {0.335, 0.445}},
      {"sleeve_inner_left_cuff", {0.368, 0.455}},
      {"sleeve_inner_left_armpit", {0.42, 0.275}},
      {"torso_left_chest", {0.425, 0.31}},
      {"torso_left_waist", {0.43, 0.44}},
      {"torso_center", {0.5, 0.5}},
      {"waistline_left", {0.445, 0.46}},
      {"waistline_center", {0.5, 0.46}},
      {"hem_left", {0.425, 0.565}},
      {"hem_left_mid", {0.46, 0.57}},
      {"hem_center", {0.5, 0.572}},
  };
}

PointTable top_full_tuck() {
  PointTable t = top_untuck();
  replace(t, "torso_center", {0.5, 0.42});
  replace(t, "hem_left", {0.435, 0.478});
  replace(t, "hem_left_mid", {0.465, 0.482});
  replace(t, "hem_center", {0.5, 0.484});
  return t;
}

PointTable outerwear_closed() {
  return {
      {"collar_left", {0.46, 0.16}},
      {"collar_front_center", {0.5, 0.23}},
      {"collar_left_lapel", {0.475, 0.205}},
      {"shoulder_left", {0.395, 0.18}},
      {"sleeve_outer_left_upper", {0.37, 0.235}},
      {"sleeve_outer_left_elbow", {0.345, 0.33}},
      {"sleeve_outer_left_cuff", {0.325, 0.46}},
      {"sleeve_inner_left_cuff", {0.365, 0.47}},
      {"sleeve_inner_left_armpit", {0.415, 0.28}},
      {"torso_left_chest", {0.415, 0.31}},
      {"torso_left_waist", {0.42, 0.45}},
      {"torso_center", {0.5, 0.45}},
      {"hem_left", {0.415, 0.6}},
      {"hem_left_mid", {0.455, 0.605}},
      {"hem_center", {0.5, 0.607}},
  };
}

// Split edges of an open front swing outwards from the centre line.
PointTable outerwear_open() {
  PointTable t = outerwear_closed();
  drop(t, "torso_center");
  drop(t, "hem_center");
  replace(t, "collar_left_lapel", {0.468, 0.21});
  replace(t, "split_left_upper", {0.478, 0.26});
  replace(t, "split_left_chest", {0.47, 0.31});
  replace(t, "split_left_waist", {0.465, 0.45});
  replace(t, "split_left_hem", {0.46, 0.603});
  return t;
}

PointTable bottom_trousers() {
  return {
      {"waistline_left", {0.44, 0.47}},
      {"waistline_center", {0.5, 0.47}},
      {"leg_crotch", {0.5, 0.57}},
      {"leg_left_thigh_outer", {0.433, 0.56}},
      {"leg_left_knee_outer", {0.425, 0.68}},
      {"leg_left_knee_inner", {0.472, 0.68}},
      {"leg_left_ankle_outer", {0.426, 0.86}},
      {"leg_left_ankle_inner", {0.474, 0.86}},
  };
}

PointTable skirt_aline() {
  return {
      {"waistline_left", {0.445, 0.47}},
      {"waistline_center", {0.5, 0.47}},
      {"hem_left", {0.405, 0.645}},
      {"hem_left_mid", {0.45, 0.65}},
      {"hem_center", {0.5, 0.652}},
  };
}

PointTable dress_midi() {
  return {
      {"collar_left", {0.465, 0.165}},
      {"collar_front_center", {0.5, 0.21}},
      {"shoulder_left", {0.41, 0.185}},
      {"sleeve_outer_left_upper", {0.39, 0.215}},
      {"sleeve_outer_left_elbow", {0.38, 0.25}},
      {"sleeve_outer_left_cuff", {0.372, 0.282}},
      {"sleeve_inner_left_cuff", {0.398, 0.292}},
      {"sleeve_inner_left_armpit", {0.42, 0.272}},
      {"torso_left_chest", {0.428, 0.31}},
      {"torso_left_waist", {0.44, 0.43}},
      {"torso_center", {0.5, 0.38}},
      {"waistline_left", {0.45, 0.45}},
      {"waistline_center", {0.5, 0.45}},
      {"hem_left", {0.39, 0.7}},
      {"hem_left_mid", {0.445, 0.706}},
      {"hem_center", {0.5, 0.708}},
  };
}

CanonicalTemplate make_template(std::string name, GarmentCategory category, StyleKey key, const PointTable &table,
                                std::vector<AnchorRule> anchors, const ControlPointSchema &schema) {
  CanonicalTemplate t;
  t.name = std::move(name);
  t.category = category;
  t.style_key = key;
  t.reference = reference_pose();
  t.points = build_points(table, schema);
  t.points.style = key.apply_to(StyleVector{});
  t.anchors = std::move(anchors);
  return t;
}

// Outline through named points, left side listed; the right side is the mirror, reversed.
struct Outline {
  std::vector<std::string> left;   // from the top centre down the left side
  std::vector<std::string> bottom; // centre points between the two sides, left to right
  std::vector<std::string> top;    // centre points closing the loop, right to left
};

std::vector<std::string> expand(const Outline &o) {
  std::vector<std::string> out = o.left;
  out.insert(out.end(), o.bottom.begin(), o.bottom.end());
  for (auto it = o.left.rbegin(); it != o.left.rend(); ++it)
    out.push_back(mirror_name(*it));
  out.insert(out.end(), o.top.begin(), o.top.end());
  return out;
}

Outline upper_outline(bool hem) {
  Outline o;
  o.left = {"collar_left",           "shoulder_left",          "sleeve_outer_left_upper", "sleeve_outer_left_elbow",
            "sleeve_outer_left_cuff", "sleeve_inner_left_cuff", "sleeve_inner_left_armpit", "torso_left_chest",
            "torso_left_waist"};
  if (hem) {
    o.left.push_back("hem_left");
    o.left.push_back("hem_left_mid");
    o.bottom = {"hem_center"};
  }
  o.top = {"collar_front_center"};
  return o;
}

Outline outline_for(GarmentCategory c) {
  switch (c) {
  case GarmentCategory::top:
  case GarmentCategory::outerwear:
  case GarmentCategory::dress:
    return upper_outline(true);
  case GarmentCategory::bottom:
    return {{"waistline_left", "leg_left_thigh_outer", "leg_left_knee_outer", "leg_left_ankle_outer",
             "leg_left_ankle_inner", "leg_left_knee_inner"},
            {"leg_crotch"},
            {"waistline_center"}};
  case GarmentCategory::skirt:
    return {{"waistline_left", "hem_left", "hem_left_mid"}, {"hem_center"}, {"waistline_center"}};
  }
  throw ValidationError("unknown garment category");
}

// Flat-garment geometry: the category's base template, with outerwear
// split points on the centre line.
PointTable asset_table(GarmentCategory c) {
  switch (c) {
  case GarmentCategory::top:
    return top_untuck();
  case GarmentCategory::bottom:
    return bottom_trousers();
  case GarmentCategory::skirt:
    return skirt_aline();
  case GarmentCategory::dress:
    return dress_midi();
  case GarmentCategory::outerwear: {
    PointTable t = outerwear_closed();
    return t;
  }
  }
  throw ValidationError("unknown garment category");
}

Vec2 lookup(const PointTable &t, const std::string &name) {
  for (const auto &[n, p] : t)
    if (n == name)
      return p;
  throw ValidationError(fmt::format("synthetic table has no point \"{}\"", name));
}

Rgba scaled(Rgba c, double f) {
  auto q = [&](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v * f), 0L, 255L)); };
  return {q(c.r), q(c.g), q(c.b), c.a};
}

double metric_distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + t * ab);
}

class Painter {
public:
  Painter(Image &image, SemanticLayout &layout) : image_(image), layout_(layout) {
    aspect_ = static_cast<double>(image.width()) / image.height();
  }

  void paint(const std::function<bool(Vec2)> &inside, LayoutClass cls, Rgba color) {
    const int w = image_.width();
    const int h = image_.height();
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const Vec2 m{(x + 0.5) / w * aspect_, (y + 0.5) / h};
        if (inside(m)) {
          image_(x, y) = color;
          layout_.set(x, y, cls);
        }
      }
  }

  Vec2 metric(Vec2 p) const { return {p.x * aspect_, p.y}; }

  void capsule(Vec2 a, Vec2 b, double r, LayoutClass cls, Rgba color) {
    const Vec2 ma = metric(a), mb = metric(b);
    paint([&](Vec2 m) { return metric_distance_to_segment(m, ma, mb) <= r; }, cls, color);
  }

  void ellipse(Vec2 c, double rx, double ry, LayoutClass cls, Rgba color) {
    const Vec2 mc = metric(c);
    paint(
        [&](Vec2 m) {
          const double dx = (m.x - mc.x) / rx, dy = (m.y - mc.y) / ry;
          return dx * dx + dy * dy <= 1.0;
        },
        cls, color);
  }

  void polygon(const std::vector<Vec2> &poly, LayoutClass cls, Rgba color) {
    Mask m(image_.width(), image_.height(), 0);
    fill_polygon(m, poly);
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        if (m(x, y)) {
          image_(x, y) = color;
          layout_.set(x, y, cls);
        }
  }

private:
  Image &image_;
  SemanticLayout &layout_;
  double aspect_ = 1.0;
};

} // namespace

BodyPose reference_pose() {
  BodyPose p;
  p.canvas_aspect = kReferenceAspect;
  p.set(Joint::head, {0.5, 0.08});
  p.set(Joint::neck, {0.5, 0.17});
  p.set(Joint::left_shoulder, {0.41, 0.19});
  p.set(Joint::right_shoulder, {0.59, 0.19});
  p.set(Joint::left_elbow, {0.37, 0.33});
  p.set(Joint::right_elbow, {0.63, 0.33});
  p.set(Joint::left_wrist, {0.35, 0.46});
  p.set(Joint::right_wrist, {0.65, 0.46});
  p.set(Joint::left_hip, {0.45, 0.5});
  p.set(Joint::right_hip, {0.55, 0.5});
  p.set(Joint::left_knee, {0.45, 0.68});
  p.set(Joint::right_knee, {0.55, 0.68});
  p.set(Joint::left_ankle, {0.45, 0.87});
  p.set(Joint::right_ankle, {0.55, 0.87});
  p.set(Joint::left_eye, {0.48, 0.07});
  p.set(Joint::right_eye, {0.52, 0.07});
  p.set(Joint::left_ear, {0.46, 0.08});
  p.set(Joint::right_ear, {0.54, 0.08});
  return p;
}

BodyPose perturb_pose(const BodyPose &pose, std::mt19937_64 &rng, double amount) {
  std::uniform_real_distribution<double> d(-amount, amount);
  BodyPose out = pose;
  for (std::size_t i = 0; i < kJointCount; ++i)
    if (out.confidence[i] > 0.0)
      out.joints[i] += Vec2{d(rng), d(rng)};
  return out;
}

std::vector<CanonicalTemplate> canonical_templates(const ControlPointSchema &schema) {
  StyleKey untuck, full_tuck, closed, open;
  untuck.tuck = Tuck::untuck;
  full_tuck.tuck = Tuck::full_tuck;
  closed.closure = Closure::closed;
  open.closure = Closure::open;

  std::vector<CanonicalTemplate> out;
  out.push_back(make_template("top_untuck", GarmentCategory::top, untuck, top_untuck(), upper_body_anchors(), schema));
  out.push_back(
      make_template("top_full_tuck", GarmentCategory::top, full_tuck, top_full_tuck(), upper_body_anchors(), schema));
  out.push_back(make_template("outerwear_closed", GarmentCategory::outerwear, closed, outerwear_closed(),
                              upper_body_anchors(), schema));
  out.push_back(make_template("outerwear_open", GarmentCategory::outerwear, open, outerwear_open(),
                              upper_body_anchors(), schema));
  out.push_back(make_template("bottom_trousers", GarmentCategory::bottom, {}, bottom_trousers(),
                              {{"leg_left_*", {Joint::left_hip, Joint::left_knee, Joint::left_ankle}},
                               {"leg_right_*", {Joint::right_hip, Joint::right_knee, Joint::right_ankle}},
                               {"*", kCore}},
                              schema));
  out.push_back(make_template("skirt_aline", GarmentCategory::skirt, {}, skirt_aline(),
                              {{"hem_*", kHipsKnees}, {"*", kCore}}, schema));
  auto dress_anchors = upper_body_anchors();
  dress_anchors.insert(dress_anchors.begin() + 2, AnchorRule{"hem_*", kHipsKnees});
  out.push_back(make_template("dress_midi", GarmentCategory::dress, {}, dress_midi(), dress_anchors, schema));
  return out;
}

TemplateLibrary canonical_library(const ControlPointSchema &schema) {
  TemplateLibrary lib;
  for (auto &t : canonical_templates(schema))
    lib.add(std::move(t));
  return lib;
}

void fill_polygon(Mask &mask, std::span<const Vec2> polygon) {
  const int w = mask.width();
  const int h = mask.height();
  const std::size_t n = polygon.size();
  if (n < 3)
    return;
  std::vector<double> xs;
  for (int py = 0; py < h; ++py) {
    const double y = (py + 0.5) / h;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = polygon[i];
      const Vec2 b = polygon[(i + 1) % n];
      if ((a.y <= y) != (b.y <= y))
        xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k] * w - 0.5)));
      const int x1 = std::min(w - 1, static_cast<int>(std::ceil(xs[k + 1] * w - 0.5)) - 1);
      for (int px = x0; px <= x1; ++px)
        mask(px, py) = 1;
    }
  }
}

GarmentAsset make_garment(const GarmentMeta &meta, const ControlPointSchema &schema, const GarmentLook &look,
                          CanvasSize size) {
  if (size.width < 16 || size.height < 16)
    throw ValidationError("synthetic garment image must be at least 16x16");
  PointTable table = asset_table(meta.category);

  std::mt19937_64 rng(look.seed);
  std::uniform_real_distribution<double> noise(-look.jitter, look.jitter);
  double top_y = 1.0;
  for (const auto &e : table)
    top_y = std::min(top_y, e.second.y);
  for (auto &[name, p] : table) {
    p.x = 0.5 + (p.x - 0.5) * look.width_scale;
    p.y = top_y + (p.y - top_y) * look.length_scale;
    if (look.jitter > 0 && p.x != 0.5) {
      p.x += noise(rng);
      p.y += noise(rng);
    }
  }
  ControlPointSet k = build_points(table, schema);

  const bool split = meta.category == GarmentCategory::outerwear;
  if (split) {
    const double ys[4] = {lookup(table, "collar_front_center").y + 0.03, lookup(table, "torso_left_chest").y,
                          lookup(table, "torso_left_waist").y, lookup(table, "hem_center").y - 0.004};
    const char *suffix[4] = {"upper", "chest", "waist", "hem"};
    for (int i = 0; i < 4; ++i)
      for (const char *side : {"left", "right"}) {
        const auto id = static_cast<std::size_t>(*schema.find(fmt::format("split_{}_{}", side, suffix[i])));
        k.coords[id] = {0.5, ys[i]};
        k.present.set(id);
      }
  }

  // Template frame -> garment image: keep proportions, fit into [0.06, 0.94].
  const double aspect = kReferenceAspect;
  Vec2 lo{1e9, 1e9}, hi{-1e9, -1e9};
  for (std::size_t i = 0; i < kPointCount; ++i)
    if (k.present.test(i)) {
      const Vec2 m{k.coords[i].x * aspect, k.coords[i].y};
      lo = {std::min(lo.x, m.x), std::min(lo.y, m.y)};
      hi = {std::max(hi.x, m.x), std::max(hi.y, m.y)};
    }
  const double span = std::max(hi.x - lo.x, hi.y - lo.y);
  const double px_scale = 0.88 * std::min(size.width, size.height) / span;
  const Vec2 mid = 0.5 * (lo + hi);
  auto to_image = [&](Vec2 p) {
    const Vec2 m{p.x * aspect, p.y};
    return Vec2{(size.width / 2.0 + (m.x - mid.x) * px_scale) / size.width,
                (size.height / 2.0 + (m.y - mid.y) * px_scale) / size.height};
  };
  const double centre_u = to_image({0.5, 0.5}).x;
  for (std::size_t i = 0; i < kPointCount; ++i)
    if (k.present.test(i))
      k.coords[i] = to_image(k.coords[i]);

  GarmentAsset asset;
  asset.meta = meta;
  asset.source_points = std::move(k);
  asset.source_points.schema_version = schema.version();

  std::vector<Vec2> outline;
  for (const std::string &name : expand(outline_for(meta.category)))
    outline.push_back(asset.source_points.coords[static_cast<std::size_t>(*schema.find(name))]);
  asset.mask = Mask(size.width, size.height, 0);
  fill_polygon(asset.mask, outline);

  asset.image = Image(size.width, size.height);
  const Rgba edge = scaled(look.base, 0.6);
  for (int y = 0; y < size.height; ++y)
    for (int x = 0; x < size.width; ++x) {
      if (!asset.mask(x, y))
        continue;
      bool border = false;
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
        border |= !asset.mask.in_bounds(x + dx, y + dy) || !asset.mask(x + dx, y + dy);
      Rgba c = look.base;
      if (look.stripe_period > 1 && (y / (look.stripe_period / 2)) % 2 == 1)
        c = look.accent;
      const double shade = 0.88 + 0.12 * std::cos(6.283185307179586 * (x + 0.5) / size.width);
      asset.image(x, y) = border ? edge : scaled(c, shade);
    }

  if (split) {
    asset.split_polyline = {{centre_u, 0.0}, {centre_u, 1.0}};
    for (std::size_t i = 0; i < kPointCount; ++i)
      if (schema.point(static_cast<int>(i)).group == PointGroup::split_edge)
        asset.source_points.coords[i].x = centre_u;
  }
  asset.validate(schema);
  return asset;
}

GarmentAsset random_garment(GarmentCategory category, const std::string &id, std::mt19937_64 &rng,
                            const ControlPointSchema &schema, CanvasSize size) {
  std::uniform_int_distribution<int> channel(30, 225);
  std::uniform_real_distribution<double> width(0.92, 1.08);
  std::uniform_real_distribution<double> length(0.9, 1.06);
  std::uniform_int_distribution<int> stripes(0, 3);
  GarmentMeta meta;
  meta.id = id;
  meta.category = category;
  GarmentLook look;
  look.base = {static_cast<std::uint8_t>(channel(rng)), static_cast<std::uint8_t>(channel(rng)),
               static_cast<std::uint8_t>(channel(rng)), 255};
  look.accent = {static_cast<std::uint8_t>(channel(rng)), static_cast<std::uint8_t>(channel(rng)),
                 static_cast<std::uint8_t>(channel(rng)), 255};
  look.stripe_period = stripes(rng) * 8;
  look.width_scale = width(rng);
  look.length_scale = length(rng);
  look.jitter = 0.003;
  look.seed = rng();
  return make_garment(meta, schema, look, size);
}

Person make_person(const BodyPose &pose, CanvasSize canvas) {
  pose.validate();
  Person person;
  person.pose = pose;
  person.image = Image(canvas.width, canvas.height, Rgba{236, 236, 232, 255});
  person.layout = SemanticLayout(canvas);
  Painter p(person.image, person.layout);

  const Rgba skin{224, 172, 140, 255};
  const Rgba hair{70, 45, 30, 255};
  auto at = [&](Joint j) { return pose.at(j); };
  auto has = [&](Joint j) { return pose.has(j); };

  if (has(Joint::head)) {
    p.ellipse(at(Joint::head) + Vec2{0, -0.01}, 0.05, 0.062, LayoutClass::hair, hair);
    p.ellipse(at(Joint::head) + Vec2{0, 0.008}, 0.04, 0.052, LayoutClass::face, skin);
    p.capsule(at(Joint::head) + Vec2{0, 0.04}, at(Joint::neck), 0.022, LayoutClass::neckline_skin, skin);
  }
  p.ellipse(at(Joint::neck) + Vec2{0, 0.02}, 0.045, 0.03, LayoutClass::neckline_skin, skin);

  const Vec2 ls = at(Joint::left_shoulder), rs = at(Joint::right_shoulder);
  const Vec2 lh = at(Joint::left_hip), rh = at(Joint::right_hip);
  const Vec2 neck = at(Joint::neck);

  for (auto [hip, knee, ankle] : {std::tuple{Joint::left_hip, Joint::left_knee, Joint::left_ankle},
                                  std::tuple{Joint::right_hip, Joint::right_knee, Joint::right_ankle}}) {
    if (has(knee)) {
      p.capsule(at(hip), at(knee), 0.03, LayoutClass::legs, skin);
      if (has(ankle)) {
        p.capsule(at(knee), at(ankle), 0.024, LayoutClass::legs, skin);
        p.ellipse(at(ankle) + Vec2{0, 0.025}, 0.03, 0.018, LayoutClass::shoes, Rgba{40, 40, 40, 255});
      }
    }
  }

  p.polygon({ls + Vec2{0.015, -0.003}, neck + Vec2{-0.03, 0.012}, neck + Vec2{0.03, 0.012}, rs + Vec2{-0.015, -0.003},
             rh + Vec2{0.012, 0.02}, lh + Vec2{-0.012, 0.02}},
            LayoutClass::top, Rgba{150, 150, 150, 255});

  const Vec2 lk = has(Joint::left_knee) ? at(Joint::left_knee) : lh + Vec2{0, 0.18};
  const Vec2 rk = has(Joint::right_knee) ? at(Joint::right_knee) : rh + Vec2{0, 0.18};
  const double thigh = 0.5 * (lh.y + lk.y) + 0.02;
  p.polygon({lh + Vec2{-0.016, -0.03}, rh + Vec2{0.016, -0.03}, {rk.x + 0.034, thigh}, {rk.x - 0.012, thigh},
             {0.5 * (lh.x + rh.x), 0.5 * (lh.y + rh.y) + 0.07}, {lk.x + 0.012, thigh}, {lk.x - 0.034, thigh}},
            LayoutClass::bottom, Rgba{90, 90, 110, 255});

  for (auto [shoulder, elbow, wrist] : {std::tuple{Joint::left_shoulder, Joint::left_elbow, Joint::left_wrist},
                                        std::tuple{Joint::right_shoulder, Joint::right_elbow, Joint::right_wrist}}) {
    if (!has(elbow))
      continue;
    p.capsule(at(shoulder), at(elbow), 0.022, LayoutClass::arms, skin);
    if (has(wrist)) {
      p.capsule(at(elbow), at(wrist), 0.018, LayoutClass::arms, skin);
      const Vec2 dir = at(wrist) - at(elbow);
      p.ellipse(at(wrist) + (0.02 / std::max(norm(dir), 1e-9)) * dir, 0.018, 0.022, LayoutClass::arms, skin);
    }
  }
  return person;
}

} // namespace drape::synthetic
