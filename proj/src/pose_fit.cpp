#include "drape/pose_fit.hpp"

#include <algorithm>
#include <complex>

#include <fmt/format.h>

#include "drape/error.hpp"
#include "drape/io.hpp"

namespace drape {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "head",       "neck",      "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist", "left_hip",    "right_hip",      "left_knee",  "right_knee",
    "left_ankle", "right_ankle", "left_eye",    "right_eye",      "left_ear",   "right_ear"};

constexpr std::array kCoreAnchors = {Joint::neck, Joint::left_shoulder, Joint::right_shoulder, Joint::left_hip,
                                     Joint::right_hip};

// Groups a tuck variant is allowed to move.
bool tuck_group(PointGroup g) {
  return g == PointGroup::waistline || g == PointGroup::hem || g == PointGroup::torso_side;
}

// Normalized canvas coordinates are anisotropic; similarities are fitted in
// a frame where one unit is the same length along both axes.
Vec2 to_metric(Vec2 p, double aspect) { return {p.x * aspect, p.y}; }
Vec2 from_metric(Vec2 p, double aspect) { return {p.x / aspect, p.y}; }

} // namespace

std::string_view to_string(Joint j) { return kJointNames[static_cast<std::size_t>(j)]; }

std::optional<Joint> parse_joint(std::string_view s) {
  for (std::size_t i = 0; i < kJointCount; ++i)
    if (kJointNames[i] == s)
      return static_cast<Joint>(i);
  return std::nullopt;
}

void BodyPose::set(Joint j, Vec2 p, double conf) {
  joints[static_cast<std::size_t>(j)] = p;
  confidence[static_cast<std::size_t>(j)] = conf;
}

void BodyPose::validate() const {
  for (Joint j : kCoreAnchors)
    if (!has(j))
      throw ValidationError(fmt::format("pose is missing required joint \"{}\"", to_string(j)));
  for (std::size_t i = 0; i < kJointCount; ++i)
    if (!std::isfinite(joints[i].x) || !std::isfinite(joints[i].y))
      throw ValidationError(fmt::format("joint \"{}\" is not finite", kJointNames[i]));
  if (!(canvas_aspect > 0.0))
    throw ValidationError("canvas_aspect must be positive");
}

double BodyPose::body_height() const {
  const Vec2 hips = 0.5 * (at(Joint::left_hip) + at(Joint::right_hip));
  return distance(hips, at(Joint::neck));
}

Vec2 Similarity::apply(Vec2 p) const {
  const std::complex<double> a = std::polar(scale, rotation);
  const std::complex<double> r = a * std::complex<double>(p.x, p.y);
  return {r.real() + translation.x, r.imag() + translation.y};
}

Similarity fit_similarity(std::span<const Vec2> src, std::span<const Vec2> dst) {
  using C = std::complex<double>;
  if (src.size() != dst.size())
    throw FitError("similarity fit: point lists differ in length");
  if (src.size() < 2)
    throw FitError("similarity fit: need at least two points");

  C src_mean{}, dst_mean{};
  for (std::size_t i = 0; i < src.size(); ++i) {
    src_mean += C(src[i].x, src[i].y);
    dst_mean += C(dst[i].x, dst[i].y);
  }
  src_mean /= static_cast<double>(src.size());
  dst_mean /= static_cast<double>(dst.size());

  C num{};
  double den = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const C s = C(src[i].x, src[i].y) - src_mean;
    const C d = C(dst[i].x, dst[i].y) - dst_mean;
    num += d * std::conj(s);
    den += std::norm(s);
  }
  if (!(den > 1e-24))
    throw FitError("similarity fit: source points are coincident");

  const C a = num / den;
  const C t = dst_mean - a * src_mean;
  return {std::abs(a), std::arg(a), {t.real(), t.imag()}};
}

std::optional<std::size_t> CanonicalTemplate::anchor_for(std::string_view point_name) const {
  for (std::size_t i = 0; i < anchors.size(); ++i)
    if (glob_match(anchors[i].pattern, point_name))
      return i;
  return std::nullopt;
}

CanonicalTemplate load_canonical_template(const std::filesystem::path &path, const ControlPointSchema &schema) {
  const auto j = io::read_json(path);
  CanonicalTemplate t;
  try {
    t.name = j.value("name", path.stem().string());
    const auto cat = j.at("category").get<std::string>();
    auto c = parse_category(cat);
    if (!c)
      throw ValidationError(fmt::format("{}: unknown category \"{}\"", path.string(), cat));
    t.category = *c;
    t.style_key = io::style_key_from_json(j.value("style", io::json()));
    t.reference = io::pose_from_json(j.at("reference_pose"));
    t.points = io::points_from_json(j.at("points"), schema);
    for (const auto &rule : j.at("anchors")) {
      AnchorRule r;
      r.pattern = rule.at("points").get<std::string>();
      for (const auto &name : rule.at("joints")) {
        auto joint = parse_joint(name.get<std::string>());
        if (!joint)
          throw ValidationError(fmt::format("{}: unknown joint \"{}\"", path.string(), name.get<std::string>()));
        r.joints.push_back(*joint);
      }
      t.anchors.push_back(std::move(r));
    }
  } catch (const io::json::exception &e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return t;
}

void save_canonical_template(const CanonicalTemplate &t, const std::filesystem::path &path,
                             const ControlPointSchema &schema) {
  io::json anchors = io::json::array();
  for (const AnchorRule &r : t.anchors) {
    io::json joints = io::json::array();
    for (Joint j : r.joints)
      joints.push_back(std::string(to_string(j)));
    anchors.push_back({{"points", r.pattern}, {"joints", std::move(joints)}});
  }
  io::json j = {{"name", t.name},
                {"category", std::string(to_string(t.category))},
                {"style", io::to_json(t.style_key)},
                {"reference_pose", io::to_json(t.reference)},
                {"anchors", std::move(anchors)},
                {"points", io::to_json(t.points, schema)}};
  io::write_text(path, j.dump(2) + "\n");
}

void TemplateLibrary::add(CanonicalTemplate t) { templates_.push_back(std::move(t)); }

TemplateLibrary TemplateLibrary::load_dir(const std::filesystem::path &dir, const ControlPointSchema &schema) {
  if (!std::filesystem::is_directory(dir))
    throw ValidationError("template directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  TemplateLibrary lib;
  for (const auto &f : files)
    lib.add(load_canonical_template(f, schema));
  return lib;
}

const CanonicalTemplate &TemplateLibrary::select(GarmentCategory category, const StyleVector &style) const {
  const CanonicalTemplate *best = nullptr;
  bool tie = false;
  for (const CanonicalTemplate &t : templates_) {
    if (t.category != category || !t.style_key.matches(style))
      continue;
    if (!best || t.style_key.specificity() > best->style_key.specificity()) {
      best = &t;
      tie = false;
    } else if (t.style_key.specificity() == best->style_key.specificity()) {
      tie = true;
    }
  }
  if (!best)
    throw ValidationError(fmt::format("no template for category/style {}/tuck={},closure={}", to_string(category),
                                      to_string(style.tuck), to_string(style.closure)));
  if (tie)
    throw ValidationError(fmt::format("ambiguous templates for category/style {}/tuck={},closure={}",
                                      to_string(category), to_string(style.tuck), to_string(style.closure)));
  return *best;
}

std::vector<std::string> TemplateLibrary::lint(const ControlPointSchema &schema) const {
  std::vector<std::string> problems;
  for (const CanonicalTemplate &t : templates_) {
    const PresenceMask allowed = schema.applicability(t.category);
    for (const PointDef &p : schema.points()) {
      const auto i = static_cast<std::size_t>(p.id);
      if (!t.points.present.test(i))
        continue;
      if (!allowed.test(i))
        problems.push_back(fmt::format("{}: point \"{}\" is present but not applicable to {}", t.name, p.name,
                                       to_string(t.category)));
      if (!t.anchor_for(p.name))
        problems.push_back(fmt::format("{}: point \"{}\" has no anchor rule", t.name, p.name));
    }
    for (const AnchorRule &r : t.anchors) {
      const auto usable = std::count_if(r.joints.begin(), r.joints.end(), [&](Joint j) { return t.reference.has(j); });
      if (usable < 2)
        problems.push_back(fmt::format("{}: anchor \"{}\" needs two joints present in the reference pose", t.name,
                                       r.pattern));
    }
  }

  // Tuck variants of one category may only differ in tuck-controlled groups.
  for (std::size_t a = 0; a < templates_.size(); ++a)
    for (std::size_t b = a + 1; b < templates_.size(); ++b) {
      const auto &ta = templates_[a];
      const auto &tb = templates_[b];
      if (ta.category != tb.category || ta.style_key.closure != tb.style_key.closure ||
          ta.style_key.tuck == tb.style_key.tuck)
        continue;
      for (const PointDef &p : schema.points()) {
        if (tuck_group(p.group))
          continue;
        const auto i = static_cast<std::size_t>(p.id);
        if (ta.points.present.test(i) != tb.points.present.test(i) ||
            (ta.points.present.test(i) && ta.points.coords[i] != tb.points.coords[i]))
          problems.push_back(fmt::format("{} vs {}: tuck variants differ at non-tuck point \"{}\"", ta.name, tb.name,
                                         p.name));
      }
      if (ta.reference.joints != tb.reference.joints)
        problems.push_back(fmt::format("{} vs {}: tuck variants use different reference poses", ta.name, tb.name));
    }
  return problems;
}

ControlPointSet predict_control_points(const TemplateLibrary &library, const ControlPointSchema &schema,
                                       const GarmentMeta &garment, const BodyPose &pose, const StyleVector &style) {
  pose.validate();
  const CanonicalTemplate &tpl = library.select(garment.category, style);
  const BodyPose &ref = tpl.reference;

  auto fit_on = [&](std::span<const Joint> joints) -> std::optional<Similarity> {
    std::vector<Vec2> src, dst;
    for (Joint j : joints)
      if (ref.has(j) && pose.has(j)) {
        src.push_back(to_metric(ref.at(j), ref.canvas_aspect));
        dst.push_back(to_metric(pose.at(j), pose.canvas_aspect));
      }
    if (src.size() < 2)
      return std::nullopt;
    try {
      return fit_similarity(src, dst);
    } catch (const FitError &) {
      return std::nullopt;
    }
  };

  const auto core = fit_on(kCoreAnchors);
  if (!core)
    throw FitError(fmt::format("degenerate pose: core joints of garment \"{}\" cannot be fitted", garment.id));

  std::vector<Similarity> per_rule;
  per_rule.reserve(tpl.anchors.size());
  for (const AnchorRule &r : tpl.anchors)
    per_rule.push_back(fit_on(r.joints).value_or(*core));

  ControlPointSet out;
  out.schema_version = schema.version();
  out.present = tpl.points.present;
  out.style = style;
  for (const PointDef &p : schema.points()) {
    const auto i = static_cast<std::size_t>(p.id);
    const auto rule = tpl.anchor_for(p.name);
    const Similarity &sim = rule ? per_rule[*rule] : *core;
    out.coords[i] = from_metric(sim.apply(to_metric(tpl.points.coords[i], ref.canvas_aspect)), pose.canvas_aspect);
  }
  return out;
}

} // namespace drape
