#include "drape/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "drape/error.hpp"
#include "drape/hash.hpp"
#include "drape/io.hpp"

namespace drape {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Re-throws the active exception with `where` prefixed, keeping its type.
[[noreturn]] void rethrow_in(const std::string &where) {
  try {
    throw;
  } catch (const DslError &e) {
    throw DslError(where, e);
  } catch (const EditError &e) {
    throw EditError(fmt::format("{}: {}", where, e.what()));
  } catch (const SchemaError &e) {
    throw SchemaError(fmt::format("{}: {}", where, e.what()));
  } catch (const ValidationError &e) {
    throw ValidationError(fmt::format("{}: {}", where, e.what()));
  } catch (const FitError &e) {
    throw FitError(fmt::format("{}: {}", where, e.what()));
  } catch (const RenderError &e) {
    throw RenderError(fmt::format("{}: {}", where, e.what()));
  } catch (const Error &e) {
    throw Error(fmt::format("{}: {}", where, e.what()));
  }
}

std::string stage(const OutfitSpec &spec, std::size_t i, std::string_view name) {
  return fmt::format("garment {} \"{}\" ({})", i, spec.garments[i].asset->meta.id, name);
}

} // namespace

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(const ControlPointSchema &schema, TemplateLibrary canonical, EditLibrary edits)
    : schema_(&schema), canonical_(std::move(canonical)), edits_(std::move(edits)) {
  const auto problems = canonical_.lint(schema);
  if (!problems.empty())
    throw ValidationError(fmt::format("canonical templates: {}", fmt::join(problems, "; ")));
}

Engine Engine::load(const fs::path &data_dir) {
  const ControlPointSchema &schema = default_schema();
  TemplateLibrary canonical = TemplateLibrary::load_dir(data_dir / "templates", schema);
  EditLibrary edits;
  if (fs::is_directory(data_dir / "edits"))
    edits.load_dir(data_dir / "edits", schema);
  return Engine(schema, std::move(canonical), std::move(edits));
}

ControlPointSet Engine::predict(const GarmentMeta &garment, const BodyPose &pose, const StyleVector &style) const {
  return predict_control_points(canonical_, *schema_, garment, pose, style);
}

// ---------------------------------------------------------------------------
// Outfit specs

std::uint64_t asset_content_hash(const GarmentAsset &asset) {
  Fnv1a h;
  h.str(asset.meta.id);
  h.value(asset.meta.category);
  h.value(asset.image.width());
  h.value(asset.image.height());
  h.bytes(asset.image.pixels().data(), asset.image.pixels().size_bytes());
  h.bytes(asset.mask.pixels().data(), asset.mask.pixels().size_bytes());
  for (std::size_t i = 0; i < kPointCount; ++i) {
    h.value(asset.source_points.present.test(i));
    h.value(asset.source_points.coords[i]);
  }
  for (Vec2 p : asset.split_polyline)
    h.value(p);
  return h.digest();
}

OutfitGarment make_outfit_garment(std::shared_ptr<const GarmentAsset> asset, StyleVector style, fs::path source) {
  OutfitGarment g;
  g.asset_hash = asset_content_hash(*asset);
  g.asset = std::move(asset);
  g.style = style;
  g.source = std::move(source);
  return g;
}

void OutfitSpec::validate() const {
  if (canvas.width <= 0 || canvas.height <= 0)
    throw ValidationError("outfit canvas must be non-empty");
  if (garments.empty())
    throw ValidationError("outfit has no garments");
  if (person_image && size_of(*person_image) != canvas)
    throw ValidationError(fmt::format("person image is {}x{}, canvas is {}x{}", person_image->width(),
                                      person_image->height(), canvas.width, canvas.height));
  if (person_layout && person_layout->size() != canvas)
    throw ValidationError("person layout size differs from the canvas");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ValidationError("lambda must be a finite non-negative number");
  pose.validate();
  const double aspect = static_cast<double>(canvas.width) / canvas.height;
  if (std::abs(pose.canvas_aspect - aspect) > 1e-3)
    throw ValidationError(fmt::format("pose canvas_aspect {} does not match the canvas {}x{}", pose.canvas_aspect,
                                      canvas.width, canvas.height));
  for (std::size_t i = 0; i < garments.size(); ++i) {
    if (!garments[i].asset)
      throw ValidationError(fmt::format("garment {} has no asset", i));
    if (garments[i].asset->meta.category != GarmentCategory::outerwear)
      continue;
    for (std::size_t j = i + 1; j < garments.size(); ++j) {
      const auto c = garments[j].asset->meta.category;
      if (c == GarmentCategory::top || c == GarmentCategory::dress)
        throw ValidationError(fmt::format("layering: outerwear \"{}\" is below {} \"{}\"", garments[i].asset->meta.id,
                                          to_string(c), garments[j].asset->meta.id));
    }
  }
  for (const TemplateUse &t : templates)
    if (t.garment && *t.garment >= garments.size())
      throw ValidationError(fmt::format("template \"{}\" targets garment {}, outfit has {}", t.tmpl.name, *t.garment,
                                        garments.size()));
}

namespace {

const std::set<std::string> kSpecKeys = {"canvas",    "person",  "garments", "templates",
                                          "template_dirs", "lambda", "coordination", "threads"};

fs::path resolve(const fs::path &base, const std::string &p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

BodyPose read_pose(const json &j, const fs::path &base) {
  if (j.is_string())
    return io::pose_from_json(io::read_json(resolve(base, j.get<std::string>())));
  return io::pose_from_json(j);
}

} // namespace

OutfitSpec parse_outfit_spec(const json &doc, const fs::path &base_dir, const Engine &engine) {
  const ControlPointSchema &schema = engine.schema();
  OutfitSpec spec;
  try {
    if (!doc.is_object())
      throw ValidationError("outfit spec must be a JSON object");
    for (const auto &[key, value] : doc.items())
      if (!kSpecKeys.contains(key))
        throw ValidationError(fmt::format("unknown outfit field \"{}\"", key));

    const json &person = doc.at("person");
    if (!person.is_object())
      throw ValidationError("\"person\" must be an object");
    spec.pose = read_pose(person.at("pose"), base_dir);
    if (person.contains("image"))
      spec.person_image = read_png(resolve(base_dir, person.at("image").get<std::string>()));
    if (person.contains("layout"))
      spec.person_layout = read_layout(resolve(base_dir, person.at("layout").get<std::string>()));

    if (doc.contains("canvas")) {
      spec.canvas = {doc["canvas"].at("width").get<int>(), doc["canvas"].at("height").get<int>()};
    } else if (spec.person_image) {
      spec.canvas = size_of(*spec.person_image);
    } else {
      throw ValidationError("outfit needs \"canvas\" or a person image");
    }

    const json &garments = doc.at("garments");
    if (!garments.is_array())
      throw ValidationError("\"garments\" must be an array");
    for (const json &g : garments) {
      const json entry = g.is_string() ? json{{"asset", g}} : g;
      const fs::path dir = resolve(base_dir, entry.at("asset").get<std::string>());
      auto asset = std::make_shared<const GarmentAsset>(load_asset(dir, schema));
      StyleVector style = io::style_from_json(entry.value("style", json()));
      spec.garments.push_back(make_outfit_garment(std::move(asset), style, dir));
    }

    EditLibrary local;
    for (const json &d : doc.value("template_dirs", json::array()))
      local.load_dir(resolve(base_dir, d.get<std::string>()), schema);
    auto lookup = [&](const std::string &name) -> const EditTemplate & {
      if (const auto *t = local.find(name))
        return *t;
      return engine.edits().get(name);
    };
    for (const json &t : doc.value("templates", json::array())) {
      TemplateUse use;
      if (t.is_string()) {
        use.tmpl = lookup(t.get<std::string>());
      } else if (t.is_object()) {
        if (t.contains("source"))
          use.tmpl = parse_template(t.at("source").get<std::string>(), schema);
        else
          use.tmpl = lookup(t.at("name").get<std::string>());
        if (t.contains("garment"))
          use.garment = t.at("garment").get<std::size_t>();
      } else {
        throw ValidationError("template entries are names or objects");
      }
      spec.templates.push_back(std::move(use));
    }

    spec.lambda = doc.value("lambda", 1e-3);
    spec.threads = doc.value("threads", 0);
    if (spec.threads < 0)
      throw ValidationError("threads must be >= 0");

    if (doc.contains("coordination")) {
      const json &c = doc["coordination"];
      spec.coordination.options.tolerance = c.value("tolerance", 0.0);
      spec.coordination.margin = c.value("margin", 0.01);
      spec.coordination.fix = c.value("fix", true);
      if (c.contains("inner_categories")) {
        spec.coordination.options.inner_categories.clear();
        for (const json &name : c["inner_categories"]) {
          const auto cat = parse_category(name.get<std::string>());
          if (!cat)
            throw ValidationError(fmt::format("unknown category \"{}\" in coordination", name.get<std::string>()));
          spec.coordination.options.inner_categories.push_back(*cat);
        }
      }
    }
  } catch (const json::exception &e) {
    throw ValidationError(fmt::format("malformed outfit spec: {}", e.what()));
  }
  spec.validate();
  return spec;
}

OutfitSpec load_outfit_spec(const fs::path &path, const Engine &engine) {
  try {
    return parse_outfit_spec(io::read_json(path), path.parent_path(), engine);
  } catch (const Error &) {
    rethrow_in(path.string());
  }
}

// ---------------------------------------------------------------------------
// Points stages

void apply_template_use(const TemplateUse &use, const OutfitSpec &spec, const Engine &engine, PreparedOutfit &state) {
  const EditTemplate &t = use.tmpl;
  std::vector<std::size_t> targets;
  if (use.garment) {
    const GarmentMeta &meta = spec.garments[*use.garment].asset->meta;
    if (!applicable(t, meta))
      throw EditError(fmt::format("template \"{}\" ({}) does not apply to garment {} \"{}\"", t.name,
                                  print_selector(t.selector), *use.garment, meta.id));
    targets.push_back(*use.garment);
  } else {
    for (std::size_t i = 0; i < spec.garments.size(); ++i)
      if (applicable(t, spec.garments[i].asset->meta))
        targets.push_back(i);
    if (targets.empty())
      state.notes.push_back({t.name, std::nullopt, "matched no garment"});
  }

  for (std::size_t i : targets) {
    const GarmentMeta &meta = spec.garments[i].asset->meta;
    try {
      std::optional<OtherGarment> other;
      if (t.required_other) {
        std::optional<std::size_t> best;
        bool tie = false;
        for (std::size_t j = 0; j < spec.garments.size(); ++j) {
          if (j == i || !t.required_other->matches(spec.garments[j].asset->meta))
            continue;
          const auto dist = [&](std::size_t k) { return k > i ? k - i : i - k; };
          if (!best || dist(j) < dist(*best)) {
            best = j;
            tie = false;
          } else if (dist(j) == dist(*best)) {
            tie = true;
          }
        }
        if (!best) {
          state.notes.push_back(
              {t.name, i, fmt::format("skipped: no garment matches require other({})", print_selector(*t.required_other))});
          continue;
        }
        if (tie)
          throw EditError(fmt::format("template \"{}\": two garments equally near match require other({})", t.name,
                                      print_selector(*t.required_other)));
        other = OtherGarment{&state.points[*best], &spec.garments[*best].asset->meta};
      }
      EditContext ctx;
      ctx.schema = &engine.schema();
      ctx.body_height = spec.pose.body_height();
      ctx.repredict = [&](const StyleVector &s) { return engine.predict(meta, spec.pose, s); };
      EditResult r = apply_template(t, state.points[i], meta, other, ctx);
      state.points[i] = std::move(r.points);
      state.edits[i].push_back(std::move(r.report));
    } catch (const Error &) {
      rethrow_in(stage(spec, i, "template " + t.name));
    }
  }
}

void coordinate_outfit(const OutfitSpec &spec, PreparedOutfit &state) {
  const std::size_t n = spec.garments.size();
  state.coordination = {};
  std::vector<OutfitItem> items;
  for (std::size_t i = 0; i < n; ++i)
    items.push_back({state.points[i], spec.garments[i].asset->meta});
  try {
    state.coordination.found = check_coordination(items, spec.coordination.options);
    if (spec.coordination.fix && !state.coordination.found.empty()) {
      items = fix_coordination(items, state.coordination.found, spec.coordination.margin);
      for (std::size_t i = 0; i < n; ++i)
        state.points[i] = items[i].points;
      state.coordination.fixed = true;
      state.coordination.remaining = check_coordination(items, spec.coordination.options);
    } else {
      state.coordination.remaining = state.coordination.found;
    }
  } catch (const Error &) {
    rethrow_in("coordination");
  }
}

PreparedOutfit prepare_outfit(const OutfitSpec &spec, const Engine &engine) {
  spec.validate();
  PreparedOutfit state;
  const std::size_t n = spec.garments.size();
  state.predicted.resize(n);
  state.edits.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      state.predicted[i] = engine.predict(spec.garments[i].asset->meta, spec.pose, spec.garments[i].style);
    } catch (const Error &) {
      rethrow_in(stage(spec, i, "predict"));
    }
  }
  state.points = state.predicted;

  for (const TemplateUse &use : spec.templates)
    apply_template_use(use, spec, engine, state);

  coordinate_outfit(spec, state);
  return state;
}

// ---------------------------------------------------------------------------
// Rendering

std::shared_ptr<const WarpedGarment> WarpCache::find(std::uint64_t key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end())
    return nullptr;
  ++hits_;
  return it->second;
}

void WarpCache::put(std::uint64_t key, std::shared_ptr<const WarpedGarment> value) {
  std::lock_guard lock(mutex_);
  if (entries_.contains(key))
    return;
  entries_.emplace(key, std::move(value));
  order_.push_back(key);
  while (order_.size() > capacity_) {
    entries_.erase(order_.front());
    order_.erase(order_.begin());
  }
}

std::size_t WarpCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

namespace {

bool splits(const OutfitGarment &g, const ControlPointSet &points) {
  return g.asset->meta.category == GarmentCategory::outerwear && points.style.closure == Closure::open;
}

std::uint64_t warp_key(const OutfitSpec &spec, std::size_t i, const ControlPointSet &points) {
  Fnv1a h;
  h.value(spec.garments[i].asset_hash);
  h.value(spec.canvas.width);
  h.value(spec.canvas.height);
  h.value(spec.lambda);
  h.value(splits(spec.garments[i], points));
  for (std::size_t k = 0; k < kPointCount; ++k) {
    const bool present = points.present.test(k);
    h.value(present);
    if (present)
      h.value(points.coords[k]);
  }
  return h.digest();
}

WarpedGarment warp_one(const OutfitSpec &spec, const Engine &engine, std::size_t i, const ControlPointSet &points) {
  const GarmentAsset &asset = *spec.garments[i].asset;
  const WarpOptions options{spec.lambda, spec.threads};
  if (!splits(spec.garments[i], points))
    return warp_image(asset, points, spec.canvas, options);
  const auto [left, right] = split_garment(asset, engine.schema());
  return merge_warped(warp_image(left, points, spec.canvas, options), warp_image(right, points, spec.canvas, options));
}

} // namespace

RenderResult render_prepared(const OutfitSpec &spec, const Engine &engine, PreparedOutfit prepared, WarpCache *cache) {
  spec.validate();
  const std::size_t n = spec.garments.size();
  if (prepared.points.size() != n)
    throw ValidationError(fmt::format("{} point sets for {} garments", prepared.points.size(), n));

  RenderResult out;
  out.garments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    GarmentRender &g = out.garments[i];
    g.id = spec.garments[i].asset->meta.id;
    g.category = spec.garments[i].asset->meta.category;
    g.split = splits(spec.garments[i], prepared.points[i]);
    const std::uint64_t key = warp_key(spec, i, prepared.points[i]);
    if (cache)
      g.warped = cache->find(key);
    if (!g.warped) {
      try {
        g.warped = std::make_shared<const WarpedGarment>(warp_one(spec, engine, i, prepared.points[i]));
      } catch (const Error &) {
        rethrow_in(stage(spec, i, "warp"));
      }
      if (cache)
        cache->put(key, g.warped);
    }
  }

  // Occluded person b_o: every garment's region and connected skin cleared.
  out.occluded_layout = spec.person_layout ? *spec.person_layout : SemanticLayout(spec.canvas);
  for (const OutfitGarment &g : spec.garments)
    out.occluded_layout = occlude(out.occluded_layout, g.asset->meta.category);
  out.occluded_person = spec.person_image ? *spec.person_image : Image(spec.canvas.width, spec.canvas.height);
  if (spec.person_image && spec.person_layout)
    for (int y = 0; y < spec.canvas.height; ++y)
      for (int x = 0; x < spec.canvas.width; ++x)
        if (out.occluded_layout.at(x, y) != spec.person_layout->at(x, y))
          out.occluded_person(x, y) = Rgba{};

  out.draft = out.occluded_person;
  std::vector<LayeredGarment> layers;
  for (const GarmentRender &g : out.garments) {
    composite_over(out.draft, g.warped->image);
    layers.push_back({&g.warped->mask, g.category});
  }
  out.layout = rasterize_layout(out.occluded_layout, layers);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<LayeredGarment> others;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i)
        others.push_back(layers[j]);
    out.garments[i].layout_without = rasterize_layout(out.occluded_layout, others);
  }
  out.prepared = std::move(prepared);
  return out;
}

RenderResult render_outfit(const OutfitSpec &spec, const Engine &engine, WarpCache *cache) {
  return render_prepared(spec, engine, prepare_outfit(spec, engine), cache);
}

ControlPointSet lerp_points(const ControlPointSet &p0, const ControlPointSet &p1, double t) {
  if (t <= 0.0)
    return p0;
  if (t >= 1.0)
    return p1;
  if (p0.style != p1.style)
    throw ValidationError("cannot interpolate between point sets with different styles");
  ControlPointSet out = p0;
  out.present = p0.present & p1.present;
  for (std::size_t i = 0; i < kPointCount; ++i)
    if (out.present.test(i))
      out.coords[i] = p0.coords[i] + t * (p1.coords[i] - p0.coords[i]);
  return out;
}

std::vector<RenderResult> interpolate(const OutfitSpec &spec, const Engine &engine, const EditTemplate &tmpl,
                                      int steps, WarpCache *cache) {
  if (steps < 1)
    throw ValidationError("interpolation needs at least one step");
  const PreparedOutfit start = prepare_outfit(spec, engine);
  PreparedOutfit end = start;
  apply_template_use({tmpl, std::nullopt}, spec, engine, end);
  for (std::size_t i = 0; i < spec.garments.size(); ++i)
    if (start.points[i].style != end.points[i].style)
      throw ValidationError(
          fmt::format("template \"{}\" changes the style of \"{}\"; discrete styles cannot be interpolated",
                      tmpl.name, spec.garments[i].asset->meta.id));

  std::vector<RenderResult> frames;
  for (int k = 1; k <= steps; ++k) {
    PreparedOutfit frame = end;
    const double t = static_cast<double>(k) / steps;
    for (std::size_t i = 0; i < spec.garments.size(); ++i)
      frame.points[i] = k == steps ? end.points[i] : lerp_points(start.points[i], end.points[i], t);
    frames.push_back(render_prepared(spec, engine, std::move(frame), cache));
  }
  return frames;
}

std::vector<BatchItem> batch_apply(const std::vector<std::shared_ptr<const GarmentAsset>> &catalog,
                                   const EditTemplate &tmpl, const BodyPose &pose, CanvasSize canvas,
                                   const Engine &engine, double lambda, int threads) {
  std::vector<BatchItem> items;
  for (const auto &asset : catalog) {
    BatchItem item;
    item.garment = asset->meta.id;
    if (!applicable(tmpl, asset->meta)) {
      item.skipped = fmt::format("selector {} does not match", print_selector(tmpl.selector));
      items.push_back(std::move(item));
      continue;
    }
    try {
      OutfitSpec spec;
      spec.canvas = canvas;
      spec.pose = pose;
      spec.lambda = lambda;
      spec.threads = threads;
      spec.garments.push_back(make_outfit_garment(asset));
      spec.templates.push_back({tmpl, std::size_t{0}});
      item.result = render_outfit(spec, engine);
      for (const TemplateNote &note : item.result->prepared.notes)
        item.skipped = note.note;
    } catch (const Error &e) {
      item.error = e.what();
    }
    items.push_back(std::move(item));
  }
  return items;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json vec_json(Vec2 p) { return json::array({p.x, p.y}); }

json violation_json(const Violation &v, const OutfitSpec &spec, const ControlPointSchema &schema) {
  return {{"inner", spec.garments[v.inner].asset->meta.id},
          {"outer", spec.garments[v.outer].asset->meta.id},
          {"point", schema.point(v.point_id).name},
          {"position", vec_json(v.position)},
          {"distance", v.distance}};
}

} // namespace

json edit_report_json(const EditReport &report, const ControlPointSchema &schema) {
  json statements = json::array();
  for (const StatementOutcome &s : report.statements)
    statements.push_back({{"index", s.index}, {"text", s.text}, {"applied", s.applied}, {"reason", s.reason}});
  json moves = json::array();
  for (const PointMove &m : report.moves)
    moves.push_back({{"point", schema.point(m.id).name},
                     {"before", vec_json(m.before)},
                     {"after", vec_json(m.after)},
                     {"statement", m.statement}});
  auto names = [&](const std::vector<int> &ids) {
    json a = json::array();
    for (int id : ids)
      a.push_back(schema.point(id).name);
    return a;
  };
  return {{"template", report.template_name}, {"garment", report.garment},   {"repredicted", report.repredicted},
          {"statements", statements},         {"moves", moves},              {"disabled", names(report.disabled)},
          {"enabled", names(report.enabled)}, {"conflicts", report.conflicts}};
}

json points_json(const std::vector<ControlPointSet> &points, const OutfitSpec &spec, const ControlPointSchema &schema) {
  json garments = json::array();
  for (std::size_t i = 0; i < points.size(); ++i)
    garments.push_back({{"id", spec.garments[i].asset->meta.id}, {"points", io::to_json(points[i], schema)}});
  return {{"schema_version", schema.version()}, {"garments", garments}};
}

json report_json(const RenderResult &result, const OutfitSpec &spec, const ControlPointSchema &schema) {
  const PreparedOutfit &p = result.prepared;
  json garments = json::array();
  for (std::size_t i = 0; i < spec.garments.size(); ++i) {
    json edits = json::array();
    for (const EditReport &r : p.edits[i])
      edits.push_back(edit_report_json(r, schema));
    garments.push_back({{"id", spec.garments[i].asset->meta.id},
                        {"category", std::string(to_string(spec.garments[i].asset->meta.category))},
                        {"asset", spec.garments[i].source.string()},
                        {"style", io::to_json(p.points[i].style)},
                        {"split", result.garments[i].split},
                        {"edits", edits}});
  }
  json notes = json::array();
  for (const TemplateNote &n : p.notes) {
    json j = {{"template", n.template_name}, {"note", n.note}};
    if (n.garment)
      j["garment"] = spec.garments[*n.garment].asset->meta.id;
    notes.push_back(j);
  }
  json found = json::array(), remaining = json::array();
  for (const Violation &v : p.coordination.found)
    found.push_back(violation_json(v, spec, schema));
  for (const Violation &v : p.coordination.remaining)
    remaining.push_back(violation_json(v, spec, schema));
  return {{"schema_version", schema.version()},
          {"layout_classes", std::string(kLayoutClassTableVersion)},
          {"canvas", {{"width", spec.canvas.width}, {"height", spec.canvas.height}}},
          {"garments", garments},
          {"template_notes", notes},
          {"coordination", {{"found", found}, {"fixed", p.coordination.fixed}, {"remaining", remaining}}}};
}

void write_render(const RenderResult &result, const OutfitSpec &spec, const ControlPointSchema &schema,
                  const fs::path &dir) {
  fs::create_directories(dir);
  write_png(dir / "draft.png", result.draft);
  write_png(dir / "occluded.png", result.occluded_person);
  write_layout(dir / "layout.png", result.layout);
  for (std::size_t i = 0; i < result.garments.size(); ++i)
    write_layout(dir / fmt::format("layout_without_{}.png", i), result.garments[i].layout_without);
  io::write_text(dir / "points_pre.json", points_json(result.prepared.predicted, spec, schema).dump(2) + "\n");
  io::write_text(dir / "points_post.json", points_json(result.prepared.points, spec, schema).dump(2) + "\n");
  io::write_text(dir / "report.json", report_json(result, spec, schema).dump(2) + "\n");
}

} // namespace drape
