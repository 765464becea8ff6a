#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "drape/asset.hpp"
#include "drape/edit_dsl.hpp"
#include "drape/error.hpp"
#include "drape/io.hpp"
#include "drape/layout.hpp"
#include "drape/pipeline.hpp"
#include "drape/service.hpp"

namespace fs = std::filesystem;
using namespace drape;
using nlohmann::json;

namespace {

constexpr int kValidationExit = 2;
constexpr int kRenderExit = 3;

struct Options {
  fs::path data = DRAPE_DATA_DIR;

  fs::path outfit;
  fs::path out;
  int threads = -1;

  fs::path asset;
  fs::path pose;
  std::vector<std::string> style;

  std::vector<fs::path> drape_files;

  std::string tmpl;
  fs::path catalog;
  std::string canvas;
  double lambda = 1e-3;

  fs::path layout;
  fs::path points;
  double closure_min_area = ClosureThresholds{}.min_area_fraction;

  int steps = 5;

  ServiceConfig service;
};

void print_json(const json &j) { std::cout << j.dump(2) << "\n"; }

CanvasSize parse_canvas(const std::string &text, double aspect) {
  if (text.empty())
    return {static_cast<int>(std::lround(768 * aspect)), 768};
  const auto x = text.find('x');
  if (x == std::string::npos)
    throw ValidationError(fmt::format("canvas \"{}\" is not WIDTHxHEIGHT", text));
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception &) {
    throw ValidationError(fmt::format("canvas \"{}\" is not WIDTHxHEIGHT", text));
  }
}

// A template argument is either a library name or a path to a .drape file.
EditTemplate resolve_template(const std::string &arg, const Engine &engine) {
  if (fs::path(arg).extension() == ".drape") {
    EditLibrary lib;
    lib.load_file(arg, engine.schema());
    if (lib.size() != 1)
      throw ValidationError(fmt::format("{}: expected exactly one template, found {}", arg, lib.size()));
    return lib.get(lib.names().front());
  }
  return engine.edits().get(arg);
}

void override_threads(OutfitSpec &spec, int threads) {
  if (threads >= 0)
    spec.threads = threads;
}

int cmd_render(const Options &o) {
  const auto start = std::chrono::steady_clock::now();
  const Engine engine = Engine::load(o.data);
  OutfitSpec spec = load_outfit_spec(o.outfit, engine);
  override_threads(spec, o.threads);
  const RenderResult result = render_outfit(spec, engine);
  write_render(result, spec, engine.schema(), o.out);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::cout << fmt::format("rendered {} garments at {}x{} into {} ({:.0f} ms)\n", spec.garments.size(),
                           spec.canvas.width, spec.canvas.height, o.out.string(), ms);
  for (const TemplateNote &n : result.prepared.notes)
    std::cout << fmt::format("note: template {}: {}\n", n.template_name, n.note);
  if (!result.prepared.coordination.found.empty())
    std::cout << fmt::format("coordination: {} violations, {} remaining\n", result.prepared.coordination.found.size(),
                             result.prepared.coordination.remaining.size());
  return 0;
}

int cmd_points_predict(const Options &o) {
  const Engine engine = Engine::load(o.data);
  const GarmentAsset asset = load_asset(o.asset, engine.schema());
  const BodyPose pose = io::pose_from_json(io::read_json(o.pose));
  StyleVector style;
  for (const std::string &kv : o.style) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ValidationError(fmt::format("style \"{}\" is not key=value", kv));
    style.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  const ControlPointSet points = engine.predict(asset.meta, pose, style);
  const json j = io::to_json(points, engine.schema());
  if (o.out.empty())
    print_json(j);
  else
    io::write_text(o.out, j.dump(2) + "\n");
  return 0;
}

int cmd_template_check(const Options &o) {
  const ControlPointSchema &schema = default_schema();
  int errors = 0;
  for (const fs::path &file : o.drape_files) {
    std::vector<EditTemplate> templates;
    try {
      templates = parse_templates_unchecked(io::read_text(file));
    } catch (const DslError &e) {
      std::cerr << fmt::format("{}:{}\n", file.string(), e.what());
      ++errors;
      continue;
    }
    for (const EditTemplate &t : templates) {
      const auto problems = lint_template(t, schema);
      for (const DslError &e : problems)
        std::cerr << fmt::format("{}:{}\n", file.string(), e.what());
      errors += static_cast<int>(problems.size());
      if (problems.empty())
        std::cout << fmt::format("{}: template \"{}\" ok ({} statements)\n", file.string(), t.name,
                                 t.statements.size());
    }
  }
  return errors == 0 ? 0 : kValidationExit;
}

int cmd_template_apply(const Options &o) {
  const Engine engine = Engine::load(o.data);
  const EditTemplate tmpl = resolve_template(o.tmpl, engine);
  const BodyPose pose = io::pose_from_json(io::read_json(o.pose));
  const CanvasSize canvas = parse_canvas(o.canvas, pose.canvas_aspect);

  std::vector<fs::path> dirs;
  for (const auto &entry : fs::directory_iterator(o.catalog))
    if (entry.is_directory() && fs::exists(entry.path() / "meta.json"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<std::shared_ptr<const GarmentAsset>> catalog;
  for (const fs::path &d : dirs)
    catalog.push_back(std::make_shared<const GarmentAsset>(load_asset(d, engine.schema())));

  const auto items = batch_apply(catalog, tmpl, pose, canvas, engine, o.lambda, std::max(o.threads, 0));
  json summary = json::array();
  int failed = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const BatchItem &item = items[i];
    json j = {{"garment", item.garment}};
    if (item.result) {
      j["rendered"] = true;
      const auto &points = item.result->prepared.points.front();
      j["style"] = io::to_json(points.style);
      if (!o.out.empty()) {
        const fs::path dir = o.out / item.garment;
        fs::create_directories(dir);
        write_png(dir / "draft.png", item.result->draft);
        write_layout(dir / "layout.png", item.result->layout);
        io::write_text(dir / "points.json", io::to_json(points, engine.schema()).dump(2) + "\n");
        json edits = json::array();
        for (const EditReport &r : item.result->prepared.edits.front())
          edits.push_back(edit_report_json(r, engine.schema()));
        io::write_text(dir / "edits.json", edits.dump(2) + "\n");
      }
    } else {
      j["rendered"] = false;
    }
    if (!item.skipped.empty())
      j["skipped"] = item.skipped;
    if (!item.error.empty()) {
      j["error"] = item.error;
      ++failed;
    }
    summary.push_back(j);
  }
  print_json({{"template", tmpl.name}, {"items", summary}});
  return failed == 0 ? 0 : kRenderExit;
}

int cmd_label(const Options &o) {
  const SemanticLayout layout = read_layout(o.layout);
  json j = json::object();
  if (layout.count(LayoutClass::outerwear) > 0) {
    ClosureThresholds thresholds;
    thresholds.min_area_fraction = o.closure_min_area;
    const StyleLabel closure = label_closure(layout, thresholds);
    j["closure"] = std::string(to_string(*closure.closure));
    j["closure_notes"] = closure.notes;
  } else {
    j["closure"] = nullptr;
    j["closure_notes"] = "no outerwear in layout";
  }
  if (!o.points.empty() != !o.pose.empty())
    throw ValidationError("--points and --pose go together");
  if (!o.points.empty()) {
    const ControlPointSchema &schema = default_schema();
    const ControlPointSet points = io::points_from_json(io::read_json(o.points), schema);
    const BodyPose pose = io::pose_from_json(io::read_json(o.pose));
    const StyleLabel tuck = label_tuck(points, pose, schema);
    j["tuck"] = std::string(to_string(*tuck.tuck));
    j["tuck_notes"] = tuck.notes;
  }
  print_json(j);
  return 0;
}

int cmd_interpolate(const Options &o) {
  const Engine engine = Engine::load(o.data);
  OutfitSpec spec = load_outfit_spec(o.outfit, engine);
  override_threads(spec, o.threads);
  const EditTemplate tmpl = resolve_template(o.tmpl, engine);
  WarpCache cache;
  const auto frames = interpolate(spec, engine, tmpl, o.steps, &cache);
  for (std::size_t k = 0; k < frames.size(); ++k)
    write_render(frames[k], spec, engine.schema(), o.out / fmt::format("frame_{:02}", k + 1));
  std::cout << fmt::format("wrote {} frames into {}\n", frames.size(), o.out.string());
  return 0;
}

int cmd_serve(const Options &o) {
  const Engine engine = Engine::load(o.data);
  ServiceConfig config = o.service;
  if (config.template_dir.empty())
    config.template_dir = o.data / "edits";
  SessionStore store(engine, config);
  Server server(store);
  std::cerr << fmt::format("drape: {} sessions restored, listening on {}\n", store.size(), config.listen);
  server.listen(config.listen);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"drape: garment drape engine"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--data", o.data, "data directory (templates, edits)")->envname("DRAPE_DATA");

  auto *render = app.add_subcommand("render", "render an outfit");
  render->add_option("--outfit", o.outfit, "outfit spec (JSON)")->required();
  render->add_option("--out", o.out, "output directory")->required();
  render->add_option("--threads", o.threads, "warp threads (0 = hardware)");

  auto *points = app.add_subcommand("points", "control point tools");
  points->require_subcommand(1);
  auto *predict = points->add_subcommand("predict", "predict on-body control points");
  predict->add_option("--asset", o.asset, "garment asset directory")->required();
  predict->add_option("--pose", o.pose, "pose JSON")->required();
  predict->add_option("--style", o.style, "style entry key=value");
  predict->add_option("--out", o.out, "write JSON here instead of stdout");

  auto *tmpl = app.add_subcommand("template", "edit template tools");
  tmpl->require_subcommand(1);
  auto *check = tmpl->add_subcommand("check", "parse and lint .drape files");
  check->add_option("files", o.drape_files, "template files")->required();
  auto *apply = tmpl->add_subcommand("apply", "apply a template to a catalog");
  apply->add_option("--template", o.tmpl, "template name or .drape file")->required();
  apply->add_option("--catalog", o.catalog, "directory of garment assets")->required();
  apply->add_option("--pose", o.pose, "pose JSON")->required();
  apply->add_option("--canvas", o.canvas, "WIDTHxHEIGHT (default from the pose aspect, 768 high)");
  apply->add_option("--out", o.out, "write per-garment renders here");
  apply->add_option("--lambda", o.lambda, "TPS smoothing");
  apply->add_option("--threads", o.threads, "warp threads (0 = hardware)");

  auto *label = app.add_subcommand("label", "label closure and tuck styles");
  label->add_option("--layout", o.layout, "layout PNG")->required();
  label->add_option("--points", o.points, "control points JSON, for tuck");
  label->add_option("--pose", o.pose, "pose JSON, for tuck");
  label->add_option("--closure-min-area", o.closure_min_area, "smallest open half, as a fraction of the canvas")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  auto *interp = app.add_subcommand("interpolate", "render frames towards a template");
  interp->add_option("--outfit", o.outfit, "outfit spec (JSON)")->required();
  interp->add_option("--template", o.tmpl, "template name or .drape file")->required();
  interp->add_option("--steps", o.steps, "frame count")->check(CLI::PositiveNumber);
  interp->add_option("--out", o.out, "output directory")->required();
  interp->add_option("--threads", o.threads, "warp threads (0 = hardware)");

  auto *serve = app.add_subcommand("serve", "run the HTTP editing service");
  serve->add_option("--listen", o.service.listen, "host:port")->envname("DRAPE_LISTEN");
  serve->add_option("--asset-root", o.service.asset_root, "base for outfit paths")->envname("DRAPE_ASSET_ROOT");
  serve->add_option("--template-dir", o.service.template_dir, "edit templates")->envname("DRAPE_TEMPLATE_DIR");
  serve->add_option("--snapshot-dir", o.service.snapshot_dir, "session snapshots")->envname("DRAPE_SNAPSHOT_DIR");
  serve->add_option("--snapshot-interval", o.service.snapshot_interval_ms, "milliseconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kValidationExit;
  }

  try {
    if (*render)
      return cmd_render(o);
    if (*predict)
      return cmd_points_predict(o);
    if (*check)
      return cmd_template_check(o);
    if (*apply)
      return cmd_template_apply(o);
    if (*label)
      return cmd_label(o);
    if (*interp)
      return cmd_interpolate(o);
    if (*serve)
      return cmd_serve(o);
  } catch (const ValidationError &e) {
    std::cerr << "drape: " << e.what() << "\n";
    return kValidationExit;
  } catch (const RenderError &e) {
    std::cerr << "drape: " << e.what() << "\n";
    return kRenderExit;
  } catch (const fs::filesystem_error &e) {
    std::cerr << "drape: " << e.what() << "\n";
    return kValidationExit;
  } catch (const std::exception &e) {
    std::cerr << "drape: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
