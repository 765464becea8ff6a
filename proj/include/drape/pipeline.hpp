#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drape/asset.hpp"
#include "drape/edit_dsl.hpp"
#include "drape/layout.hpp"
#include "drape/pose_fit.hpp"
#include "drape/schema.hpp"
#include "drape/warp.hpp"

namespace drape {

/// Schema, canonical templates and named edit templates shared by renders.
class Engine {
public:
  Engine(const ControlPointSchema &schema, TemplateLibrary canonical, EditLibrary edits);
  /// Default schema, `<data>/templates` and `<data>/edits`.
  static Engine load(const std::filesystem::path &data_dir = DRAPE_DATA_DIR);

  const ControlPointSchema &schema() const { return *schema_; }
  const TemplateLibrary &canonical() const { return canonical_; }
  const EditLibrary &edits() const { return edits_; }

  ControlPointSet predict(const GarmentMeta &garment, const BodyPose &pose, const StyleVector &style) const;

private:
  const ControlPointSchema *schema_;
  TemplateLibrary canonical_;
  EditLibrary edits_;
};

struct OutfitGarment {
  std::filesystem::path source; // asset directory, for reports
  std::shared_ptr<const GarmentAsset> asset;
  StyleVector style;
  std::uint64_t asset_hash = 0; // content hash, for warp caching
};

/// Content hash of an asset's image, mask, points and metadata.
std::uint64_t asset_content_hash(const GarmentAsset &asset);
/// Wraps a loaded asset for an outfit.
OutfitGarment make_outfit_garment(std::shared_ptr<const GarmentAsset> asset, StyleVector style = {},
                                  std::filesystem::path source = {});

struct TemplateUse {
  EditTemplate tmpl;
  /// Restricts the template to one garment; otherwise every applicable garment.
  std::optional<std::size_t> garment;
};

struct CoordinationSettings {
  /// Skirts and dresses are checked against outerwear by default.
  CoordinationOptions options{0.0, {GarmentCategory::skirt, GarmentCategory::dress}};
  bool fix = true;
  double margin = 0.01;
};

/// A loaded outfit. Garments are innermost first.
struct OutfitSpec {
  CanvasSize canvas;
  BodyPose pose;
  std::optional<Image> person_image;
  std::optional<SemanticLayout> person_layout;
  std::vector<OutfitGarment> garments;
  std::vector<TemplateUse> templates;
  CoordinationSettings coordination;
  double lambda = 1e-3;
  int threads = 0;

  /// Outerwear may not sit below a top or dress. Throws ValidationError.
  void validate() const;
};

/// Reads an outfit document; relative paths resolve against `base_dir`.
/// Template names resolve against `template_dirs` and then the engine's library.
OutfitSpec parse_outfit_spec(const nlohmann::json &doc, const std::filesystem::path &base_dir, const Engine &engine);
OutfitSpec load_outfit_spec(const std::filesystem::path &path, const Engine &engine);

struct TemplateNote {
  std::string template_name;
  std::optional<std::size_t> garment;
  std::string note;
};

struct CoordinationReport {
  std::vector<Violation> found;
  std::vector<Violation> remaining;
  bool fixed = false;
};

/// Points after prediction, templates and coordination.
struct PreparedOutfit {
  std::vector<ControlPointSet> predicted;
  std::vector<ControlPointSet> points;
  std::vector<std::vector<EditReport>> edits; // per garment
  std::vector<TemplateNote> notes;
  CoordinationReport coordination;
};

/// Memo of warped garments keyed on asset, points, style and canvas.
class WarpCache {
public:
  explicit WarpCache(std::size_t capacity = 64) : capacity_(capacity) {}
  std::shared_ptr<const WarpedGarment> find(std::uint64_t key) const;
  void put(std::uint64_t key, std::shared_ptr<const WarpedGarment> value);
  std::size_t size() const;
  std::size_t hits() const { return hits_; }

private:
  mutable std::mutex mutex_;
  std::map<std::uint64_t, std::shared_ptr<const WarpedGarment>> entries_;
  std::vector<std::uint64_t> order_;
  std::size_t capacity_;
  mutable std::size_t hits_ = 0;
};

struct GarmentRender {
  std::string id;
  GarmentCategory category = GarmentCategory::top;
  std::shared_ptr<const WarpedGarment> warped;
  /// Final layout re-rasterized without this garment.
  SemanticLayout layout_without;
  bool split = false;
};

struct RenderResult {
  Image draft;
  SemanticLayout layout;
  Image occluded_person;
  SemanticLayout occluded_layout;
  std::vector<GarmentRender> garments;
  PreparedOutfit prepared;
};

/// Stages 1-3: predict every garment, apply templates, coordinate.
PreparedOutfit prepare_outfit(const OutfitSpec &spec, const Engine &engine);

/// Applies one template use on top of prepared points, in place.
void apply_template_use(const TemplateUse &use, const OutfitSpec &spec, const Engine &engine, PreparedOutfit &state);

/// Checks the outfit's coordination and, when enabled, fixes it in place.
void coordinate_outfit(const OutfitSpec &spec, PreparedOutfit &state);

/// Stages 4-7 from fixed points: warp, occlude, composite, layout.
RenderResult render_prepared(const OutfitSpec &spec, const Engine &engine, PreparedOutfit prepared,
                             WarpCache *cache = nullptr);

RenderResult render_outfit(const OutfitSpec &spec, const Engine &engine, WarpCache *cache = nullptr);

/// Frames k = 1..steps of P0 + (k/steps)(P1 - P0), where P1 adds `tmpl`
/// to the outfit. The last frame's points equal P1 exactly.
std::vector<RenderResult> interpolate(const OutfitSpec &spec, const Engine &engine, const EditTemplate &tmpl,
                                      int steps, WarpCache *cache = nullptr);

/// Point set between two endpoints; presence is shared presence except at the ends.
ControlPointSet lerp_points(const ControlPointSet &p0, const ControlPointSet &p1, double t);

struct BatchItem {
  std::string garment;
  std::optional<RenderResult> result;
  std::string skipped; // reason when not rendered
  std::string error;
};

/// Renders each catalog garment alone on `pose` with `tmpl`. Inapplicable
/// garments are skipped; per-item errors are collected, never thrown.
std::vector<BatchItem> batch_apply(const std::vector<std::shared_ptr<const GarmentAsset>> &catalog,
                                   const EditTemplate &tmpl, const BodyPose &pose, CanvasSize canvas,
                                   const Engine &engine, double lambda = 1e-3, int threads = 0);

nlohmann::json report_json(const RenderResult &result, const OutfitSpec &spec, const ControlPointSchema &schema);
nlohmann::json edit_report_json(const EditReport &report, const ControlPointSchema &schema);
nlohmann::json points_json(const std::vector<ControlPointSet> &points, const OutfitSpec &spec,
                           const ControlPointSchema &schema);

/// draft.png, layout.png (+ class table), occluded.png, points_pre.json,
/// points_post.json, report.json and one layout_without_<i>.png per garment.
void write_render(const RenderResult &result, const OutfitSpec &spec, const ControlPointSchema &schema,
                  const std::filesystem::path &dir);

} // namespace drape
