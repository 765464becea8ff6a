#include <doctest.h>

#include <filesystem>
#include <thread>

#include "drape/io.hpp"
#include "drape/service.hpp"
#include "fixtures.hpp"

// After Eigen: resolv.h defines _res.
#include <httplib.h>

using namespace drape;
using namespace drape::test;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Asset root with a pose and three small garments: pants, shirt, open jacket.
const fs::path &asset_root() {
  static const fs::path root = [] {
    const fs::path dir = scratch_dir("service-assets");
    Rng rng(80);
    save_asset(*garment(GarmentCategory::bottom, "pants", rng), dir / "pants", default_schema());
    save_asset(*garment(GarmentCategory::top, "shirt", rng), dir / "shirt", default_schema());
    save_asset(*garment(GarmentCategory::outerwear, "jacket", rng), dir / "jacket", default_schema());
    BodyPose pose = synthetic::reference_pose();
    pose.canvas_aspect = 128.0 / 192.0;
    io::write_text(dir / "pose.json", io::to_json(pose).dump());
    return dir;
  }();
  return root;
}

json spec_doc() {
  return {{"canvas", {{"width", 128}, {"height", 192}}},
          {"person", {{"pose", "pose.json"}}},
          {"garments", json::array({"pants", "shirt", {{"asset", "jacket"}, {"style", {{"closure", "open"}}}}})},
          {"threads", 1}};
}

ServiceConfig config(const fs::path &snapshots = {}) {
  ServiceConfig c;
  c.asset_root = asset_root();
  c.snapshot_dir = snapshots;
  c.snapshot_interval_ms = 60000;
  return c;
}

int status_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const HttpError &e) {
    return e.status();
  }
  return 200;
}

Vec2 point_of(const json &summary, std::size_t garment, const std::string &name) {
  for (const json &p : summary["garments"][garment]["points"]["points"])
    if (p["name"] == name)
      return {p["x"].get<double>(), p["y"].get<double>()};
  FAIL("no point " << name);
  return {};
}

json delta(const std::string &name, double dx, double dy) {
  return {{"deltas", json::array({{{"id", name}, {"dx", dx}, {"dy", dy}}})}};
}

} // namespace

TEST_CASE("sessions are created and fetched") {
  SessionStore store(engine(), config());
  const json s = store.create(spec_doc());
  CHECK(s["garments"].size() == 3);
  CHECK(s["history"] == 0);
  CHECK(s["canvas"]["width"] == 128);
  CHECK(s["render"] == "/renders/" + s["render_hash"].get<std::string>() + ".png");
  CHECK(store.get(s["id"]) == s);
  CHECK(store.size() == 1);
  CHECK(status_of([&] { store.get("abc123"); }) == 404);
}

TEST_CASE("bad session specs are rejected") {
  SessionStore store(engine(), config());
  CHECK(status_of([&] { store.create(json::array()); }) == 400);
  auto doc = spec_doc();
  doc["garments"] = json::array({"missing_asset"});
  CHECK(status_of([&] { store.create(doc); }) == 422);
  doc = spec_doc();
  doc["garments"][2]["style"]["closure"] = "ajar";
  CHECK(status_of([&] { store.create(doc); }) == 422);
  CHECK(store.size() == 0);
}

TEST_CASE("patches move points and undo restores them") {
  SessionStore store(engine(), config());
  const json s0 = store.create(spec_doc());
  const std::string id = s0["id"];
  const Vec2 p0 = point_of(s0, 2, "split_left_hem");

  const json s1 = store.patch_points(id, 2, delta("split_left_hem", -0.05, 0.01));
  CHECK(s1["history"] == 1);
  CHECK(point_of(s1, 2, "split_left_hem").x == p0.x - 0.05);
  CHECK(point_of(s1, 2, "split_left_hem").y == p0.y + 0.01);
  CHECK(s1["render_hash"] != s0["render_hash"]);
  CHECK(s1["garments"][0] == s0["garments"][0]);

  const json s2 = store.patch_points(
      id, 2, {{"set", json::array({{{"id", pid("split_right_hem")}, {"x", 0.7}, {"y", 0.6}}})}});
  CHECK(s2["history"] == 2);
  CHECK(point_of(s2, 2, "split_right_hem") == Vec2{0.7, 0.6});

  const json u1 = store.undo(id);
  CHECK(u1["garments"] == s1["garments"]);
  CHECK(u1["render_hash"] == s1["render_hash"]);
  const json u0 = store.undo(id);
  CHECK(u0["garments"] == s0["garments"]);
  CHECK(u0["render_hash"] == s0["render_hash"]);
  CHECK(u0["history"] == 0);
  CHECK(status_of([&] { store.undo(id); }) == 409);
}

TEST_CASE("empty patches are no-ops") {
  SessionStore store(engine(), config());
  const json s0 = store.create(spec_doc());
  const json s1 = store.patch_points(s0["id"], 1, {{"deltas", json::array()}});
  CHECK(s1["history"] == 0);
  CHECK(s1["render_hash"] == s0["render_hash"]);
  CHECK(s1["warnings"].empty());
}

TEST_CASE("patched coordinates are clamped to the canvas with warnings") {
  SessionStore store(engine(), config());
  const json s0 = store.create(spec_doc());
  const json s1 = store.patch_points(s0["id"], 1, {{"set", json::array({{{"id", "hem_center"}, {"x", 1.5}, {"y", -0.2}}})}});
  CHECK(point_of(s1, 1, "hem_center") == Vec2{1.0, 0.0});
  CHECK(s1["warnings"].size() == 2);
}

TEST_CASE("patch errors map to statuses and leave the session unchanged") {
  SessionStore store(engine(), config());
  const json s0 = store.create(spec_doc());
  const std::string id = s0["id"];
  CHECK(status_of([&] { store.patch_points(id, 9, delta("hem_center", 0, 0.1)); }) == 404);
  CHECK(status_of([&] { store.patch_points(id, 1, delta("zipper", 0, 0.1)); }) == 422);
  CHECK(status_of([&] { store.patch_points(id, 0, delta("split_left_hem", 0, 0.1)); }) == 422);
  CHECK(status_of([&] { store.patch_points(id, 1, {{"deltas", json::array({{{"id", true}}})}}); }) == 400);
  CHECK(status_of([&] {
          store.patch_points(id, 1, {{"deltas", json::array({{{"id", "hem_center"}, {"dx", "a"}, {"dy", 0}}})}});
        }) == 400);
  CHECK(status_of([&] { store.patch_points(id, 1, {{"move", json::array()}}); }) == 400);
  // A bad entry after a good one rolls the whole patch back.
  CHECK(status_of([&] {
          store.patch_points(id, 1,
                             {{"deltas", json::array({{{"id", "hem_center"}, {"dx", 0.1}, {"dy", 0}},
                                                      {{"id", "nope"}, {"dx", 0}, {"dy", 0}}})}});
        }) == 422);
  CHECK(store.get(id) == s0);
}

TEST_CASE("templates apply through the session") {
  SessionStore store(engine(), config());
  const json s0 = store.create(spec_doc());
  const std::string id = s0["id"];
  const json s1 = store.apply_template(id, "open_wide", json());
  CHECK(s1["history"] == 1);
  REQUIRE(s1["reports"].size() == 1);
  CHECK(s1["reports"][0]["index"] == 2);
  CHECK(point_of(s1, 2, "split_left_hem").x < point_of(s0, 2, "split_left_hem").x);
  CHECK(s1["garments"][1] == s0["garments"][1]);

  const json s2 = store.apply_template(id, "front_tuck", {{"garment", 1}});
  CHECK(point_of(s2, 1, "torso_center").y == point_of(s2, 0, "waistline_center").y);

  CHECK(status_of([&] { store.apply_template(id, "waist_up", json()); }) == 409);
  CHECK(status_of([&] { store.apply_template(id, "front_tuck", {{"garment", 0}}); }) == 409);
  CHECK(status_of([&] { store.apply_template(id, "no_such", json()); }) == 404);
  CHECK(status_of([&] { store.apply_template(id, "open", {{"garment", "x"}}); }) == 400);
  CHECK(store.get(id)["history"] == 2);

  CHECK(store.undo(id)["garments"] == s1["garments"]);
}

TEST_CASE("renders are content addressed") {
  SessionStore store(engine(), config());
  const json s0 = store.create(spec_doc());
  const PngBytes png = store.render_png(s0["id"]);
  REQUIRE(png);
  CHECK(png->size() > 8);
  CHECK((*png)[1] == 'P');
  CHECK(store.render_by_hash(s0["render_hash"]) == png);
  CHECK(store.layout_png(s0["id"]) == store.render_by_hash(s0["layout_hash"]));
  CHECK_FALSE(store.render_by_hash("0000"));
  const json again = store.create(spec_doc());
  CHECK(again["render_hash"] == s0["render_hash"]);
  CHECK(again["id"] != s0["id"]);
}

TEST_CASE("schema and template listings") {
  SessionStore store(engine(), config());
  CHECK(store.schema_json()["points"].size() == 49);
  const json ts = store.templates_json();
  CHECK(ts.size() == 7);
  bool found = false;
  for (const json &t : ts)
    if (t["name"] == "front_tuck") {
      found = true;
      CHECK(t["require"] == "category=bottom");
    }
  CHECK(found);
}

TEST_CASE("extra template directory") {
  const auto dir = scratch_dir("service-templates");
  io::write_text(dir / "lift.drape", "template \"lift\" for category=bottom { offset points(leg_*_ankle_*) by (0, -0.05); }\n");
  ServiceConfig c = config();
  c.template_dir = dir;
  SessionStore store(engine(), c);
  CHECK(store.templates_json().size() == 8);
  const json s0 = store.create(spec_doc());
  const json s1 = store.apply_template(s0["id"], "lift", json());
  CHECK(point_of(s1, 0, "leg_left_ankle_outer").y ==
        doctest::Approx(point_of(s0, 0, "leg_left_ankle_outer").y - 0.05).epsilon(1e-12));
  fs::remove_all(dir);
}

TEST_CASE("snapshots restore sessions by replaying their history") {
  const auto dir = scratch_dir("snapshots");
  json before;
  {
    SessionStore store(engine(), config(dir));
    const json s = store.create(spec_doc());
    store.patch_points(s["id"], 2, delta("split_left_chest", -0.02, 0));
    before = store.apply_template(s["id"], "front_tuck", json());
    store.flush_snapshots();
    CHECK(fs::exists(dir / (s["id"].get<std::string>() + ".json")));
  }
  {
    SessionStore restored(engine(), config(dir));
    REQUIRE(restored.size() == 1);
    const json after = restored.get(before["id"]);
    CHECK(after["garments"] == before["garments"]);
    CHECK(after["history"] == before["history"]);
    CHECK(after["render_hash"] == before["render_hash"]);
    CHECK(restored.undo(before["id"])["history"] == 1);
  }
  fs::remove_all(dir);
}

TEST_CASE("concurrent sessions do not interfere") {
  SessionStore store(engine(), config());
  const std::string a = store.create(spec_doc())["id"];
  const std::string b = store.create(spec_doc())["id"];
  {
    std::jthread ta([&] {
      for (int i = 0; i < 4; ++i)
        store.patch_points(a, 1, delta("hem_center", 0, 0.01));
    });
    std::jthread tb([&] {
      for (int i = 0; i < 4; ++i)
        store.patch_points(b, 1, delta("hem_left", 0.01, 0));
    });
  }
  const json sa = store.get(a), sb = store.get(b);
  CHECK(sa["history"] == 4);
  CHECK(sb["history"] == 4);
  SessionStore serial(engine(), config());
  const std::string c = serial.create(spec_doc())["id"];
  json sc;
  for (int i = 0; i < 4; ++i)
    sc = serial.patch_points(c, 1, delta("hem_center", 0, 0.01));
  CHECK(sa["garments"] == sc["garments"]);
  CHECK(sa["render_hash"] == sc["render_hash"]);
}

TEST_CASE("http routes") {
  SessionStore store(engine(), config());
  Server server(store);
  const int port = server.start();
  httplib::Client client("127.0.0.1", port);

  auto created = client.Post("/sessions", spec_doc().dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const json s0 = json::parse(created->body);
  const std::string base = "/sessions/" + s0["id"].get<std::string>();

  auto got = client.Get(base);
  REQUIRE(got);
  CHECK(got->status == 200);
  CHECK(json::parse(got->body) == s0);

  auto patched = client.Patch(base + "/garments/2/points", delta("split_left_hem", -0.03, 0).dump(), "application/json");
  REQUIRE(patched);
  CHECK(patched->status == 200);
  const json s1 = json::parse(patched->body);
  CHECK(s1["history"] == 1);

  auto render = client.Get(base + "/render.png");
  REQUIRE(render);
  CHECK(render->status == 200);
  CHECK(render->get_header_value("Content-Type") == "image/png");
  auto by_hash = client.Get(s1["render"].get<std::string>());
  REQUIRE(by_hash);
  CHECK(by_hash->status == 200);
  CHECK(by_hash->body == render->body);
  auto layout = client.Get(base + "/layout.png");
  REQUIRE(layout);
  CHECK(layout->status == 200);

  auto templ = client.Post(base + "/templates/open_wide", "", "application/json");
  REQUIRE(templ);
  CHECK(templ->status == 200);
  auto conflict = client.Post(base + "/templates/waist_up", "", "application/json");
  REQUIRE(conflict);
  CHECK(conflict->status == 409);
  CHECK(json::parse(conflict->body).contains("error"));

  auto undo = client.Post(base + "/undo", "", "application/json");
  REQUIRE(undo);
  CHECK(undo->status == 200);
  CHECK(json::parse(undo->body)["render_hash"] == s1["render_hash"]);

  auto bad_json = client.Patch(base + "/garments/1/points", "{nope", "application/json");
  REQUIRE(bad_json);
  CHECK(bad_json->status == 400);
  auto unprocessable = client.Patch(base + "/garments/1/points", delta("zipper", 0, 0).dump(), "application/json");
  REQUIRE(unprocessable);
  CHECK(unprocessable->status == 422);
  auto missing = client.Get("/sessions/ffff");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto bad_spec = client.Post("/sessions", json{{"person", 1}}.dump(), "application/json");
  REQUIRE(bad_spec);
  CHECK(bad_spec->status == 422);

  auto schema = client.Get("/schema");
  REQUIRE(schema);
  CHECK(json::parse(schema->body)["points"].size() == 49);
  auto templates = client.Get("/templates");
  REQUIRE(templates);
  CHECK(json::parse(templates->body).size() == 7);
  server.stop();
}
