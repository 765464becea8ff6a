#include "drape/service.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <random>

#include <fmt/format.h>
#include <httplib.h>

#include "drape/error.hpp"
#include "drape/hash.hpp"
#include "drape/io.hpp"

namespace drape {

using nlohmann::json;
namespace fs = std::filesystem;

struct Session {
  std::mutex mutex;
  std::string id;
  json spec_doc;
  OutfitSpec spec;
  PreparedOutfit state;
  std::vector<json> ops;
  std::vector<PreparedOutfit> history; // state before each op
  WarpCache cache{16};
  std::string render_hash;
  std::string layout_hash;
  std::vector<std::string> notes;
  bool dirty = false;
};

// ---------------------------------------------------------------------------
// RenderStore

std::string RenderStore::put(std::vector<std::uint8_t> bytes) {
  const std::string hash = fnv1a_hex(bytes);
  std::lock_guard lock(mutex_);
  if (!entries_.contains(hash)) {
    entries_.emplace(hash, std::make_shared<const std::vector<std::uint8_t>>(std::move(bytes)));
    order_.push_back(hash);
    while (order_.size() > capacity_) {
      entries_.erase(order_.front());
      order_.erase(order_.begin());
    }
  }
  return hash;
}

PngBytes RenderStore::get(const std::string &hash) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(hash);
  return it == entries_.end() ? nullptr : it->second;
}

// ---------------------------------------------------------------------------
// SessionStore

namespace {

int point_id(const json &ref, const ControlPointSchema &schema) {
  if (ref.is_number_integer()) {
    const int id = ref.get<int>();
    if (id < 0 || id >= static_cast<int>(kPointCount))
      throw HttpError(422, fmt::format("unknown point id {}", id));
    return id;
  }
  if (!ref.is_string())
    throw HttpError(400, "point \"id\" must be a name or an index");
  const auto id = schema.find(ref.get<std::string>());
  if (!id)
    throw HttpError(422, fmt::format("unknown point \"{}\"", ref.get<std::string>()));
  return *id;
}

double clamp_unit(double v, const std::string &what, json &warnings) {
  if (v >= 0.0 && v <= 1.0)
    return v;
  const double c = std::clamp(v, 0.0, 1.0);
  warnings.push_back(fmt::format("{} = {} clamped to {}", what, format_number(v), format_number(c)));
  return c;
}

double number(const json &j, const char *key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number())
    throw HttpError(400, fmt::format("\"{}\" must be a number", key));
  const double v = it->get<double>();
  if (!std::isfinite(v))
    throw HttpError(400, fmt::format("\"{}\" must be finite", key));
  return v;
}

std::vector<std::uint8_t> layout_bytes(const SemanticLayout &layout) {
  return encode_indexed_png(layout.raster(), layout_palette());
}

} // namespace

SessionStore::SessionStore(const Engine &engine, ServiceConfig config)
    : engine_(engine), config_(std::move(config)), id_state_(std::random_device{}()) {
  id_state_ = (id_state_ << 32) ^ static_cast<std::uint64_t>(
                                      std::chrono::steady_clock::now().time_since_epoch().count());
  if (!config_.template_dir.empty() && fs::is_directory(config_.template_dir))
    extra_templates_.load_dir(config_.template_dir, engine_.schema());
  if (!config_.snapshot_dir.empty()) {
    fs::create_directories(config_.snapshot_dir);
    restore();
    snapshotter_ = std::jthread([this](std::stop_token stop) {
      std::mutex m;
      std::condition_variable_any cv;
      std::unique_lock lock(m);
      while (!stop.stop_requested()) {
        cv.wait_for(lock, stop, std::chrono::milliseconds(config_.snapshot_interval_ms), [] { return false; });
        flush_snapshots();
      }
    });
  }
}

SessionStore::~SessionStore() {
  if (snapshotter_.joinable()) {
    snapshotter_.request_stop();
    snapshotter_.join();
  }
}

std::string SessionStore::new_id() {
  std::lock_guard lock(id_mutex_);
  for (;;) {
    id_state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = id_state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    std::string id = fmt::format("{:016x}", z);
    std::shared_lock map_lock(sessions_mutex_);
    if (!sessions_.contains(id))
      return id;
  }
}

std::shared_ptr<Session> SessionStore::find(const std::string &id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end())
    throw HttpError(404, fmt::format("no session \"{}\"", id));
  return it->second;
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

const EditTemplate &SessionStore::find_template(const std::string &name) const {
  if (const auto *t = extra_templates_.find(name))
    return *t;
  if (const auto *t = engine_.edits().find(name))
    return *t;
  throw HttpError(404, fmt::format("no template \"{}\"", name));
}

std::shared_ptr<Session> SessionStore::build(const std::string &id, const json &spec_doc) const {
  auto s = std::make_shared<Session>();
  s->id = id;
  s->spec_doc = spec_doc;
  try {
    s->spec = parse_outfit_spec(spec_doc, config_.asset_root, engine_);
    s->state = prepare_outfit(s->spec, engine_);
  } catch (const ValidationError &e) {
    throw HttpError(422, e.what());
  } catch (const RenderError &e) {
    throw HttpError(422, e.what());
  }
  for (const TemplateNote &n : s->state.notes)
    s->notes.push_back(fmt::format("template {}: {}", n.template_name, n.note));
  return s;
}

void SessionStore::rerender(Session &s) {
  RenderResult r;
  try {
    r = render_prepared(s.spec, engine_, s.state, &s.cache);
  } catch (const RenderError &e) {
    throw HttpError(500, e.what());
  }
  s.render_hash = renders_.put(encode_png(r.draft));
  s.layout_hash = renders_.put(layout_bytes(r.layout));
}

json SessionStore::apply_op(Session &s, const json &op) const {
  const ControlPointSchema &schema = engine_.schema();
  const std::string kind = op.at("op").get<std::string>();
  json out = json::object();
  if (kind == "patch") {
    const std::size_t g = op.at("garment").get<std::size_t>();
    if (g >= s.spec.garments.size())
      throw HttpError(404, fmt::format("session has {} garments, no garment {}", s.spec.garments.size(), g));
    ControlPointSet points = s.state.points[g];
    json warnings = json::array();
    auto require_present = [&](int id) {
      if (!points.present.test(static_cast<std::size_t>(id)))
        throw HttpError(422, fmt::format("point \"{}\" is absent on garment {}", schema.point(id).name, g));
    };
    for (const json &d : op.value("deltas", json::array())) {
      if (!d.is_object())
        throw HttpError(400, "deltas entries must be objects");
      const int id = point_id(d.value("id", json()), schema);
      require_present(id);
      Vec2 &p = points.coords[static_cast<std::size_t>(id)];
      const std::string &name = schema.point(id).name;
      p.x = clamp_unit(p.x + number(d, "dx"), name + ".x", warnings);
      p.y = clamp_unit(p.y + number(d, "dy"), name + ".y", warnings);
    }
    for (const json &d : op.value("set", json::array())) {
      if (!d.is_object())
        throw HttpError(400, "set entries must be objects");
      const int id = point_id(d.value("id", json()), schema);
      require_present(id);
      Vec2 &p = points.coords[static_cast<std::size_t>(id)];
      const std::string &name = schema.point(id).name;
      p.x = clamp_unit(number(d, "x"), name + ".x", warnings);
      p.y = clamp_unit(number(d, "y"), name + ".y", warnings);
    }
    s.state.points[g] = points;
    out["warnings"] = warnings;
  } else if (kind == "template") {
    TemplateUse use{find_template(op.at("name").get<std::string>()), std::nullopt};
    if (op.contains("garment")) {
      use.garment = op["garment"].get<std::size_t>();
      if (*use.garment >= s.spec.garments.size())
        throw HttpError(404, fmt::format("session has {} garments, no garment {}", s.spec.garments.size(),
                                         *use.garment));
    } else if (std::none_of(s.spec.garments.begin(), s.spec.garments.end(),
                            [&](const OutfitGarment &g) { return applicable(use.tmpl, g.asset->meta); })) {
      throw HttpError(409, fmt::format("template \"{}\" applies to no garment in the session", use.tmpl.name));
    }
    PreparedOutfit next = s.state;
    const std::size_t notes_before = next.notes.size();
    std::vector<std::size_t> edits_before;
    for (const auto &e : next.edits)
      edits_before.push_back(e.size());
    try {
      apply_template_use(use, s.spec, engine_, next);
      coordinate_outfit(s.spec, next);
    } catch (const EditError &e) {
      throw HttpError(409, e.what());
    } catch (const ValidationError &e) {
      throw HttpError(422, e.what());
    } catch (const RenderError &e) {
      throw HttpError(500, e.what());
    }
    json reports = json::array();
    for (std::size_t i = 0; i < next.edits.size(); ++i)
      for (std::size_t k = edits_before[i]; k < next.edits[i].size(); ++k) {
        json r = edit_report_json(next.edits[i][k], schema);
        r["index"] = i;
        reports.push_back(std::move(r));
      }
    json notes = json::array();
    for (std::size_t k = notes_before; k < next.notes.size(); ++k)
      notes.push_back(next.notes[k].note);
    s.state = std::move(next);
    out["reports"] = reports;
    out["edit_notes"] = notes;
  } else {
    throw HttpError(400, fmt::format("unknown op \"{}\"", kind));
  }
  return out;
}

json SessionStore::summary(const Session &s) const {
  json garments = json::array();
  for (std::size_t i = 0; i < s.spec.garments.size(); ++i) {
    const GarmentMeta &meta = s.spec.garments[i].asset->meta;
    garments.push_back({{"index", i},
                        {"id", meta.id},
                        {"category", std::string(to_string(meta.category))},
                        {"points", io::to_json(s.state.points[i], engine_.schema())}});
  }
  json violations = json::array();
  for (const Violation &v : s.state.coordination.remaining)
    violations.push_back({{"inner", v.inner}, {"outer", v.outer}, {"point", engine_.schema().point(v.point_id).name}});
  return {{"id", s.id},
          {"canvas", {{"width", s.spec.canvas.width}, {"height", s.spec.canvas.height}}},
          {"garments", garments},
          {"history", s.ops.size()},
          {"render", fmt::format("/renders/{}.png", s.render_hash)},
          {"layout", fmt::format("/renders/{}.png", s.layout_hash)},
          {"render_hash", s.render_hash},
          {"layout_hash", s.layout_hash},
          {"coordination", violations},
          {"notes", s.notes}};
}

json SessionStore::create(const json &spec_doc) {
  if (!spec_doc.is_object())
    throw HttpError(400, "outfit spec must be a JSON object");
  auto s = build(new_id(), spec_doc);
  rerender(*s);
  s->dirty = true;
  json out = summary(*s);
  std::unique_lock lock(sessions_mutex_);
  sessions_.emplace(s->id, s);
  return out;
}

json SessionStore::get(const std::string &id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return summary(*s);
}

json SessionStore::patch_points(const std::string &id, std::size_t garment, const json &body) {
  if (!body.is_object())
    throw HttpError(400, "patch body must be a JSON object");
  for (const auto &[key, value] : body.items()) {
    if (key != "deltas" && key != "set")
      throw HttpError(400, fmt::format("unknown patch field \"{}\"", key));
    if (!value.is_array())
      throw HttpError(400, fmt::format("\"{}\" must be an array", key));
  }
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  const json deltas = body.value("deltas", json::array());
  const json sets = body.value("set", json::array());
  if (deltas.empty() && sets.empty()) {
    if (garment >= s->spec.garments.size())
      throw HttpError(404, fmt::format("session has {} garments, no garment {}", s->spec.garments.size(), garment));
    json out = summary(*s);
    out["warnings"] = json::array();
    return out;
  }
  const json op = {{"op", "patch"}, {"garment", garment}, {"deltas", deltas}, {"set", sets}};
  const PreparedOutfit before = s->state;
  json extra;
  try {
    extra = apply_op(*s, op);
    rerender(*s);
  } catch (...) {
    s->state = before;
    throw;
  }
  s->history.push_back(before);
  s->ops.push_back(op);
  s->dirty = true;
  json out = summary(*s);
  out.update(extra);
  return out;
}

json SessionStore::apply_template(const std::string &id, const std::string &name, const json &body) {
  if (!body.is_null() && !body.is_object())
    throw HttpError(400, "template body must be a JSON object");
  json op = {{"op", "template"}, {"name", name}};
  if (body.is_object()) {
    for (const auto &[key, value] : body.items())
      if (key != "garment")
        throw HttpError(400, fmt::format("unknown template field \"{}\"", key));
    if (body.contains("garment")) {
      if (!body["garment"].is_number_integer() || body["garment"].get<long long>() < 0)
        throw HttpError(400, "\"garment\" must be a garment index");
      op["garment"] = body["garment"];
    }
  }
  find_template(name);
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  const PreparedOutfit before = s->state;
  json extra;
  try {
    extra = apply_op(*s, op);
    rerender(*s);
  } catch (...) {
    s->state = before;
    throw;
  }
  s->history.push_back(before);
  s->ops.push_back(op);
  s->dirty = true;
  json out = summary(*s);
  out.update(extra);
  return out;
}

json SessionStore::undo(const std::string &id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->history.empty())
    throw HttpError(409, "nothing to undo");
  s->state = std::move(s->history.back());
  s->history.pop_back();
  s->ops.pop_back();
  rerender(*s);
  s->dirty = true;
  return summary(*s);
}

PngBytes SessionStore::render_png(const std::string &id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return renders_.get(s->render_hash);
}

PngBytes SessionStore::layout_png(const std::string &id) const {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return renders_.get(s->layout_hash);
}

json SessionStore::schema_json() const { return io::schema_to_json(engine_.schema()); }

json SessionStore::templates_json() const {
  std::map<std::string, const EditTemplate *> all;
  for (const std::string &n : engine_.edits().names())
    all[n] = &engine_.edits().get(n);
  for (const std::string &n : extra_templates_.names())
    all[n] = &extra_templates_.get(n);
  json out = json::array();
  for (const auto &[name, t] : all) {
    json j = {{"name", name}, {"selector", print_selector(t->selector)}, {"source", print_template(*t)}};
    if (t->required_other)
      j["require"] = print_selector(*t->required_other);
    out.push_back(std::move(j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots

void SessionStore::snapshot(Session &s) const {
  const json doc = {{"id", s.id}, {"spec", s.spec_doc}, {"ops", s.ops}};
  const fs::path path = config_.snapshot_dir / (s.id + ".json");
  const fs::path tmp = path.string() + ".tmp";
  io::write_text(tmp, doc.dump() + "\n");
  fs::rename(tmp, path);
  s.dirty = false;
}

void SessionStore::flush_snapshots() {
  if (config_.snapshot_dir.empty())
    return;
  std::vector<std::shared_ptr<Session>> all;
  {
    std::shared_lock lock(sessions_mutex_);
    for (const auto &[id, s] : sessions_)
      all.push_back(s);
  }
  for (const auto &s : all) {
    std::lock_guard lock(s->mutex);
    if (!s->dirty)
      continue;
    try {
      snapshot(*s);
    } catch (const std::exception &e) {
      std::cerr << fmt::format("drape: snapshot of session {} failed: {}\n", s->id, e.what());
    }
  }
}

void SessionStore::restore() {
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(config_.snapshot_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path &file : files) {
    try {
      const json doc = io::read_json(file);
      auto s = build(doc.at("id").get<std::string>(), doc.at("spec"));
      for (const json &op : doc.at("ops")) {
        PreparedOutfit before = s->state;
        apply_op(*s, op);
        s->history.push_back(std::move(before));
        s->ops.push_back(op);
      }
      rerender(*s);
      std::unique_lock lock(sessions_mutex_);
      sessions_.emplace(s->id, s);
    } catch (const std::exception &e) {
      std::cerr << fmt::format("drape: cannot restore {}: {}\n", file.string(), e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

void send_json(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_png(httplib::Response &res, const PngBytes &bytes) {
  if (!bytes) {
    send_json(res, 404, {{"error", "render not available"}});
    return;
  }
  res.status = 200;
  res.set_header("Cache-Control", "public, max-age=31536000, immutable");
  res.set_content(reinterpret_cast<const char *>(bytes->data()), bytes->size(), "image/png");
}

json parse_body(const httplib::Request &req) {
  if (req.body.empty())
    return json();
  try {
    return json::parse(req.body);
  } catch (const json::exception &e) {
    throw HttpError(400, fmt::format("body is not JSON: {}", e.what()));
  }
}

template <typename F> auto guarded(F f) {
  return [f](const httplib::Request &req, httplib::Response &res) {
    try {
      f(req, res);
    } catch (const HttpError &e) {
      send_json(res, e.status(), {{"error", e.what()}});
    } catch (const json::exception &e) {
      send_json(res, 400, {{"error", e.what()}});
    } catch (const ValidationError &e) {
      send_json(res, 422, {{"error", e.what()}});
    } catch (const std::exception &e) {
      send_json(res, 500, {{"error", e.what()}});
    }
  };
}

std::size_t index_arg(const std::string &s) {
  try {
    return std::stoul(s);
  } catch (const std::exception &) {
    throw HttpError(404, fmt::format("no garment {}", s));
  }
}

} // namespace

Server::Server(SessionStore &store) : store_(store), http_(std::make_unique<httplib::Server>()) {
  auto &http = *http_;
  SessionStore &st = store_;
  http.Post("/sessions", guarded([&st](const httplib::Request &req, httplib::Response &res) {
              send_json(res, 201, st.create(parse_body(req)));
            }));
  http.Get(R"(/sessions/([0-9a-f]+))", guarded([&st](const httplib::Request &req, httplib::Response &res) {
             send_json(res, 200, st.get(req.matches[1]));
           }));
  http.Patch(R"(/sessions/([0-9a-f]+)/garments/([0-9]+)/points)",
             guarded([&st](const httplib::Request &req, httplib::Response &res) {
               send_json(res, 200, st.patch_points(req.matches[1], index_arg(req.matches[2]), parse_body(req)));
             }));
  http.Post(R"(/sessions/([0-9a-f]+)/templates/([A-Za-z0-9_.\-]+))",
            guarded([&st](const httplib::Request &req, httplib::Response &res) {
              send_json(res, 200, st.apply_template(req.matches[1], req.matches[2], parse_body(req)));
            }));
  http.Post(R"(/sessions/([0-9a-f]+)/undo)", guarded([&st](const httplib::Request &req, httplib::Response &res) {
              send_json(res, 200, st.undo(req.matches[1]));
            }));
  http.Get(R"(/sessions/([0-9a-f]+)/render\.png)", guarded([&st](const httplib::Request &req, httplib::Response &res) {
             send_png(res, st.render_png(req.matches[1]));
           }));
  http.Get(R"(/sessions/([0-9a-f]+)/layout\.png)", guarded([&st](const httplib::Request &req, httplib::Response &res) {
             send_png(res, st.layout_png(req.matches[1]));
           }));
  http.Get(R"(/renders/([0-9a-f]+)\.png)", guarded([&st](const httplib::Request &req, httplib::Response &res) {
             send_png(res, st.render_by_hash(req.matches[1]));
           }));
  http.Get("/schema", guarded([&st](const httplib::Request &, httplib::Response &res) {
             send_json(res, 200, st.schema_json());
           }));
  http.Get("/templates", guarded([&st](const httplib::Request &, httplib::Response &res) {
             send_json(res, 200, st.templates_json());
           }));
}

Server::~Server() { stop(); }

void Server::listen(const std::string &address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos)
    throw ValidationError(fmt::format("listen address \"{}\" is not host:port", address));
  int port = 0;
  try {
    port = std::stoi(address.substr(colon + 1));
  } catch (const std::exception &) {
    throw ValidationError(fmt::format("listen address \"{}\" has no port", address));
  }
  if (!http_->listen(address.substr(0, colon), port))
    throw Error(fmt::format("cannot listen on {}", address));
}

int Server::start(const std::string &host) {
  const int port = http_->bind_to_any_port(host);
  if (port < 0)
    throw Error(fmt::format("cannot bind on {}", host));
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port;
}

void Server::stop() {
  if (http_)
    http_->stop();
  if (thread_.joinable())
    thread_.join();
}

} // namespace drape
