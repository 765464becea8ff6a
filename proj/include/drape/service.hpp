#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "drape/pipeline.hpp"

namespace httplib {
class Server;
}

namespace drape {

struct ServiceConfig {
  std::string listen = "127.0.0.1:8080";
  std::filesystem::path asset_root = ".";    // outfit paths resolve here
  std::filesystem::path template_dir;        // extra edit templates
  std::filesystem::path snapshot_dir;        // empty disables persistence
  int snapshot_interval_ms = 1000;
};

/// Error carrying the HTTP status a request should fail with.
class HttpError : public std::runtime_error {
public:
  HttpError(int status, const std::string &message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

private:
  int status_;
};

using PngBytes = std::shared_ptr<const std::vector<std::uint8_t>>;

/// Encoded renders addressed by content hash.
class RenderStore {
public:
  explicit RenderStore(std::size_t capacity = 512) : capacity_(capacity) {}
  /// Stores the bytes and returns their hex hash.
  std::string put(std::vector<std::uint8_t> bytes);
  PngBytes get(const std::string &hash) const;

private:
  mutable std::mutex mutex_;
  std::map<std::string, PngBytes> entries_;
  std::vector<std::string> order_;
  std::size_t capacity_;
};

struct Session;

/// Editing sessions over an engine. Requests on one session are serialized;
/// different sessions proceed in parallel. Every operation is logged so a
/// session can be replayed from its spec, which is what snapshots store.
class SessionStore {
public:
  SessionStore(const Engine &engine, ServiceConfig config);
  ~SessionStore();
  SessionStore(const SessionStore &) = delete;
  SessionStore &operator=(const SessionStore &) = delete;

  nlohmann::json create(const nlohmann::json &spec_doc);
  nlohmann::json get(const std::string &id) const;
  /// Body: {"deltas": [{"id", "dx", "dy"}], "set": [{"id", "x", "y"}]}.
  nlohmann::json patch_points(const std::string &id, std::size_t garment, const nlohmann::json &body);
  /// Body: {"garment": i} or empty for every applicable garment.
  nlohmann::json apply_template(const std::string &id, const std::string &name, const nlohmann::json &body);
  nlohmann::json undo(const std::string &id);

  PngBytes render_png(const std::string &id) const;
  PngBytes layout_png(const std::string &id) const;
  PngBytes render_by_hash(const std::string &hash) const { return renders_.get(hash); }

  nlohmann::json schema_json() const;
  nlohmann::json templates_json() const;
  const EditTemplate &find_template(const std::string &name) const;

  std::size_t size() const;
  /// Writes every dirty session to the snapshot directory now.
  void flush_snapshots();

private:
  std::shared_ptr<Session> find(const std::string &id) const;
  std::shared_ptr<Session> build(const std::string &id, const nlohmann::json &spec_doc) const;
  nlohmann::json apply_op(Session &s, const nlohmann::json &op) const;
  void rerender(Session &s);
  nlohmann::json summary(const Session &s) const;
  void snapshot(Session &s) const;
  void restore();
  std::string new_id();

  const Engine &engine_;
  ServiceConfig config_;
  EditLibrary extra_templates_;
  RenderStore renders_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_state_;
  std::jthread snapshotter_;
};

/// HTTP routes over a session store.
class Server {
public:
  explicit Server(SessionStore &store);
  ~Server();

  /// Blocks serving on "host:port".
  void listen(const std::string &address);
  /// Binds an ephemeral port on `host`, serves in the background and returns the port.
  int start(const std::string &host = "127.0.0.1");
  void stop();

private:
  SessionStore &store_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

} // namespace drape
