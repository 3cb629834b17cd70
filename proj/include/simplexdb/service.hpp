#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "simplexdb/document.hpp"
#include "simplexdb/error.hpp"
#include "simplexdb/tile.hpp"

namespace httplib {
class Server;
}

namespace simplexdb {

/// HTTP status for an engine error code.
int http_status(ErrorCode code);
Json error_body(const Error& e);

/// Reads every *.json tile document in `dir`.
TileLibrary load_library(const std::filesystem::path& dir);

/// Tile library plus named workspaces behind a JSON-over-HTTP API.
///
///   GET  /tiles[?verified=true]          tile summaries
///   GET  /tiles/{name}                   tile document
///   POST /tiles                          import a tile document
///   POST /workspaces/{id}                create ({"seed": n}) or load a workspace document
///   GET  /workspaces/{id}                workspace document
///   POST /workspaces/{id}/drop           {"tile", "target", "tile_simplex", "matching", "policy"}
///   POST /workspaces/{id}/fold           {"x1", "x2", "matching", "policy"}
///   POST /workspaces/{id}/query          {"zigzag" | "polyline", "selection", "dedup"}
///   GET  /workspaces/{id}/table/{simplex}[?offset=&limit=]
///   GET  /workspaces/{id}/layout
///
/// Mutations of one workspace are serialized; reads run concurrently.
class Service {
 public:
  explicit Service(TileLibrary library = {}, std::optional<std::filesystem::path> library_dir = {});

  void mount(httplib::Server& server);

  // The handlers, callable without a socket. Each returns the response body
  // and throws Error on failure.
  Json list_tiles(bool verified_only) const;
  Json get_tile(const std::string& name) const;
  Json post_tile(const Json& doc);
  Json create_workspace(const std::string& id, const Json& body);
  Json get_workspace(const std::string& id) const;
  Json drop(const std::string& id, const Json& body);
  Json fold(const std::string& id, const Json& body);
  Json query(const std::string& id, const Json& body) const;
  Json table(const std::string& id, const std::string& simplex, std::size_t offset, std::size_t limit) const;
  Json layout(const std::string& id) const;

 private:
  struct Slot {
    mutable std::shared_mutex mutex;
    Workspace workspace;
  };

  std::shared_ptr<Slot> slot(const std::string& id) const;
  template <class F>
  Json mutate(const std::string& id, F&& f);

  mutable std::shared_mutex tiles_mutex_;
  TileLibrary library_;
  std::optional<std::filesystem::path> library_dir_;

  mutable std::mutex workspaces_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> workspaces_;
};

}  // namespace simplexdb
