#include "simplexdb/service.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "simplexdb/error.hpp"

namespace simplexdb {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::MalformedDocument:
    case ErrorCode::VersionMismatch:
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::PolicyRequired: return 409;
    default: return 422;
  }
}

Json error_body(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"detail", e.detail()}};
}

TileLibrary load_library(const std::filesystem::path& dir) {
  TileLibrary lib;
  if (!std::filesystem::exists(dir)) return lib;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    std::stringstream buf;
    buf << in.rdbuf();
    lib.add(import_tile(buf.str()));
  }
  return lib;
}

Service::Service(TileLibrary library, std::optional<std::filesystem::path> library_dir)
    : library_(std::move(library)), library_dir_(std::move(library_dir)) {}

std::shared_ptr<Service::Slot> Service::slot(const std::string& id) const {
  std::lock_guard lock(workspaces_mutex_);
  auto it = workspaces_.find(id);
  if (it == workspaces_.end()) throw Error(ErrorCode::NotFound, "no workspace " + id, id);
  return it->second;
}

template <class F>
Json Service::mutate(const std::string& id, F&& f) {
  auto s = slot(id);
  std::unique_lock lock(s->mutex);
  // Work on a copy so a failed operation leaves the workspace untouched.
  Workspace next = f(s->workspace);
  s->workspace = std::move(next);
  return workspace_to_json(s->workspace);
}

Json Service::list_tiles(bool verified_only) const {
  std::shared_lock lock(tiles_mutex_);
  Json out = Json::array();
  for (const auto* t : library_.list(verified_only)) out.push_back(tile_summary(*t));
  return out;
}

Json Service::get_tile(const std::string& name) const {
  std::shared_lock lock(tiles_mutex_);
  return tile_to_json(library_.at(name));
}

Json Service::post_tile(const Json& doc) {
  Tile t = tile_from_json(doc);
  std::unique_lock lock(tiles_mutex_);
  if (library_dir_) {
    std::filesystem::create_directories(*library_dir_);
    std::ofstream(*library_dir_ / (t.name + ".json")) << export_tile(t);
  }
  Json summary = tile_summary(t);
  library_.add(std::move(t));
  return summary;
}

Json Service::create_workspace(const std::string& id, const Json& body) {
  Workspace ws;
  if (body.is_object() && body.contains("version")) {
    ws = workspace_from_json(body);
  } else {
    std::uint64_t seed = 0;
    if (body.is_object() && body.contains("seed")) {
      if (!body.at("seed").is_number_unsigned()) throw Error(ErrorCode::MalformedDocument, "seed must be a non-negative integer", "seed");
      seed = body.at("seed").get<std::uint64_t>();
    }
    ws = empty_workspace(seed);
  }
  auto s = std::make_shared<Slot>();
  s->workspace = std::move(ws);
  Json doc = workspace_to_json(s->workspace);
  std::lock_guard lock(workspaces_mutex_);
  workspaces_[id] = std::move(s);
  return doc;
}

Json Service::get_workspace(const std::string& id) const {
  auto s = slot(id);
  std::shared_lock lock(s->mutex);
  return workspace_to_json(s->workspace);
}

namespace {

std::optional<CombinePolicy> policy_of(const Json& body) {
  if (!body.contains("policy") || body.at("policy").is_null()) return std::nullopt;
  if (!body.at("policy").is_string()) throw Error(ErrorCode::MalformedDocument, "policy must be a string", "policy");
  return parse_policy(body.at("policy").get<std::string>());
}

SlotMatching matching_of(const Json& body, const Schema& schema, const SimplexId& target) {
  if (!body.contains("matching") || body.at("matching").is_null()) {
    return SlotMatching::identity(schema.contains(target) ? schema.at(target).dim : 0);
  }
  const auto& m = body.at("matching");
  if (!m.is_array()) throw Error(ErrorCode::MalformedDocument, "matching must be an integer array", "matching");
  SlotMatching out;
  for (const auto& x : m) {
    if (!x.is_number_integer()) throw Error(ErrorCode::MalformedDocument, "matching must be an integer array", "matching");
    out.right_slot.push_back(x.get<int>());
  }
  return out;
}

std::string string_field(const Json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body.at(key).is_string()) {
    throw Error(ErrorCode::MalformedDocument, std::string("missing string field '") + key + "'", key);
  }
  return body.at(key).get<std::string>();
}

}  // namespace

Json Service::drop(const std::string& id, const Json& body) {
  if (!body.is_object() || !body.contains("tile")) throw Error(ErrorCode::MalformedDocument, "missing field 'tile'", "tile");
  Tile tile;
  if (body.at("tile").is_string()) {
    std::shared_lock lock(tiles_mutex_);
    tile = library_.at(body.at("tile").get<std::string>());
  } else {
    tile = tile_from_json(body.at("tile"));
  }
  const auto policy = policy_of(body);
  std::optional<Attachment> at;
  if (body.contains("target") && !body.at("target").is_null()) {
    Attachment a;
    a.target = string_field(body, "target");
    a.tile_simplex = body.contains("tile_simplex") ? string_field(body, "tile_simplex") : tile.top;
    a.matching = matching_of(body, tile.schema, a.tile_simplex);
    at = std::move(a);
  }
  return mutate(id, [&](const Workspace& ws) { return drop_tile(ws, tile, at, policy); });
}

Json Service::fold(const std::string& id, const Json& body) {
  const auto x1 = string_field(body, "x1");
  const auto x2 = string_field(body, "x2");
  const auto policy = policy_of(body);
  return mutate(id, [&](const Workspace& ws) {
    return fold_workspace(ws, x1, x2, matching_of(body, ws.schema(), x1), policy);
  });
}

Json Service::query(const std::string& id, const Json& body) const {
  if (!body.is_object()) throw Error(ErrorCode::MalformedDocument, "query body must be an object");
  QueryPath path;
  if (body.contains("zigzag")) {
    path = zigzag_from_json(body.at("zigzag"));
  } else if (body.contains("polyline")) {
    path = polyline_from_json(body.at("polyline"));
  } else {
    throw Error(ErrorCode::MalformedDocument, "query needs a 'zigzag' or a 'polyline'", "zigzag");
  }
  const auto wanted = selection_from_json(body.contains("selection") ? body.at("selection") : Json());
  const bool dedup = body.contains("dedup") && body.at("dedup").is_boolean() && body.at("dedup").get<bool>();
  auto s = slot(id);
  std::shared_lock lock(s->mutex);
  return query_to_json(run_query(s->workspace, path, wanted), dedup);
}

Json Service::table(const std::string& id, const std::string& simplex, std::size_t offset, std::size_t limit) const {
  auto s = slot(id);
  std::shared_lock lock(s->mutex);
  return table_view(s->workspace, simplex, offset, limit);
}

Json Service::layout(const std::string& id) const {
  auto s = slot(id);
  std::shared_lock lock(s->mutex);
  return layout_view(s->workspace);
}

namespace {

Json body_of(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  return parse_document(req.body);
}

std::size_t size_param(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stoull(req.get_param_value(key));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("query parameter '") + key + "' must be a number", key);
  }
}

template <class F>
httplib::Server::Handler handler(F f, int ok_status = 200) {
  return [f = std::move(f), ok_status](const httplib::Request& req, httplib::Response& res) {
    try {
      Json out = f(req);
      res.status = ok_status;
      res.set_content(dump_document(out), "application/json");
    } catch (const Error& e) {
      res.status = http_status(e.code());
      res.set_content(dump_document(error_body(e)), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(dump_document(Json{{"code", "internal"}, {"message", e.what()}, {"detail", ""}}),
                      "application/json");
    }
  };
}

}  // namespace

void Service::mount(httplib::Server& server) {
  server.Get("/tiles", handler([this](const httplib::Request& req) {
    return list_tiles(req.has_param("verified") && req.get_param_value("verified") == "true");
  }));
  server.Get(R"(/tiles/([^/]+))", handler([this](const httplib::Request& req) { return get_tile(req.matches[1]); }));
  server.Post("/tiles", handler([this](const httplib::Request& req) { return post_tile(body_of(req)); }, 201));
  server.Post(R"(/workspaces/([^/]+))", handler([this](const httplib::Request& req) {
    return create_workspace(req.matches[1], body_of(req));
  }, 201));
  server.Get(R"(/workspaces/([^/]+))",
             handler([this](const httplib::Request& req) { return get_workspace(req.matches[1]); }));
  server.Post(R"(/workspaces/([^/]+)/drop)",
              handler([this](const httplib::Request& req) { return drop(req.matches[1], body_of(req)); }));
  server.Post(R"(/workspaces/([^/]+)/fold)",
              handler([this](const httplib::Request& req) { return fold(req.matches[1], body_of(req)); }));
  server.Post(R"(/workspaces/([^/]+)/query)",
              handler([this](const httplib::Request& req) { return query(req.matches[1], body_of(req)); }));
  server.Get(R"(/workspaces/([^/]+)/table/(.+))", handler([this](const httplib::Request& req) {
    return table(req.matches[1], req.matches[2], size_param(req, "offset", 0), size_param(req, "limit", 100));
  }));
  server.Get(R"(/workspaces/([^/]+)/layout)",
             handler([this](const httplib::Request& req) { return layout(req.matches[1]); }));
}

}  // namespace simplexdb
