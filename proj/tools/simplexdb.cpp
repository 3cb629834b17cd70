// Command-line front end: validate documents, run queries, glue tiles and
// serve the HTTP API.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "simplexdb/document.hpp"
#include "simplexdb/error.hpp"
#include "simplexdb/service.hpp"

using namespace simplexdb;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + path, path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path, path);
  out << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

bool is_tile_document(const Json& doc) { return doc.is_object() && doc.contains("name") && doc.contains("top"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simplexdb: simplicial schemas, sheaves of tables and zigzag queries"};
  app.require_subcommand(1);

  std::string file;
  auto* validate = app.add_subcommand("validate", "Check a workspace or tile document");
  validate->add_option("file", file, "Document path")->required();

  std::string ws_path, zigzag_path, polyline_path, path_ids, select_path;
  bool dedup = false;
  auto* query = app.add_subcommand("query", "Evaluate a query over a workspace and print the graph table");
  query->add_option("workspace", ws_path, "Workspace document")->required();
  auto* zz_opt = query->add_option("--zigzag", zigzag_path, "Zigzag document");
  auto* pl_opt = query->add_option("--polyline", polyline_path, "Polyline document ([[x, y], ...])");
  auto* path_opt = query->add_option("--path", path_ids, "Comma-separated simplex ids of the path");
  zz_opt->excludes(pl_opt)->excludes(path_opt);
  pl_opt->excludes(path_opt);
  query->add_option("--select", select_path, "Selection document (default: every row)");
  query->add_flag("--dedup", dedup, "Drop repeated graph rows");

  std::string glue_ws, tile_path, target, tile_simplex, matching, policy, output;
  std::uint64_t seed = 0;
  auto* glue_cmd = app.add_subcommand("glue", "Drop a tile into a workspace (\"new\" starts an empty one)");
  glue_cmd->add_option("workspace", glue_ws, "Workspace document or \"new\"")->required();
  glue_cmd->add_option("tile", tile_path, "Tile document")->required();
  glue_cmd->add_option("--target", target, "Workspace simplex to glue onto (omit to place alongside)");
  glue_cmd->add_option("--tile-simplex", tile_simplex, "Tile simplex to glue (default: the tile's top)");
  glue_cmd->add_option("--matching", matching, "Slot matching, e.g. 1,0");
  glue_cmd->add_option("--policy", policy, "INTERSECT, UNION_ALL or UNION_DEDUP");
  glue_cmd->add_option("--seed", seed, "Layout seed for a new workspace");
  glue_cmd->add_option("-o,--output", output, "Output path (default stdout)");

  int port = 8080;
  std::string host = "127.0.0.1", library;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "Port")->required();
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--library", library, "Directory of tile documents");

  std::string import_path, import_library;
  auto* import_cmd = app.add_subcommand("import-tile", "Check a tile document and add it to a library");
  import_cmd->add_option("file", import_path, "Tile document")->required();
  import_cmd->add_option("--library", import_library, "Library directory to copy the tile into");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const Json doc = parse_document(read_file(file));
      if (is_tile_document(doc)) {
        const Tile t = tile_from_json(doc);
        std::cout << "ok: tile " << t.name << " (" << t.schema.size() << " simplices)\n";
      } else {
        const Workspace ws = workspace_from_json(doc);
        std::cout << "ok: workspace with " << ws.schema().size() << " simplices, " << ws.sheaf.tables().size()
                  << " tables, " << ws.log.size() << " log entries\n";
      }
    } else if (query->parsed()) {
      const Workspace ws = load_workspace(read_file(ws_path));
      QueryPath path;
      if (!zigzag_path.empty()) {
        path = zigzag_from_json(parse_document(read_file(zigzag_path)));
      } else if (!polyline_path.empty()) {
        path = polyline_from_json(parse_document(read_file(polyline_path)));
      } else if (!path_ids.empty()) {
        path = zigzag_from_sequence(ws.schema(), split(path_ids, ','));
      } else {
        throw Error(ErrorCode::InvalidArgument, "give one of --zigzag, --polyline or --path");
      }
      const SelectionSpec wanted =
          select_path.empty() ? SelectionSpec{} : selection_from_json(parse_document(read_file(select_path)));
      std::cout << dump_document(query_to_json(run_query(ws, path, wanted), dedup));
    } else if (glue_cmd->parsed()) {
      const Workspace ws = glue_ws == "new" ? empty_workspace(seed) : load_workspace(read_file(glue_ws));
      const Tile tile = import_tile(read_file(tile_path));
      std::optional<Attachment> at;
      if (!target.empty()) {
        Attachment a{target, tile_simplex.empty() ? tile.top : tile_simplex, {}};
        if (matching.empty()) {
          a.matching = SlotMatching::identity(tile.schema.at(a.tile_simplex).dim);
        } else {
          for (const auto& s : split(matching, ',')) a.matching.right_slot.push_back(std::stoi(s));
        }
        at = std::move(a);
      }
      std::optional<CombinePolicy> p;
      if (!policy.empty()) p = parse_policy(policy);
      write_output(output, save_workspace(drop_tile(ws, tile, at, p)));
    } else if (serve->parsed()) {
      std::optional<std::filesystem::path> dir;
      if (!library.empty()) dir = library;
      Service service(dir ? load_library(*dir) : TileLibrary{}, dir);
      httplib::Server server;
      service.mount(server);
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "could not bind " << host << ":" << port << "\n";
        return 1;
      }
    } else if (import_cmd->parsed()) {
      const Tile t = import_tile(read_file(import_path));
      if (!import_library.empty()) {
        std::filesystem::create_directories(import_library);
        std::ofstream(std::filesystem::path(import_library) / (t.name + ".json")) << export_tile(t);
      }
      std::cout << dump_document(tile_summary(t));
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what();
    if (!e.detail().empty()) std::cerr << " (" << e.detail() << ")";
    std::cerr << "\n";
    return 1;
  }
  return 0;
}
