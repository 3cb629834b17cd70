#include "simplexdb/document.hpp"

#include <algorithm>

#include "simplexdb/error.hpp"

namespace simplexdb {

namespace {

[[noreturn]] void malformed(const std::string& what, const std::string& detail = {}) {
  throw Error(ErrorCode::MalformedDocument, what, detail);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) malformed(std::string("expected an object holding '") + key + "'", key);
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'", key);
  return *it;
}

std::string text(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string", key);
  return v.get<std::string>();
}

const Json& array(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array()) malformed(std::string("field '") + key + "' must be an array", key);
  return v;
}

std::int64_t integer(const Json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) malformed(std::string("field '") + key + "' must be an integer", key);
  return v.get<std::int64_t>();
}

std::vector<int> int_list(const Json& j, const char* what) {
  if (j.is_number_integer()) return {j.get<int>()};
  if (!j.is_array()) malformed(std::string(what) + " must be an integer list", what);
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) malformed(std::string(what) + " must be an integer list", what);
    out.push_back(x.get<int>());
  }
  return out;
}

// nlohmann throws its own exception types on type mismatches deep inside
// get<>; report those uniformly.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    malformed(e.what());
  }
}

void check_version(const Json& doc) {
  const auto v = integer(doc, "version");
  if (v != kDocumentVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "document version " + std::to_string(v) + " is not " + std::to_string(kDocumentVersion),
                std::to_string(v));
  }
}

Json keymaps_to_json(const Sheaf& sheaf) {
  Json out = Json::array();
  for (const auto& [where, km] : sheaf.key_maps()) {
    out.push_back({{"simplex", where.first}, {"face", where.second}, {"map", km}});
  }
  return out;
}

Json provenance_records_to_json(const std::vector<ProvenanceRecord>& records) {
  Json out = Json::array();
  for (const auto& r : records) {
    Json j = provenance_to_json(r.provenance);
    j["tile"] = r.tile;
    j["simplex"] = r.simplex;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

Json value_to_json(const Value& v) { return v.is_integer() ? Json(v.as_integer()) : Json(v.as_string()); }

Value value_from_json(const Json& j) {
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_string()) return Value(j.get<std::string>());
  malformed("cell values are integers or strings, got " + j.dump());
}

Json tuple_to_json(const Tuple& t) {
  Json out = Json::array();
  for (const auto& v : t) out.push_back(value_to_json(v));
  return out;
}

Tuple tuple_from_json(const Json& j) {
  if (!j.is_array()) malformed("a row must be an array, got " + j.dump());
  Tuple t;
  for (const auto& v : j) t.push_back(value_from_json(v));
  return t;
}

Json schema_to_json(const Schema& schema) {
  Json types = Json::array();
  for (const auto& [name, dt] : schema.registry().types()) {
    Json t{{"name", name}, {"kind", std::string(to_string(dt.kind))}};
    if (dt.kind == TypeKind::Enumerated) t["values"] = dt.values;
    types.push_back(std::move(t));
  }
  Json simplices = Json::array();
  for (const auto& [id, s] : schema.simplices()) {
    Json j{{"id", id}, {"dim", s.dim}, {"faces", s.faces}};
    if (s.label) j["label"] = *s.label;
    simplices.push_back(std::move(j));
  }
  return {{"datatypes", std::move(types)}, {"simplices", std::move(simplices)}};
}

Schema schema_from_json(const Json& doc) {
  return guarded([&] {
    TypeRegistry reg;
    for (const auto& t : array(doc, "datatypes")) {
      DataType dt;
      dt.name = text(t, "name");
      dt.kind = parse_type_kind(text(t, "kind"));
      if (t.contains("values")) dt.values = t.at("values").get<std::vector<std::string>>();
      reg.add(std::move(dt));
    }
    Schema schema(std::move(reg));
    for (const auto& s : array(doc, "simplices")) {
      Simplex x;
      x.id = text(s, "id");
      x.dim = static_cast<int>(integer(s, "dim"));
      x.faces = array(s, "faces").get<std::vector<std::string>>();
      if (s.contains("label") && !s.at("label").is_null()) x.label = s.at("label").get<std::string>();
      if (schema.contains(x.id)) malformed("duplicate simplex id " + x.id, x.id);
      schema.insert(std::move(x));
    }
    auto report = validate_schema(schema);
    if (!report.empty()) {
      std::string msg = "invalid schema:";
      for (const auto& v : report) msg += " [" + v.simplex + ": " + v.message + "]";
      throw Error(ErrorCode::InvalidSchema, msg, report.front().simplex);
    }
    return schema;
  });
}

Json table_to_json(const Table& table) {
  Json j{{"simplex", table.simplex}};
  if (table.virt) {
    j["virtual"] = {{"builtin", table.virt->builtin}, {"params", table.virt->params}, {"slots", table.virt->slots}};
    return j;
  }
  j["keys"] = table.keys;
  Json rows = Json::array();
  for (const auto& r : table.rows) rows.push_back(tuple_to_json(r));
  j["rows"] = std::move(rows);
  return j;
}

Table table_from_json(const Json& j) {
  return guarded([&] {
    const auto simplex = text(j, "simplex");
    if (j.contains("virtual")) {
      const auto& v = j.at("virtual");
      VirtualTable vt;
      vt.builtin = text(v, "builtin");
      if (v.contains("params")) vt.params = v.at("params").get<std::map<std::string, std::int64_t>>();
      if (v.contains("slots")) {
        vt.slots = int_list(v.at("slots"), "slots");
      } else if (vt.builtin == "addition") {
        vt.slots = {0, 1, 2};
      } else if (vt.builtin == "difference-d") {
        vt.slots = {0, 1};
      }
      return Table::virtual_table(simplex, std::move(vt));
    }
    std::vector<Tuple> rows;
    for (const auto& r : array(j, "rows")) rows.push_back(tuple_from_json(r));
    if (!j.contains("keys")) return Table::concrete(simplex, std::move(rows));
    auto keys = j.at("keys").get<std::vector<std::string>>();
    if (keys.size() != rows.size()) malformed("table on " + simplex + " has " + std::to_string(keys.size()) +
                                                  " keys for " + std::to_string(rows.size()) + " rows",
                                              simplex);
    return Table::keyed(simplex, std::move(keys), std::move(rows));
  });
}

Json provenance_to_json(const Provenance& p) {
  Json j{{"source", p.source}, {"created_at", p.created_at}, {"verified", p.verified}, {"freshness", p.freshness}};
  if (p.trademark) j["trademark"] = *p.trademark;
  return j;
}

Provenance provenance_from_json(const Json& j) {
  return guarded([&] {
    Provenance p;
    p.source = text(j, "source");
    p.created_at = text(j, "created_at");
    p.freshness = text(j, "freshness");
    const auto& v = field(j, "verified");
    if (!v.is_boolean()) malformed("field 'verified' must be a boolean", "verified");
    p.verified = v.get<bool>();
    if (j.contains("trademark") && !j.at("trademark").is_null()) p.trademark = j.at("trademark").get<std::string>();
    check_provenance(p);
    return p;
  });
}

Json layout_to_json(const Layout& layout) {
  Json points = Json::object();
  for (const auto& [id, p] : layout.points) points[id] = {p.x, p.y};
  return points;
}

Layout layout_from_json(const Json& j) {
  return guarded([&] {
    if (!j.is_object()) malformed("layout points must be an object");
    Layout l;
    for (const auto& [id, p] : j.items()) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        malformed("layout point for " + id + " must be [x, y]", id);
      }
      l.points[id] = {p[0].get<double>(), p[1].get<double>()};
    }
    return l;
  });
}

Json tile_to_json(const Tile& tile) {
  Json doc = schema_to_json(tile.schema);
  doc["version"] = kDocumentVersion;
  doc["name"] = tile.name;
  doc["top"] = tile.top;
  doc["tables"] = Json::array({table_to_json(tile.table)});
  doc["provenance"] = provenance_to_json(tile.provenance);
  return doc;
}

Tile tile_from_json(const Json& doc) {
  return guarded([&] {
    check_version(doc);
    Tile t;
    t.name = text(doc, "name");
    t.top = text(doc, "top");
    t.schema = schema_from_json(doc);
    const auto& tables = array(doc, "tables");
    if (tables.size() != 1) malformed("a tile carries exactly one table", t.name);
    t.table = table_from_json(tables[0]);
    t.provenance = provenance_from_json(field(doc, "provenance"));
    check_tile(t);
    return t;
  });
}

Json tile_summary(const Tile& tile) {
  Json j{{"name", tile.name},
         {"top", tile.top},
         {"dim", tile.schema.at(tile.top).dim},
         {"labels", tile.schema.slot_labels(tile.top)},
         {"virtual", tile.table.is_virtual()},
         {"rows", tile.table.size()},
         {"provenance", provenance_to_json(tile.provenance)}};
  if (tile.table.virt) j["builtin"] = tile.table.virt->builtin;
  return j;
}

Json log_entry_to_json(const LogEntry& e) {
  Json j{{"op", std::string(to_string(e.op))}};
  if (e.tile) j["tile"] = tile_to_json(*e.tile);
  if (e.op == LogEntry::Op::Drop) {
    j["target"] = e.target;
    j["tile_simplex"] = e.other;
  } else if (e.op == LogEntry::Op::Fold) {
    j["x1"] = e.target;
    j["x2"] = e.other;
  }
  if (e.op != LogEntry::Op::Place) j["matching"] = e.matching.right_slot;
  j["policy"] = e.policy ? Json(std::string(to_string(*e.policy))) : Json(nullptr);
  return j;
}

LogEntry log_entry_from_json(const Json& j) {
  return guarded([&] {
    LogEntry e;
    e.op = parse_log_op(text(j, "op"));
    if (e.op != LogEntry::Op::Fold) e.tile = tile_from_json(field(j, "tile"));
    if (e.op == LogEntry::Op::Drop) {
      e.target = text(j, "target");
      e.other = text(j, "tile_simplex");
    } else if (e.op == LogEntry::Op::Fold) {
      e.target = text(j, "x1");
      e.other = text(j, "x2");
    }
    if (e.op != LogEntry::Op::Place) e.matching.right_slot = int_list(field(j, "matching"), "matching");
    if (j.contains("policy") && !j.at("policy").is_null()) e.policy = parse_policy(j.at("policy").get<std::string>());
    return e;
  });
}

Json workspace_to_json(const Workspace& ws) {
  Json doc = schema_to_json(ws.schema());
  doc["version"] = kDocumentVersion;
  Json tables = Json::array();
  for (const auto& [id, t] : ws.sheaf.tables()) tables.push_back(table_to_json(t));
  doc["tables"] = std::move(tables);
  doc["keymaps"] = keymaps_to_json(ws.sheaf);
  doc["layout"] = {{"seed", ws.seed}, {"points", layout_to_json(ws.layout)}};
  doc["provenance"] = provenance_records_to_json(ws.provenance);
  Json log = Json::array();
  for (const auto& e : ws.log) log.push_back(log_entry_to_json(e));
  doc["log"] = std::move(log);
  return doc;
}

Workspace workspace_from_json(const Json& doc) {
  return guarded([&] {
    check_version(doc);
    Workspace ws;
    Sheaf sheaf(schema_from_json(doc));
    for (const auto& t : array(doc, "tables")) {
      auto table = table_from_json(t);
      if (!sheaf.schema().contains(table.simplex)) {
        throw Error(ErrorCode::UnknownSimplex, "table on unknown simplex " + table.simplex, table.simplex);
      }
      sheaf.put_table(std::move(table));
    }
    for (const auto& k : array(doc, "keymaps")) {
      const auto id = text(k, "simplex");
      const auto face = static_cast<int>(integer(k, "face"));
      sheaf.put_key_map(id, face, field(k, "map").get<KeyMap>());
    }
    auto report = validate_sheaf(sheaf);
    if (!report.empty()) {
      std::string msg = "invalid sheaf:";
      for (const auto& v : report) msg += " [" + v.simplex + ": " + v.message + "]";
      throw Error(ErrorCode::InvalidSheaf, msg, report.front().simplex);
    }
    ws.sheaf = std::move(sheaf);
    const auto& layout = field(doc, "layout");
    const auto& seed = field(layout, "seed");
    if (!seed.is_number_unsigned()) malformed("layout seed must be a non-negative integer", "seed");
    ws.seed = seed.get<std::uint64_t>();
    ws.layout = layout_from_json(field(layout, "points"));
    for (const auto& [id, s] : ws.schema().simplices()) {
      if (s.dim == 0 && !ws.layout.points.count(id)) malformed("layout has no point for vertex " + id, id);
    }
    for (const auto& [id, p] : ws.layout.points) {
      if (!ws.schema().contains(id)) malformed("layout point for unknown simplex " + id, id);
    }
    for (const auto& r : array(doc, "provenance")) {
      ProvenanceRecord rec{text(r, "tile"), text(r, "simplex"), provenance_from_json(r)};
      if (!ws.schema().contains(rec.simplex)) {
        throw Error(ErrorCode::UnknownSimplex, "provenance names unknown simplex " + rec.simplex, rec.simplex);
      }
      ws.provenance.push_back(std::move(rec));
    }
    for (const auto& e : array(doc, "log")) ws.log.push_back(log_entry_from_json(e));
    return ws;
  });
}

Json zigzag_to_json(const Zigzag& z) {
  Json steps = Json::array();
  for (const auto& s : z.steps) {
    steps.push_back({{"direction", std::string(to_string(s.direction))}, {"face_index", s.face_index}, {"target", s.target}});
  }
  return {{"start", z.start}, {"steps", std::move(steps)}};
}

Zigzag zigzag_from_json(const Json& j) {
  return guarded([&] {
    Zigzag z;
    z.start = text(j, "start");
    for (const auto& s : array(j, "steps")) {
      ZigzagStep step;
      step.direction = parse_direction(text(s, "direction"));
      step.face_index = int_list(field(s, "face_index"), "face_index");
      step.target = text(s, "target");
      z.steps.push_back(std::move(step));
    }
    return z;
  });
}

Json polyline_to_json(const Polyline& p) {
  Json out = Json::array();
  for (const auto& pt : p) out.push_back({pt.x, pt.y});
  return out;
}

Polyline polyline_from_json(const Json& j) {
  return guarded([&] {
    const Json& pts = j.is_object() ? array(j, "points") : j;
    if (!pts.is_array() || pts.empty()) malformed("a polyline is a non-empty array of [x, y] points");
    Polyline out;
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        malformed("polyline point must be [x, y], got " + p.dump());
      }
      out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
  });
}

SelectionSpec selection_from_json(const Json& j) {
  return guarded([&] {
    SelectionSpec wanted;
    if (j.is_null()) return wanted;
    if (!j.is_object()) malformed("a selection is an object");
    if (j.contains("simplex") && !j.at("simplex").is_null()) wanted.simplex = j.at("simplex").get<std::string>();
    if (j.contains("keys")) {
      wanted.kind = SelectionSpec::Kind::Keys;
      wanted.keys = j.at("keys").get<std::vector<std::string>>();
    } else if (j.contains("values")) {
      wanted.kind = SelectionSpec::Kind::Values;
      for (const auto& v : array(j, "values")) wanted.values.push_back(v.is_array() ? tuple_from_json(v) : Tuple{value_from_json(v)});
    }
    return wanted;
  });
}

Json graph_to_json(const GraphTable& g) {
  Json rows = Json::array();
  for (const auto& r : g.rows) rows.push_back(tuple_to_json(r));
  return {{"start", g.start}, {"end", g.end}, {"keys", g.keys}, {"rows", std::move(rows)}};
}

Json query_to_json(const WorkspaceQuery& q, bool dedup) {
  return {{"zigzag", zigzag_to_json(q.zigzag)},
          {"graph", graph_to_json(graph_table(q.result, dedup))},
          {"end_table", table_to_json(q.result.end_table)},
          {"back_map", q.result.back_map},
          {"dedup", dedup}};
}

Json table_view(const Workspace& ws, const SimplexId& simplex, std::size_t offset, std::size_t limit) {
  const auto& schema = ws.schema();
  if (!schema.contains(simplex)) throw Error(ErrorCode::NotFound, "no simplex " + simplex, simplex);
  Json j{{"simplex", simplex}, {"columns", schema.slot_labels(simplex)}, {"vertices", schema.vertex_slots(simplex)}};
  Json prov = Json::array();
  for (const auto& r : ws.provenance) {
    if (schema.closure(r.simplex).count(simplex)) {
      Json p = provenance_to_json(r.provenance);
      p["tile"] = r.tile;
      prov.push_back(std::move(p));
    }
  }
  j["provenance"] = std::move(prov);
  const Table t = ws.sheaf.effective_table(simplex);
  if (t.virt) {
    j["virtual"] = true;
    j["builtin"] = t.virt->builtin;
    j["params"] = t.virt->params;
    j["description"] = describe(*t.virt);
    Json samples = Json::array();
    for (const auto& r : sample_rows(schema, simplex, *t.virt, 3)) samples.push_back(tuple_to_json(r));
    j["sample_rows"] = std::move(samples);
    return j;
  }
  j["virtual"] = false;
  j["total"] = t.size();
  j["offset"] = offset;
  Json keys = Json::array(), rows = Json::array();
  for (std::size_t r = offset; r < t.size() && r - offset < limit; ++r) {
    keys.push_back(t.keys[r]);
    rows.push_back(tuple_to_json(t.rows[r]));
  }
  j["keys"] = std::move(keys);
  j["rows"] = std::move(rows);
  return j;
}

Json layout_view(const Workspace& ws) {
  Json curves = Json::object();
  for (const auto& [id, s] : ws.schema().simplices()) {
    if (s.dim == 1) curves[id] = polyline_to_json(edge_curve(ws.schema(), ws.layout, id));
  }
  Json polygons = Json::object();
  for (const auto& [id, s] : ws.schema().simplices()) {
    if (s.dim >= 2) polygons[id] = polyline_to_json(simplex_outline(ws.schema(), ws.layout, id));
  }
  return {{"seed", ws.seed},
          {"points", layout_to_json(ws.layout)},
          {"curves", std::move(curves)},
          {"polygons", std::move(polygons)},
          {"scale", layout_scale(ws.layout)},
          {"epsilon", kLocateEpsilon * layout_scale(ws.layout)}};
}

std::string dump_document(const Json& doc) { return doc.dump(2) + "\n"; }

Json parse_document(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    malformed(std::string("not valid JSON: ") + e.what());
  }
}

std::string save_workspace(const Workspace& ws) { return dump_document(workspace_to_json(ws)); }
Workspace load_workspace(const std::string& text) { return workspace_from_json(parse_document(text)); }
std::string export_tile(const Tile& tile) { return dump_document(tile_to_json(tile)); }
Tile import_tile(const std::string& text) { return tile_from_json(parse_document(text)); }

}  // namespace simplexdb
