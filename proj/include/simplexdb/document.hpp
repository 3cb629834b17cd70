#pragma once

#include <string>

#include <json.hpp>

#include "simplexdb/tile.hpp"

namespace simplexdb {

using Json = nlohmann::json;

inline constexpr int kDocumentVersion = 1;

// JSON documents. Objects serialize with sorted keys and arrays in id order,
// so equal values always produce identical bytes. Every reader throws
// MalformedDocument (or a more specific engine error) on bad input.

Json value_to_json(const Value& v);
Value value_from_json(const Json& j);
Json tuple_to_json(const Tuple& t);
Tuple tuple_from_json(const Json& j);

Json schema_to_json(const Schema& schema);
/// Reads `datatypes` and `simplices` from a document; the schema must validate.
Schema schema_from_json(const Json& doc);

Json table_to_json(const Table& table);
Table table_from_json(const Json& j);

Json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const Json& j);

Json layout_to_json(const Layout& layout);
Layout layout_from_json(const Json& j);

Json tile_to_json(const Tile& tile);
Tile tile_from_json(const Json& doc);
/// Name, shape and provenance flags for library listings.
Json tile_summary(const Tile& tile);

Json log_entry_to_json(const LogEntry& e);
LogEntry log_entry_from_json(const Json& j);

Json workspace_to_json(const Workspace& ws);
Workspace workspace_from_json(const Json& doc);

Json zigzag_to_json(const Zigzag& z);
Zigzag zigzag_from_json(const Json& j);
Json polyline_to_json(const Polyline& p);
Polyline polyline_from_json(const Json& j);
SelectionSpec selection_from_json(const Json& j);
Json graph_to_json(const GraphTable& g);
Json query_to_json(const WorkspaceQuery& q, bool dedup);

/// Display form of a simplex's table: rows for a concrete table, a
/// description plus sample rows for a virtual one.
Json table_view(const Workspace& ws, const SimplexId& simplex, std::size_t offset, std::size_t limit);

/// Per-vertex points plus the drawn curve of every edge.
Json layout_view(const Workspace& ws);

/// Canonical text: two-space indentation, trailing newline.
std::string dump_document(const Json& doc);
Json parse_document(const std::string& text);

std::string save_workspace(const Workspace& ws);
Workspace load_workspace(const std::string& text);
std::string export_tile(const Tile& tile);
Tile import_tile(const std::string& text);

}  // namespace simplexdb
