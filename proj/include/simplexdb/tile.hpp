#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simplexdb/realization.hpp"
#include "simplexdb/schema.hpp"
#include "simplexdb/sheaf.hpp"
#include "simplexdb/zigzag.hpp"

namespace simplexdb {

/// Where a table came from. Timestamps are ISO 8601 (a date, or a date and
/// time with optional fraction and zone) and are kept verbatim.
struct Provenance {
  std::string source;
  std::string created_at;
  bool verified = false;
  std::string freshness;
  std::optional<std::string> trademark;

  bool operator==(const Provenance&) const = default;
};

/// Seconds since the Unix epoch (UTC); throws InvalidProvenance when malformed.
std::int64_t parse_timestamp(const std::string& text);

/// Throws InvalidProvenance unless both timestamps parse and created_at <= freshness.
void check_provenance(const Provenance& p);

/// A one-simplex database fragment: the closure of `top` with a table on `top`.
struct Tile {
  std::string name;
  Schema schema;
  SimplexId top;
  Table table;
  Provenance provenance;

  bool operator==(const Tile&) const = default;
};

/// Throws if the fragment is not the closure of a valid top simplex, the table
/// does not conform, or the provenance is invalid.
void check_tile(const Tile& tile);

/// The tile as a sheaf: the top table plus derived face tables.
Sheaf tile_sheaf(const Tile& tile);

class TileLibrary {
 public:
  /// Replaces any tile of the same name.
  void add(Tile tile);
  const Tile* find(const std::string& name) const;
  const Tile& at(const std::string& name) const;
  /// Tiles in name order; with `verified_only` just the check-marked ones.
  std::vector<const Tile*> list(bool verified_only = false) const;
  std::size_t size() const { return tiles_.size(); }

 private:
  std::map<std::string, Tile> tiles_;
};

struct ProvenanceRecord {
  std::string tile;
  SimplexId simplex;
  Provenance provenance;

  bool operator==(const ProvenanceRecord&) const = default;
};

/// One workspace mutation. Entries carry everything needed to replay them.
struct LogEntry {
  enum class Op { Place, Drop, Fold };
  Op op = Op::Place;
  std::optional<Tile> tile;
  /// Drop: workspace simplex. Fold: first simplex.
  SimplexId target;
  /// Drop: simplex of the tile. Fold: second simplex.
  SimplexId other;
  SlotMatching matching;
  std::optional<CombinePolicy> policy;

  bool operator==(const LogEntry&) const = default;
};

std::string_view to_string(LogEntry::Op op);
LogEntry::Op parse_log_op(std::string_view text);

struct Workspace {
  Sheaf sheaf;
  std::uint64_t seed = 0;
  Layout layout;
  std::vector<ProvenanceRecord> provenance;
  std::vector<LogEntry> log;

  const Schema& schema() const { return sheaf.schema(); }
  bool operator==(const Workspace&) const = default;
};

Workspace empty_workspace(std::uint64_t seed);

struct Attachment {
  SimplexId target;
  SimplexId tile_simplex;
  SlotMatching matching;
};

/// Adds a tile. Without an attachment it is placed beside the existing
/// schema; otherwise `tile_simplex` is glued onto `target`. A policy must be
/// given when both glued simplices carry concrete tables (PolicyRequired);
/// otherwise INTERSECT is used.
Workspace drop_tile(const Workspace& ws, const Tile& tile, const std::optional<Attachment>& at,
                    std::optional<CombinePolicy> policy);

/// Identifies two simplices of the workspace, with the same policy rule.
Workspace fold_workspace(const Workspace& ws, const SimplexId& x1, const SimplexId& x2,
                         const SlotMatching& matching, std::optional<CombinePolicy> policy);

Workspace apply(const Workspace& ws, const LogEntry& entry);
Workspace replay(std::uint64_t seed, const std::vector<LogEntry>& log);

/// How the starting rows of a query are chosen.
struct SelectionSpec {
  enum class Kind { All, Keys, Values };
  Kind kind = Kind::All;
  /// Defaults to the start of the zigzag.
  std::optional<SimplexId> simplex;
  std::vector<std::string> keys;
  std::vector<Tuple> values;
};

using QueryPath = std::variant<Zigzag, Polyline>;

struct WorkspaceQuery {
  Zigzag zigzag;
  QueryResult result;
};

/// Polylines are converted with curve_to_zigzag against the workspace layout.
WorkspaceQuery run_query(const Workspace& ws, const QueryPath& path, const SelectionSpec& selection);

}  // namespace simplexdb
