#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simplexdb/schema.hpp"
#include "simplexdb/sheaf.hpp"

namespace simplexdb {

enum class Direction { Ascend, Descend };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

/// One move between face-incident simplices. `face_index` lists the slots
/// deleted from the larger simplex to reach the smaller one, ascending; a
/// single entry is an ordinary face map, several entries an iterated face
/// (e.g. from a triangle straight to one of its vertices).
struct ZigzagStep {
  Direction direction = Direction::Descend;
  std::vector<int> face_index;
  SimplexId target;

  bool operator==(const ZigzagStep&) const = default;
};

struct Zigzag {
  SimplexId start;
  std::vector<ZigzagStep> steps;

  const SimplexId& end() const { return steps.empty() ? start : steps.back().target; }
  /// Simplices visited, start first.
  std::vector<SimplexId> path() const;
  bool operator==(const Zigzag&) const = default;
};

/// Throws UnknownSimplex / NotIncident / FaceIndexOutOfRange.
void check_zigzag(const Schema& schema, const Zigzag& zigzag);

/// Infers directions and face indices. Where several face maps relate a pair,
/// the lexicographically lowest deleted-slot set wins unless `overrides`
/// (keyed by step number, from 0) names one.
Zigzag zigzag_from_sequence(const Schema& schema, const std::vector<SimplexId>& ids,
                            const std::map<std::size_t, std::vector<int>>& overrides = {});

Zigzag concatenate(const Zigzag& a, const Zigzag& b);

/// Starting rows of a query: a keyed sub-table over one simplex, each row tied
/// to a row of the sheaf table there (nullopt when that table is virtual).
struct Selection {
  SimplexId simplex;
  std::vector<std::string> keys;
  std::vector<Tuple> values;
  std::vector<std::optional<std::size_t>> rows;

  std::size_t size() const { return values.size(); }
};

Selection select_all(const Sheaf& sheaf, const SimplexId& simplex);
/// Rows of the concrete table with the given keys, in the order given.
Selection select_keys(const Sheaf& sheaf, const SimplexId& simplex, const std::vector<std::string>& keys);
/// Rows whose value is listed. Over a virtual table each listed member value
/// becomes one row with a sequential key.
Selection select_values(const Sheaf& sheaf, const SimplexId& simplex, const std::vector<Tuple>& values);
/// A fresh table with an explicit key map into the sheaf table.
Selection select_mapped(const Sheaf& sheaf, const Table& table, const KeyMap& into_sheaf);

/// Rows over the slots of the start simplex followed by those of the end simplex.
struct GraphTable {
  SimplexId start;
  SimplexId end;
  std::vector<std::string> keys;
  std::vector<Tuple> rows;
};

struct QueryResult {
  Selection selection;
  Table end_table;
  /// Selection row each end row came from.
  KeyMap back_map;
  /// Sheaf row behind each end row (nullopt when the end table is virtual).
  std::vector<std::optional<std::size_t>> end_rows;
  GraphTable graph;
};

QueryResult evaluate(const Sheaf& sheaf, const Zigzag& zigzag, const Selection& selection);

/// The graph of a result; with `dedup` repeated rows are dropped (keeping the first).
GraphTable graph_table(const QueryResult& result, bool dedup = false);

struct QueryComparison {
  bool equal = true;
  std::optional<Tuple> witness;
  std::size_t count_first = 0;
  std::size_t count_second = 0;
};

/// Multiset comparison of the two graphs. On a difference, `witness` is the
/// smallest graph row whose counts differ.
QueryComparison queries_equal(const Sheaf& sheaf, const Zigzag& first, const Zigzag& second,
                              const Selection& selection);

}  // namespace simplexdb
