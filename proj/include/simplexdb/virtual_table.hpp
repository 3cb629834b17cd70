#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simplexdb/schema.hpp"
#include "simplexdb/types.hpp"

namespace simplexdb {

/// A table that is never materialized. It is a named built-in relation plus
/// parameters; `slots[p]` says which argument of the built-in sits in table
/// slot p.
///
/// Built-ins:
///   gamma          every conforming tuple (the universal table)
///   addition       (a, b, c) with c = a + b over integers
///   difference-d   (s, t) with t - s = d over integers, parameter `d`
struct VirtualTable {
  std::string builtin;
  std::map<std::string, std::int64_t> params;
  std::vector<int> slots;

  static VirtualTable gamma() { return {"gamma", {}, {}}; }
  static VirtualTable addition() { return {"addition", {}, {0, 1, 2}}; }
  static VirtualTable difference(std::int64_t d) { return {"difference-d", {{"d", d}}, {0, 1}}; }

  bool is_gamma() const { return builtin == "gamma"; }
  bool operator==(const VirtualTable&) const = default;
};

/// Throws UnknownBuiltin / NonConforming if the built-in cannot sit on `simplex`.
void check_virtual(const Schema& schema, const SimplexId& simplex, const VirtualTable& table);

bool virtual_contains(const Schema& schema, const SimplexId& simplex, const VirtualTable& table,
                      const Tuple& tuple);

/// Slot subsets (ascending) whose values finitely determine the remaining slots.
std::vector<std::vector<int>> determining_sets(const Schema& schema, const SimplexId& simplex,
                                               const VirtualTable& table);

/// All member tuples agreeing with the bound slots. Returns nullopt when no
/// determining set is contained in the bound slots.
std::optional<std::vector<Tuple>> virtual_complete(const Schema& schema, const SimplexId& simplex,
                                                   const VirtualTable& table,
                                                   const std::vector<std::optional<Value>>& bindings);

/// Re-slots a virtual table after its simplex's slots were permuted
/// (new slot p holds old slot perm[p]).
VirtualTable permute_slots(const VirtualTable& table, const std::vector<int>& perm);

std::string describe(const VirtualTable& table);

/// A few member tuples for display; deterministic.
std::vector<Tuple> sample_rows(const Schema& schema, const SimplexId& simplex,
                               const VirtualTable& table, std::size_t count);

}  // namespace simplexdb
