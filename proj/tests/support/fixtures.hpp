#pragma once

// Small schemas and sheaves shared by the unit and acceptance tests.

#include <string>
#include <vector>

#include "simplexdb/schema.hpp"
#include "simplexdb/sheaf.hpp"
#include "simplexdb/tile.hpp"

namespace fixtures {

using namespace simplexdb;

inline DataType text_type(const std::string& name) { return {name, TypeKind::Text, {}}; }
inline DataType int_type(const std::string& name) { return {name, TypeKind::Integer, {}}; }
inline DataType date_type(const std::string& name) { return {name, TypeKind::Date, {}}; }
inline DataType enum_type(const std::string& name, std::vector<std::string> values) {
  return {name, TypeKind::Enumerated, std::move(values)};
}

inline Schema representable(const TypeRegistry& reg, std::vector<std::string> labels,
                            std::vector<std::string> names = {}) {
  return make_representable(reg, labels, names);
}

// Edge A-B attached to triangle B-C-D at B.
inline Schema edge_and_triangle() {
  TypeRegistry reg{text_type("A"), text_type("B"), text_type("C"), text_type("D")};
  auto edge = representable(reg, {"A", "B"}, {"A", "B"});
  auto tri = representable(reg, {"B", "C", "D"}, {"B", "C", "D"});
  return glue(edge, "B", tri, "B", SlotMatching::identity(0)).schema;
}

// Two triangles ABC and BCD sharing edge BC.
inline Schema two_triangles() {
  TypeRegistry reg{int_type("n")};
  auto left = representable(reg, {"n", "n", "n"}, {"A", "B", "C"});
  auto right = representable(reg, {"n", "n", "n"}, {"B", "C", "D"});
  return glue(left, "BC", right, "BC", SlotMatching::identity(1)).schema;
}

// One vertex P with a loop edge E whose faces are both P.
inline Schema friendship_schema(const std::vector<std::string>& people) {
  TypeRegistry reg{enum_type("person", people)};
  Schema s(reg);
  s.insert({"P", 0, {}, "person"});
  s.insert({"E", 1, {"P", "P"}, std::nullopt});
  return s;
}

inline Sheaf friendship_sheaf(const std::vector<std::string>& people,
                              const std::vector<std::pair<std::string, std::string>>& pairs) {
  Sheaf sheaf(friendship_schema(people));
  std::vector<Tuple> vertex;
  for (const auto& p : people) vertex.push_back({Value(p)});
  sheaf = set_table(sheaf, Table::concrete("P", vertex));
  std::vector<Tuple> edges;
  for (const auto& [a, b] : pairs) edges.push_back({Value(a), Value(b)});
  return set_table(sheaf, Table::concrete("E", edges));
}

// Path A - M - B of two edges carrying "t - s = d" tables.
inline Sheaf odometer_sheaf(std::int64_t d1, std::int64_t d2) {
  TypeRegistry reg{int_type("int")};
  Schema s(reg);
  s.insert({"A", 0, {}, "int"});
  s.insert({"M", 0, {}, "int"});
  s.insert({"B", 0, {}, "int"});
  // face 0 deletes slot 0 (s), so it is the t end.
  s.insert({"AM", 1, {"M", "A"}, std::nullopt});
  s.insert({"MB", 1, {"B", "M"}, std::nullopt});
  Sheaf sheaf(s);
  sheaf = set_table(sheaf, Table::virtual_table("AM", VirtualTable::difference(d1)));
  return set_table(sheaf, Table::virtual_table("MB", VirtualTable::difference(d2)));
}

inline Provenance desk_provenance(bool verified = false) {
  return {"desk", "2024-01-01T09:00:00Z", verified, "2024-02-01", std::nullopt};
}

// A tile on the full simplex over `names` (one vertex per label).
inline Tile make_tile(const std::string& name, const TypeRegistry& reg, std::vector<std::string> labels,
                      std::vector<std::string> names, std::vector<Tuple> rows, bool verified = false) {
  Tile t;
  t.name = name;
  t.schema = representable(reg, labels, names);
  t.top = representable_top(names.size(), names);
  t.table = Table::concrete(t.top, std::move(rows));
  t.provenance = desk_provenance(verified);
  return t;
}

inline Tile make_virtual_tile(const std::string& name, const TypeRegistry& reg, std::vector<std::string> labels,
                              std::vector<std::string> names, VirtualTable vt) {
  Tile t = make_tile(name, reg, std::move(labels), std::move(names), {});
  t.table = Table::virtual_table(t.top, std::move(vt));
  return t;
}

inline TypeRegistry int_registry() { return TypeRegistry{int_type("int")}; }

// (a, b, c) with c = a + b; its summands edge is "ab".
inline Tile addition_tile() {
  return make_virtual_tile("addition", int_registry(), {"int", "int", "int"}, {"a", "b", "c"},
                           VirtualTable::addition());
}

// Company interactions (x, y, t) with dates.
inline Tile interactions_tile(std::vector<Tuple> rows) {
  TypeRegistry reg{text_type("company"), date_type("date")};
  return make_tile("interactions", reg, {"company", "company", "date"}, {"x", "y", "t"}, std::move(rows), true);
}

inline Tile creations_tile(std::vector<Tuple> rows) {
  TypeRegistry reg{text_type("company"), text_type("creation")};
  return make_tile("creations", reg, {"company", "company", "creation"}, {"x", "y", "w"}, std::move(rows));
}

inline Tile today_tile(const std::string& date) {
  TypeRegistry reg{date_type("date")};
  return make_tile("today", reg, {"date"}, {"d"}, {{Value(date)}}, true);
}

// Workspace with the two company triangles glued along their (x, y) edge.
inline Workspace rhombus_workspace(std::vector<Tuple> interactions, std::vector<Tuple> creations,
                                   std::uint64_t seed = 1) {
  Workspace ws = drop_tile(empty_workspace(seed), interactions_tile(std::move(interactions)), std::nullopt,
                           std::nullopt);
  return drop_tile(ws, creations_tile(std::move(creations)), Attachment{"xy", "xy", SlotMatching::identity(1)},
                   CombinePolicy::Intersect);
}

}  // namespace fixtures
