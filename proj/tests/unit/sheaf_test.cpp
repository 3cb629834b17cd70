#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "simplexdb/error.hpp"

using namespace simplexdb;
using namespace fixtures;

namespace {

std::multiset<Tuple> values_of(const Table& t) { return {t.rows.begin(), t.rows.end()}; }

Tuple tup(std::initializer_list<Value> v) { return Tuple(v); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidArgument;
}

Schema int_edge() {
  TypeRegistry reg{int_type("int")};
  return representable(reg, {"int", "int"}, {"s", "t"});
}

Schema int_triangle() {
  TypeRegistry reg{int_type("int")};
  return representable(reg, {"int", "int", "int"}, {"a", "b", "c"});
}

}  // namespace

TEST(Gamma, EnumeratedVertex) {
  TypeRegistry reg{enum_type("yn", {"yes", "no"})};
  auto s = representable(reg, {"yn"}, {"v"});
  auto g = gamma(s, "v");
  EXPECT_EQ(enumerate_virtual(s, "v", *g.virt), (std::vector<Tuple>{tup({"yes"}), tup({"no"})}));
}

TEST(Gamma, EnumeratedEdgeIsProduct) {
  TypeRegistry reg{enum_type("yn", {"yes", "no"}), enum_type("lr", {"l", "r"})};
  auto s = representable(reg, {"yn", "lr"}, {"a", "b"});
  EXPECT_EQ(enumerate_virtual(s, "ab", *gamma(s, "ab").virt).size(), 4u);
}

TEST(Gamma, IntegerVertexIsNotEnumerable) {
  TypeRegistry reg{int_type("int")};
  auto s = representable(reg, {"int"}, {"v"});
  auto g = gamma(s, "v");
  EXPECT_TRUE(virtual_contains(s, "v", *g.virt, tup({7})));
  EXPECT_FALSE(virtual_contains(s, "v", *g.virt, tup({"seven"})));
  EXPECT_EQ(code_of([&] { enumerate_virtual(s, "v", *g.virt); }), ErrorCode::NotEnumerable);
  EXPECT_EQ(code_of([&] { gamma(s, "w"); }), ErrorCode::UnknownSimplex);
}

TEST(SetTable, DerivesVertexTables) {
  Sheaf sh(int_edge());
  sh = set_table(sh, Table::concrete("st", {tup({10, 13})}));
  ASSERT_TRUE(sh.is_concrete("s"));
  ASSERT_TRUE(sh.is_concrete("t"));
  EXPECT_EQ(sh.table("s")->rows, std::vector<Tuple>{tup({10})});
  EXPECT_EQ(sh.table("t")->rows, std::vector<Tuple>{tup({13})});
  EXPECT_TRUE(validate_sheaf(sh).empty());
}

TEST(SetTable, EmptyTriangleGivesEmptyFaces) {
  Sheaf sh(int_triangle());
  sh = set_table(sh, Table::concrete("abc", {}));
  for (const auto* id : {"ab", "bc", "ac", "a", "b", "c"}) {
    ASSERT_TRUE(sh.is_concrete(id)) << id;
    EXPECT_EQ(sh.table(id)->size(), 0u);
  }
  EXPECT_TRUE(validate_sheaf(sh).empty());
}

TEST(SetTable, DistinctImagesAndKeyMaps) {
  Sheaf sh(int_triangle());
  sh = set_table(sh, Table::concrete("abc", {tup({1, 2, 3}), tup({1, 2, 4}), tup({5, 2, 3})}));
  EXPECT_EQ(sh.table("ab")->size(), 2u);
  EXPECT_EQ(sh.table("b")->size(), 1u);
  const auto& km = *sh.key_map("abc", 2);  // onto ab
  EXPECT_EQ(km, (KeyMap{0, 0, 1}));
  EXPECT_TRUE(validate_sheaf(sh).empty());
}

TEST(SetTable, ExplicitKeyMapsOntoDuplicates) {
  Sheaf sh(int_edge());
  sh = set_table(sh, Table::concrete("s", {tup({1})}));
  sh = set_table(sh, Table::concrete("t", {tup({2})}));
  // Two equal edge rows sharing one vertex row: values commute, so accepted.
  auto ok = set_table(sh, Table::concrete("st", {tup({1, 2}), tup({1, 2})}), {{1, {0, 0}}, {0, {0, 0}}});
  EXPECT_TRUE(validate_sheaf(ok).empty());
  // A map into a row with another value breaks commuting.
  sh = set_table(sh, Table::concrete("s", {tup({1}), tup({9})}));
  EXPECT_EQ(code_of([&] { set_table(sh, Table::concrete("st", {tup({1, 2})}), {{1, {1}}}); }),
            ErrorCode::KeyMapViolation);
}

TEST(SetTable, SupertableFaceByValue) {
  Sheaf sh(int_edge());
  sh = set_table(sh, Table::concrete("s", {tup({1}), tup({2}), tup({3})}));
  sh = set_table(sh, Table::concrete("st", {tup({2, 7})}));
  EXPECT_EQ(*sh.key_map("st", 1), KeyMap{1});
  EXPECT_EQ(sh.table("s")->size(), 3u);
}

TEST(SetTable, NonConformingRow) {
  Sheaf sh(int_edge());
  EXPECT_EQ(code_of([&] { set_table(sh, Table::concrete("st", {tup({1, "x"})})); }), ErrorCode::NonConforming);
  EXPECT_EQ(code_of([&] { set_table(sh, Table::concrete("zz", {})); }), ErrorCode::UnknownSimplex);
}

TEST(SetTable, FaceMissingValue) {
  Sheaf sh(int_edge());
  sh = set_table(sh, Table::concrete("s", {tup({1})}));
  EXPECT_EQ(code_of([&] { set_table(sh, Table::concrete("st", {tup({2, 3})})); }), ErrorCode::KeyMapViolation);
}

TEST(ProjectTable, DeletesSlotKeepsKeys) {
  Sheaf sh(int_edge());
  auto t = Table::keyed("st", {"k1"}, {tup({10, 13})});
  auto p = project_table(sh, "st", 1, t);
  EXPECT_EQ(p.simplex, "s");
  EXPECT_EQ(p.keys, std::vector<std::string>{"k1"});
  EXPECT_EQ(p.rows, std::vector<Tuple>{tup({10})});
  EXPECT_EQ(project_table(sh, "st", 0, Table::concrete("st", {})).size(), 0u);
  EXPECT_EQ(code_of([&] { project_table(sh, "st", 2, t); }), ErrorCode::FaceIndexOutOfRange);
}

TEST(ProjectTable, NamesExample) {
  TypeRegistry reg{text_type("First"), text_type("Last"), text_type("SSN")};
  Sheaf sh(representable(reg, {"First", "Last", "SSN"}, {"F", "L", "S"}));
  auto t = Table::concrete("FLS", {tup({"Bob", "Smith", "123-45-6789"})});
  EXPECT_EQ(project_table(sh, "FLS", 0, t).rows, std::vector<Tuple>{tup({"Smith", "123-45-6789"})});
}

TEST(ProjectTable, IteratedProjectionsCommute) {
  Sheaf sh(int_triangle());
  auto t = Table::concrete("abc", {tup({1, 2, 3}), tup({4, 5, 6})});
  for (int j = 1; j <= 2; ++j) {
    for (int i = 0; i < j; ++i) {
      auto lhs = project_table(sh, sh.schema().at("abc").faces[j], i, project_table(sh, "abc", j, t));
      auto rhs = project_table(sh, sh.schema().at("abc").faces[i], j - 1, project_table(sh, "abc", i, t));
      EXPECT_EQ(lhs, rhs);
    }
  }
}

TEST(Pushforward, OdometerEdge) {
  auto sh = odometer_sheaf(3, 4);
  auto out = pushforward_universal(sh, "AM", 1, Table::concrete("A", {tup({10})}));
  EXPECT_EQ(out.rows, std::vector<Tuple>{tup({10, 13})});
  EXPECT_EQ(pushforward_universal(sh, "AM", 1, Table::concrete("A", {})).size(), 0u);
}

TEST(Pushforward, AdditionSummands) {
  Sheaf sh(int_triangle());
  sh = set_table(sh, Table::virtual_table("abc", VirtualTable::addition()));
  auto out = pushforward_universal(sh, "abc", 2, Table::concrete("ab", {tup({2, 3})}));
  EXPECT_EQ(out.rows, std::vector<Tuple>{tup({2, 3, 5})});
}

TEST(Pushforward, NeedsDeterminingSet) {
  Sheaf sh(int_edge());
  EXPECT_EQ(code_of([&] { pushforward_universal(sh, "st", 1, Table::concrete("s", {tup({1})})); }),
            ErrorCode::NotEnumerable);
}

TEST(Pushforward, EnumeratedCompletionThenProjection) {
  TypeRegistry reg{int_type("int"), enum_type("yn", {"yes", "no"})};
  Sheaf sh(representable(reg, {"int", "yn"}, {"n", "f"}));
  auto in = Table::concrete("n", {tup({1}), tup({2}), tup({1})});
  auto out = pushforward_universal(sh, "nf", 1, in);
  EXPECT_EQ(out.size(), 6u);
  auto back = project_table(sh, "nf", 1, out);
  auto have = values_of(back);
  for (const auto& v : in.rows) EXPECT_GE(have.count(v), 1u);
}

TEST(FiberProduct, IntersectionWithoutDuplicates) {
  TypeRegistry reg{text_type("x")};
  auto s = representable(reg, {"x"}, {"v"});
  auto t1 = Table::concrete("v", {tup({"x"}), tup({"y"})});
  auto t2 = Table::concrete("v", {tup({"y"}), tup({"z"})});
  auto fp = fiber_product(s, t1, t2);
  EXPECT_EQ(fp.rows, std::vector<Tuple>{tup({"y"})});
  EXPECT_EQ(fp.keys, std::vector<std::string>{"(1,0)"});
}

TEST(FiberProduct, MultiplicitiesMultiply) {
  TypeRegistry reg{text_type("x")};
  auto s = representable(reg, {"x"}, {"v"});
  auto t1 = Table::concrete("v", {tup({"v"}), tup({"v"})});
  auto t2 = Table::concrete("v", {tup({"v"}), tup({"v"}), tup({"v"})});
  EXPECT_EQ(fiber_product(s, t1, t2).size(), 6u);
}

TEST(FiberProduct, GammaIsNeutral) {
  TypeRegistry reg{text_type("x")};
  auto s = representable(reg, {"x"}, {"v"});
  auto t1 = Table::concrete("v", {tup({"a"}), tup({"b"})});
  EXPECT_EQ(fiber_product(s, t1, gamma(s, "v")), t1);
  EXPECT_EQ(fiber_product(s, gamma(s, "v"), t1), t1);
  auto other = representable(reg, {"x"}, {"w"});
  EXPECT_EQ(code_of([&] { fiber_product(s, t1, Table::concrete("w", {})); }), ErrorCode::SimplexMismatch);
}

TEST(Union, Modes) {
  auto t1 = Table::concrete("v", {tup({"x"}), tup({"y"})});
  auto t2 = Table::concrete("v", {tup({"y"}), tup({"z"}), tup({"w"})});
  EXPECT_EQ(table_union(t1, t2, UnionMode::All).size(), 5u);
  auto d = table_union(t1, Table::concrete("v", {tup({"y"}), tup({"z"})}), UnionMode::Dedup);
  EXPECT_EQ(d.rows, (std::vector<Tuple>{tup({"x"}), tup({"y"}), tup({"z"})}));
  for (auto mode : {UnionMode::All, UnionMode::Dedup}) {
    EXPECT_EQ(table_union(t1, Table::concrete("v", {}), mode).rows, t1.rows);
  }
  EXPECT_EQ(code_of([&] { table_union(t1, Table::concrete("w", {}), UnionMode::All); }), ErrorCode::SimplexMismatch);
}

TEST(ValidateSheaf, InjectedDefects) {
  Sheaf sh(int_edge());
  sh = set_table(sh, Table::concrete("st", {tup({1, 2}), tup({3, 4})}));
  EXPECT_TRUE(validate_sheaf(sh).empty());

  Sheaf bad_map = sh;
  bad_map.put_key_map("st", 1, KeyMap{1, 1});
  auto r = validate_sheaf(bad_map);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].kind, Violation::Kind::KeyMap);

  Sheaf bad_type = sh;
  auto t = *sh.table("s");
  t.rows.push_back(tup({"oops"}));
  t.keys.push_back("extra");
  bad_type.put_table(t);
  r = validate_sheaf(bad_type);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].kind, Violation::Kind::Conformance);
}

TEST(ValidateSheaf, CompositionViolation) {
  Sheaf sh(int_triangle());
  sh = set_table(sh, Table::concrete("abc", {tup({1, 2, 3})}));
  // Point the two edges containing a at different rows of a.
  Sheaf broken = sh;
  broken.put_table(Table::concrete("a", {tup({1}), tup({1})}));
  broken.put_key_map("ab", 1, KeyMap{0});
  broken.put_key_map("ac", 1, KeyMap{1});
  auto r = validate_sheaf(broken);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].kind, Violation::Kind::Composition);
}

TEST(GlueSheaves, TodaysDateFiltersRows) {
  TypeRegistry reg{text_type("who"), date_type("date")};
  Sheaf tile(representable(reg, {"who", "date"}, {"w", "d"}));
  tile = set_table(tile, Table::concrete("wd", {tup({"ann", "2024-03-05"}), tup({"bob", "2024-03-04"}),
                                               tup({"cy", "2024-03-05"})}));
  Sheaf today(representable(reg, {"date"}, {"today"}));
  today = set_table(today, Table::concrete("today", {tup({"2024-03-05"})}));
  auto g = glue_sheaves(tile, "d", today, "today", SlotMatching::identity(0), CombinePolicy::Intersect);
  const auto& rows = g.sheaf.table(g.left.at("wd").id)->rows;
  EXPECT_EQ(rows, (std::vector<Tuple>{tup({"ann", "2024-03-05"}), tup({"cy", "2024-03-05"})}));
  EXPECT_EQ(g.sheaf.table(g.left.at("w").id)->size(), 3u);
  EXPECT_TRUE(validate_sheaf(g.sheaf).empty());
}

TEST(GlueSheaves, UnionAllAddsRows) {
  TypeRegistry reg{int_type("int")};
  Sheaf a(representable(reg, {"int", "int"}, {"s", "t"}));
  a = set_table(a, Table::concrete("st", {tup({1, 2}), tup({3, 4})}));
  Sheaf b(representable(reg, {"int", "int"}, {"u", "v"}));
  b = set_table(b, Table::concrete("uv", {tup({1, 2}), tup({5, 6}), tup({7, 8})}));
  auto all = glue_sheaves(a, "st", b, "uv", SlotMatching::identity(1), CombinePolicy::UnionAll);
  EXPECT_EQ(all.sheaf.table("st")->size(), 5u);
  auto dedup = glue_sheaves(a, "st", b, "uv", SlotMatching::identity(1), CombinePolicy::UnionDedup);
  EXPECT_EQ(dedup.sheaf.table("st")->size(), 4u);
  auto meet = glue_sheaves(a, "st", b, "uv", SlotMatching::identity(1), CombinePolicy::Intersect);
  EXPECT_EQ(meet.sheaf.table("st")->rows, std::vector<Tuple>{tup({1, 2})});
  for (const auto* g : {&all, &dedup, &meet}) EXPECT_TRUE(validate_sheaf(g->sheaf).empty());
}

TEST(GlueSheaves, PermutedMatchingReordersColumns) {
  TypeRegistry reg{int_type("int")};
  Sheaf a(representable(reg, {"int", "int"}, {"s", "t"}));
  a = set_table(a, Table::concrete("st", {tup({1, 2})}));
  Sheaf b(representable(reg, {"int", "int"}, {"u", "v"}));
  b = set_table(b, Table::concrete("uv", {tup({2, 1}), tup({1, 2})}));
  auto meet = glue_sheaves(a, "st", b, "uv", SlotMatching{{1, 0}}, CombinePolicy::Intersect);
  EXPECT_EQ(meet.sheaf.table("st")->rows, std::vector<Tuple>{tup({1, 2})});
  EXPECT_EQ(meet.sheaf.table("st")->keys, std::vector<std::string>{"(0,0)"});
}

TEST(GlueSheaves, VirtualTileOntoConcreteEdge) {
  TypeRegistry reg{int_type("int")};
  Sheaf ws(representable(reg, {"int", "int"}, {"x", "y"}));
  ws = set_table(ws, Table::concrete("xy", {tup({2, 3}), tup({4, 5})}));
  Sheaf tile(representable(reg, {"int", "int", "int"}, {"a", "b", "c"}));
  tile = set_table(tile, Table::virtual_table("abc", VirtualTable::addition()));
  auto g = glue_sheaves(ws, "xy", tile, "ab", SlotMatching::identity(1), CombinePolicy::Intersect);
  EXPECT_EQ(g.sheaf.table("xy")->size(), 2u);
  ASSERT_TRUE(g.sheaf.table("abc"));
  EXPECT_TRUE(g.sheaf.table("abc")->is_virtual());
  EXPECT_TRUE(validate_sheaf(g.sheaf).empty());
}

TEST(FoldSheaf, LoopKeepsEdgeRows) {
  TypeRegistry reg{text_type("person")};
  Sheaf sh(representable(reg, {"person", "person"}, {"P", "Q"}));
  sh = set_table(sh, Table::concrete("PQ", {tup({"a", "b"}), tup({"b", "a"}), tup({"b", "c"})}));
  auto f = fold_sheaf(sh, "P", "Q", SlotMatching::identity(0), CombinePolicy::Intersect);
  EXPECT_EQ(f.sheaf.schema().vertex_slots("PQ"), (std::vector<SimplexId>{"P", "P"}));
  // Vertex table: endpoints present at both ends, {a, b}; edge rows need both ends present.
  EXPECT_EQ(f.sheaf.table("P")->size(), 2u);
  EXPECT_EQ(f.sheaf.table("PQ")->rows, (std::vector<Tuple>{tup({"a", "b"}), tup({"b", "a"})}));
  auto u = fold_sheaf(sh, "P", "Q", SlotMatching::identity(0), CombinePolicy::UnionDedup);
  EXPECT_EQ(u.sheaf.table("P")->size(), 3u);
  EXPECT_EQ(u.sheaf.table("PQ")->size(), 3u);
}
