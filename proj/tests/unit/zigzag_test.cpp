#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "simplexdb/error.hpp"
#include "simplexdb/zigzag.hpp"

using namespace simplexdb;
using namespace fixtures;

namespace {

Tuple tup(std::initializer_list<Value> v) { return Tuple(v); }

std::multiset<Tuple> as_multiset(const std::vector<Tuple>& rows) { return {rows.begin(), rows.end()}; }

// P up E down P, three times, entering each loop through face 0 and leaving through face 1.
Zigzag three_loops() {
  Zigzag z{"P", {}};
  for (int k = 0; k < 3; ++k) {
    z.steps.push_back({Direction::Ascend, {0}, "E"});
    z.steps.push_back({Direction::Descend, {1}, "P"});
  }
  return z;
}

Sheaf rhombus(const std::vector<Tuple>& interactions, const std::vector<Tuple>& creations) {
  TypeRegistry reg{text_type("company"), date_type("date"), text_type("creation")};
  Sheaf inter(make_representable(reg, std::vector<std::string>{"company", "company", "date"},
                                 std::vector<std::string>{"x", "y", "t"}));
  inter = set_table(inter, Table::concrete("xyt", interactions));
  Sheaf made(make_representable(reg, std::vector<std::string>{"company", "company", "creation"},
                                std::vector<std::string>{"x", "y", "w"}));
  made = set_table(made, Table::concrete("xyw", creations));
  return glue_sheaves(inter, "xy", made, "xy", SlotMatching::identity(1), CombinePolicy::Intersect).sheaf;
}

}  // namespace

TEST(FromSequence, TwoTrianglePath) {
  auto s = two_triangles();
  auto z = zigzag_from_sequence(s, {"AB", "ABC", "C", "CD", "D"});
  ASSERT_EQ(z.steps.size(), 4u);
  EXPECT_EQ(z.steps[0].direction, Direction::Ascend);
  EXPECT_EQ(z.steps[1].direction, Direction::Descend);
  EXPECT_EQ(z.steps[2].direction, Direction::Ascend);
  EXPECT_EQ(z.steps[3].direction, Direction::Descend);
  EXPECT_EQ(z.steps[0].face_index, std::vector<int>{2});
  EXPECT_EQ(z.steps[1].face_index, (std::vector<int>{0, 1}));
  EXPECT_EQ(z.end(), "D");
}

TEST(FromSequence, SingleSimplex) {
  auto z = zigzag_from_sequence(two_triangles(), {"B"});
  EXPECT_TRUE(z.steps.empty());
  EXPECT_EQ(z.start, "B");
}

TEST(FromSequence, NonIncidentPairNamed) {
  try {
    zigzag_from_sequence(two_triangles(), {"AB", "CD"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotIncident);
    EXPECT_NE(std::string(e.what()).find("(AB, CD)"), std::string::npos);
  }
}

TEST(FromSequence, LoopAmbiguityAndOverride) {
  auto s = friendship_schema({"a"});
  auto z = zigzag_from_sequence(s, {"P", "E", "P"});
  EXPECT_EQ(z.steps[0].face_index, std::vector<int>{0});
  EXPECT_EQ(z.steps[1].face_index, std::vector<int>{0});
  auto o = zigzag_from_sequence(s, {"P", "E", "P"}, {{1, {1}}});
  EXPECT_EQ(o.steps[1].face_index, std::vector<int>{1});
  EXPECT_THROW(zigzag_from_sequence(s, {"P", "E"}, {{0, {0, 1}}}), Error);
}

TEST(Evaluate, Odometer) {
  auto sh = odometer_sheaf(3, 4);
  auto z = zigzag_from_sequence(sh.schema(), {"A", "AM", "M", "MB", "B"});
  auto sel = select_values(sh, "A", {tup({10}), tup({20})});
  auto r = evaluate(sh, z, sel);
  EXPECT_EQ(as_multiset(r.end_table.rows), as_multiset({tup({17}), tup({27})}));
  EXPECT_EQ(as_multiset(r.graph.rows), as_multiset({tup({10, 17}), tup({20, 27})}));
  EXPECT_EQ(r.back_map.size(), 2u);
}

TEST(Evaluate, FriendshipThreeLoops) {
  auto sh = friendship_sheaf({"a", "b", "c"}, {{"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "b"}});
  auto r = evaluate(sh, three_loops(), select_values(sh, "P", {tup({"a"})}));
  EXPECT_EQ(as_multiset(r.end_table.rows), as_multiset({tup({"b"}), tup({"b"})}));
  auto dedup = graph_table(r, true);
  EXPECT_EQ(dedup.rows, std::vector<Tuple>{tup({"a", "b"})});
}

TEST(Evaluate, RhombusDesk) {
  auto sh = rhombus({tup({"X", "Y", "2024-01-01"}), tup({"Y", "Z", "2024-01-02"})}, {tup({"X", "Y", "widget"})});
  auto z = zigzag_from_sequence(sh.schema(), {"t", "xyt", "xy", "xyw", "w"});
  auto hit = evaluate(sh, z, select_values(sh, "t", {tup({"2024-01-01"})}));
  EXPECT_EQ(hit.end_table.rows, std::vector<Tuple>{tup({"widget"})});
  auto miss = evaluate(sh, z, select_values(sh, "t", {tup({"2024-01-02"})}));
  EXPECT_TRUE(miss.end_table.rows.empty());
}

TEST(Evaluate, ZeroStep) {
  auto sh = friendship_sheaf({"a", "b"}, {{"a", "b"}});
  auto sel = select_values(sh, "P", {tup({"b"})});
  auto r = evaluate(sh, Zigzag{"P", {}}, sel);
  EXPECT_EQ(r.end_table.rows, sel.values);
  EXPECT_EQ(r.back_map, KeyMap{0});
  EXPECT_EQ(r.graph.rows, std::vector<Tuple>{tup({"b", "b"})});
}

TEST(Evaluate, EmptySelectionEmptyGraph) {
  auto sh = odometer_sheaf(3, 4);
  auto z = zigzag_from_sequence(sh.schema(), {"A", "AM", "M"});
  auto r = evaluate(sh, z, select_values(sh, "A", {}));
  EXPECT_TRUE(r.graph.rows.empty());
}

TEST(Evaluate, SelectionMustSitAtStart) {
  auto sh = odometer_sheaf(3, 4);
  auto z = zigzag_from_sequence(sh.schema(), {"A", "AM"});
  try {
    evaluate(sh, z, select_values(sh, "M", {tup({1})}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SimplexMismatch);
  }
}

TEST(Evaluate, AscendIntoOpenIntegerTableFails) {
  TypeRegistry reg{int_type("int")};
  Sheaf sh(make_representable(reg, std::vector<std::string>{"int", "int"}, std::vector<std::string>{"s", "t"}));
  auto z = zigzag_from_sequence(sh.schema(), {"s", "st"});
  try {
    evaluate(sh, z, select_values(sh, "s", {tup({1})}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotEnumerable);
  }
}

TEST(Evaluate, AscendMultipliesAlongFibers) {
  auto sh = friendship_sheaf({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}, {"b", "c"}});
  Zigzag z{"P", {{Direction::Ascend, {1}, "E"}}};
  auto r = evaluate(sh, z, select_values(sh, "P", {tup({"a"})}));
  EXPECT_EQ(r.end_table.size(), 2u);
  EXPECT_EQ(r.end_table.keys, (std::vector<std::string>{"(0,0)", "(0,1)"}));
}

TEST(Evaluate, ConcatenationComposes) {
  auto sh = friendship_sheaf({"a", "b", "c"}, {{"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "b"}});
  Zigzag once{"P", {{Direction::Ascend, {0}, "E"}, {Direction::Descend, {1}, "P"}}};
  auto twice = concatenate(once, once);
  auto sel = select_all(sh, "P");
  auto first = evaluate(sh, once, sel);
  // Feed the end rows of the first leg back in as a mapped selection.
  auto mid = select_mapped(sh, first.end_table, [&] {
    KeyMap km;
    for (auto r : first.end_rows) km.push_back(*r);
    return km;
  }());
  auto second = evaluate(sh, once, mid);
  auto whole = evaluate(sh, twice, sel);
  std::multiset<Tuple> composed;
  for (std::size_t r = 0; r < second.end_table.size(); ++r) {
    Tuple row = sel.values[first.back_map[second.back_map[r]]];
    row.push_back(second.end_table.rows[r][0]);
    composed.insert(row);
  }
  EXPECT_EQ(as_multiset(whole.graph.rows), composed);
}

TEST(QueriesEqual, Reflexive) {
  auto sh = friendship_sheaf({"a", "b", "c"}, {{"a", "b"}, {"b", "a"}});
  auto sel = select_values(sh, "P", {tup({"a"})});
  EXPECT_TRUE(queries_equal(sh, three_loops(), three_loops(), sel).equal);
}

TEST(QueriesEqual, ZeroStepVersusLoopOnce) {
  auto sh = friendship_sheaf({"a", "b", "c"}, {{"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "b"}});
  auto sel = select_values(sh, "P", {tup({"a"})});
  Zigzag once{"P", {{Direction::Ascend, {0}, "E"}, {Direction::Descend, {1}, "P"}}};
  auto cmp = queries_equal(sh, Zigzag{"P", {}}, once, sel);
  EXPECT_FALSE(cmp.equal);
  ASSERT_TRUE(cmp.witness);
  EXPECT_EQ(*cmp.witness, tup({"a", "a"}));
  EXPECT_EQ(cmp.count_first, 1u);
  EXPECT_EQ(cmp.count_second, 0u);
  auto back = queries_equal(sh, once, Zigzag{"P", {}}, sel);
  EXPECT_FALSE(back.equal);
  EXPECT_EQ(back.witness, cmp.witness);
}

TEST(QueriesEqual, ConeWithEqualTriangles) {
  // Two triangles over the same boundary: paths through either agree when their tables do.
  TypeRegistry reg{int_type("int")};
  Schema s(reg);
  s.insert({"a", 0, {}, "int"});
  s.insert({"b", 0, {}, "int"});
  s.insert({"c", 0, {}, "int"});
  s.insert({"ab", 1, {"b", "a"}, std::nullopt});
  s.insert({"ac", 1, {"c", "a"}, std::nullopt});
  s.insert({"bc", 1, {"c", "b"}, std::nullopt});
  s.insert({"T1", 2, {"bc", "ac", "ab"}, std::nullopt});
  s.insert({"T2", 2, {"bc", "ac", "ab"}, std::nullopt});
  ASSERT_TRUE(validate_schema(s).empty());
  Sheaf sh(s);
  const std::vector<Tuple> rows{tup({1, 2, 3}), tup({1, 5, 6}), tup({4, 2, 3})};
  sh = set_table(sh, Table::concrete("T1", rows));
  sh = set_table(sh, Table::concrete("T2", rows));
  auto z1 = zigzag_from_sequence(s, {"a", "T1", "c"});
  auto z2 = zigzag_from_sequence(s, {"a", "T2", "c"});
  EXPECT_TRUE(queries_equal(sh, z1, z2, select_all(sh, "a")).equal);
  EXPECT_THROW(queries_equal(sh, z1, zigzag_from_sequence(s, {"a", "T1", "b"}), select_all(sh, "a")), Error);
}

TEST(Selection, KeysAndMapping) {
  auto sh = friendship_sheaf({"a", "b", "c"}, {{"a", "b"}});
  auto s = select_keys(sh, "E", {"0"});
  EXPECT_EQ(s.values, std::vector<Tuple>{tup({"a", "b"})});
  EXPECT_THROW(select_keys(sh, "E", {"9"}), Error);
  EXPECT_THROW(select_mapped(sh, Table::concrete("P", {tup({"a"})}), KeyMap{1}), Error);
}
