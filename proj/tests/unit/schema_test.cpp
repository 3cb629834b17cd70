#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "simplexdb/error.hpp"

using namespace simplexdb;
using namespace fixtures;

namespace {

TypeRegistry people_registry() {
  return TypeRegistry{text_type("First"), text_type("Last"), text_type("SSN"), text_type("A"),
                      text_type("B"),     text_type("C"),    text_type("D")};
}

std::size_t count_dim(const Schema& s, int dim) { return s.count_of_dim(dim); }

}  // namespace

TEST(Representable, SingleVertex) {
  auto s = representable(people_registry(), {"SSN"});
  EXPECT_EQ(s.size(), 1u);
  EXPECT_TRUE(validate_schema(s).empty());
}

TEST(Representable, TriangleHasSevenSimplices) {
  auto s = representable(people_registry(), {"First", "Last", "SSN"});
  EXPECT_EQ(s.size(), 7u);
  EXPECT_EQ(count_dim(s, 2), 1u);
  EXPECT_EQ(count_dim(s, 1), 3u);
  EXPECT_EQ(count_dim(s, 0), 3u);
  EXPECT_TRUE(validate_schema(s).empty());
}

TEST(Representable, TetrahedronHasFifteenSimplices) {
  auto s = representable(people_registry(), {"A", "B", "C", "D"});
  EXPECT_EQ(s.size(), 15u);
  EXPECT_EQ(count_dim(s, 3), 1u);
  EXPECT_EQ(count_dim(s, 2), 4u);
  EXPECT_EQ(count_dim(s, 1), 6u);
  EXPECT_EQ(count_dim(s, 0), 4u);
  EXPECT_TRUE(validate_schema(s).empty());
}

TEST(Representable, UnknownLabelThrows) {
  try {
    representable(people_registry(), {"Nope"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownDataType);
  }
}

TEST(Representable, NamedIds) {
  auto s = representable(people_registry(), {"A", "B", "C"}, {"A", "B", "C"});
  EXPECT_TRUE(s.contains("ABC"));
  EXPECT_EQ(s.at("ABC").faces, (std::vector<SimplexId>{"BC", "AC", "AB"}));
  EXPECT_EQ(representable_top(3, std::vector<std::string>{"A", "B", "C"}), "ABC");
  auto multi = representable(people_registry(), {"A", "B"}, {"left", "right"});
  EXPECT_TRUE(multi.contains("left|right"));
}

TEST(VertexSlots, VertexIsItself) {
  auto s = representable(people_registry(), {"SSN"}, {"v"});
  EXPECT_EQ(s.vertex_slots("v"), std::vector<SimplexId>{"v"});
}

TEST(VertexSlots, TriangleSlotsInOrder) {
  auto s = representable(people_registry(), {"A", "B", "C"}, {"A", "B", "C"});
  EXPECT_EQ(s.vertex_slots("ABC"), (std::vector<SimplexId>{"A", "B", "C"}));
  EXPECT_EQ(s.slot_labels("ABC"), (std::vector<std::string>{"A", "B", "C"}));
}

TEST(VertexSlots, LoopRepeatsVertex) {
  auto s = friendship_schema({"a", "b"});
  EXPECT_TRUE(validate_schema(s).empty());
  EXPECT_EQ(s.vertex_slots("E"), (std::vector<SimplexId>{"P", "P"}));
}

TEST(VertexSlots, UnknownSimplexThrows) {
  auto s = friendship_schema({"a"});
  EXPECT_THROW(s.vertex_slots("zzz"), Error);
}

TEST(Faces, VertexHasNone) {
  auto s = edge_and_triangle();
  EXPECT_TRUE(s.faces("A").empty());
}

TEST(Faces, TriangleBoundary) {
  auto s = edge_and_triangle();
  auto f = s.faces("BCD");
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].simplex, "CD");
  EXPECT_EQ(f[1].simplex, "BD");
  EXPECT_EQ(f[2].simplex, "BC");
}

TEST(Faces, CofacesOfGluedVertex) {
  auto s = edge_and_triangle();
  std::set<SimplexId> cof;
  for (const auto& c : s.cofaces("B")) cof.insert(c.simplex);
  // Direct cofaces: the edges containing B. The triangle reaches B only through an edge.
  EXPECT_EQ(cof, (std::set<SimplexId>{"AB", "BC", "BD"}));
  EXPECT_EQ(s.star("B"), (std::set<SimplexId>{"AB", "BC", "BD", "BCD"}));
}

TEST(Validate, InjectedIdentityDefect) {
  auto s = representable(people_registry(), {"A", "B", "C"}, {"A", "B", "C"});
  Schema broken(s.registry());
  for (auto [id, simplex] : s.simplices()) {
    if (id == "ABC") std::swap(simplex.faces[0], simplex.faces[1]);
    broken.insert(simplex);
  }
  auto report = validate_schema(broken);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].kind, Violation::Kind::SimplicialIdentity);
  EXPECT_EQ(report[0].simplex, "ABC");
}

TEST(Validate, DanglingFace) {
  TypeRegistry reg{text_type("A")};
  Schema s(reg);
  s.insert({"a", 0, {}, "A"});
  s.insert({"e", 1, {"a", "ghost"}, std::nullopt});
  auto report = validate_schema(s);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].kind, Violation::Kind::DanglingFace);
}

TEST(Validate, LabelRules) {
  TypeRegistry reg{text_type("A")};
  Schema s(reg);
  s.insert({"a", 0, {}, std::nullopt});
  s.insert({"b", 0, {}, "Missing"});
  s.insert({"e", 1, {"a", "a"}, "A"});
  auto report = validate_schema(s);
  ASSERT_EQ(report.size(), 3u);
}

TEST(Glue, EdgeOntoTriangleAtVertex) {
  auto s = edge_and_triangle();
  EXPECT_TRUE(validate_schema(s).empty());
  EXPECT_EQ(s.size(), 9u);  // 3 + 7 - 1 by inclusion-exclusion
  EXPECT_EQ(count_dim(s, 0), 4u);
  EXPECT_EQ(count_dim(s, 1), 4u);
  EXPECT_EQ(count_dim(s, 2), 1u);
}

TEST(Glue, EmbeddingsPointIntoResult) {
  TypeRegistry reg{text_type("A"), text_type("B"), text_type("C"), text_type("D")};
  auto edge = representable(reg, {"A", "B"}, {"A", "B"});
  auto tri = representable(reg, {"B", "C", "D"}, {"B", "C", "D"});
  auto g = glue(edge, "B", tri, "B", SlotMatching::identity(0));
  EXPECT_EQ(g.left.at("B").id, g.right.at("B").id);
  EXPECT_NE(g.left.at("A").id, g.right.at("C").id);
  for (const auto& [_, p] : g.right) EXPECT_TRUE(g.schema.contains(p.id));
}

TEST(Glue, VertexOnVertexMakesLoop) {
  TypeRegistry reg{text_type("person")};
  auto edge = representable(reg, {"person", "person"}, {"P", "Q"});
  auto f = fold(edge, "P", "Q", SlotMatching::identity(0));
  EXPECT_TRUE(validate_schema(f.schema).empty());
  EXPECT_EQ(f.schema.size(), 2u);
  EXPECT_EQ(f.schema.vertex_slots("PQ"), (std::vector<SimplexId>{"P", "P"}));
}

TEST(Glue, RhombusCounts) {
  TypeRegistry reg{text_type("company"), date_type("date"), text_type("creation")};
  auto inter = representable(reg, {"company", "company", "date"}, {"x", "y", "t"});
  auto made = representable(reg, {"company", "company", "creation"}, {"x", "y", "w"});
  auto g = glue(inter, "xy", made, "xy", SlotMatching::identity(1));
  EXPECT_TRUE(validate_schema(g.schema).empty());
  EXPECT_EQ(count_dim(g.schema, 2), 2u);
  EXPECT_EQ(count_dim(g.schema, 1), 5u);
  EXPECT_EQ(count_dim(g.schema, 0), 4u);
}

TEST(Glue, LabelMismatchThrows) {
  TypeRegistry reg{text_type("A"), text_type("B")};
  auto a = representable(reg, {"A"}, {"a"});
  auto b = representable(reg, {"B"}, {"b"});
  try {
    glue(a, "a", b, "b", SlotMatching::identity(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LabelMismatch);
  }
}

TEST(Glue, DimensionMismatchThrows) {
  TypeRegistry reg{text_type("A")};
  auto a = representable(reg, {"A"}, {"a"});
  auto b = representable(reg, {"A", "A"}, {"b", "c"});
  try {
    glue(a, "a", b, "bc", SlotMatching::identity(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Glue, PermutedMatchingIdentifiesCrosswise) {
  TypeRegistry reg{text_type("A")};
  auto left = representable(reg, {"A", "A"}, {"a", "b"});
  auto right = representable(reg, {"A", "A", "A"}, {"p", "q", "r"});
  // Left slot 0 (a) meets right slot 1 (q); left slot 1 (b) meets right slot 0 (p).
  auto g = glue(left, "ab", right, "pq", SlotMatching{{1, 0}});
  EXPECT_TRUE(validate_schema(g.schema).empty());
  EXPECT_EQ(g.schema.size(), 7u);
  EXPECT_EQ(g.right.at("q").id, g.left.at("a").id);
  EXPECT_EQ(g.right.at("p").id, g.left.at("b").id);
  EXPECT_EQ(g.right.at("pq").id, "ab");
  EXPECT_EQ(g.right.at("pq").perm, (std::vector<int>{1, 0}));
}

TEST(Glue, InclusionExclusionOnRandomRepresentables) {
  std::mt19937 rng(7);
  TypeRegistry reg{int_type("n")};
  for (int trial = 0; trial < 40; ++trial) {
    const int p = static_cast<int>(rng() % 4);
    const int q = static_cast<int>(rng() % 4);
    const int d = static_cast<int>(rng() % (std::min(p, q) + 1));
    std::vector<std::string> ln, rn, labels_l(p + 1, "n"), labels_r(q + 1, "n");
    for (int i = 0; i <= p; ++i) ln.push_back("l" + std::to_string(i));
    for (int i = 0; i <= q; ++i) rn.push_back("r" + std::to_string(i));
    auto left = make_representable(reg, labels_l, ln);
    auto right = make_representable(reg, labels_r, rn);
    std::vector<std::string> lf(ln.begin(), ln.begin() + d + 1), rf(rn.begin(), rn.begin() + d + 1);
    auto g = glue(left, representable_top(lf.size(), lf), right, representable_top(rf.size(), rf),
                  SlotMatching::identity(d));
    const std::size_t expected = ((1u << (p + 1)) - 1) + ((1u << (q + 1)) - 1) - ((1u << (d + 1)) - 1);
    EXPECT_EQ(g.schema.size(), expected) << p << " " << q << " " << d;
    EXPECT_TRUE(validate_schema(g.schema).empty());
  }
}

TEST(Glue, CommutesUpToIsomorphism) {
  TypeRegistry reg{text_type("A"), text_type("B"), text_type("C"), text_type("D")};
  auto edge = representable(reg, {"A", "B"}, {"A", "B"});
  auto tri = representable(reg, {"B", "C", "D"}, {"B", "C", "D"});
  auto one = glue(edge, "B", tri, "B", SlotMatching::identity(0)).schema;
  auto two = glue(tri, "B", edge, "B", SlotMatching::identity(0)).schema;
  EXPECT_TRUE(isomorphic(one, two));
}

TEST(Reassemble, SingleVertex) {
  auto s = representable(people_registry(), {"A"}, {"v"});
  EXPECT_TRUE(isomorphic(reassemble(s), s));
}

TEST(Reassemble, EdgeAndTriangle) {
  auto s = edge_and_triangle();
  auto r = reassemble(s);
  EXPECT_EQ(r.size(), s.size());
  EXPECT_TRUE(isomorphic(r, s));
}

TEST(Reassemble, RhombusAndLoop) {
  TypeRegistry reg{text_type("company"), date_type("date"), text_type("creation")};
  auto inter = representable(reg, {"company", "company", "date"}, {"x", "y", "t"});
  auto made = representable(reg, {"company", "company", "creation"}, {"x", "y", "w"});
  auto rh = glue(inter, "xy", made, "xy", SlotMatching::identity(1)).schema;
  EXPECT_TRUE(isomorphic(reassemble(rh), rh));
  auto loop = friendship_schema({"a"});
  EXPECT_TRUE(isomorphic(reassemble(loop), loop));
}

TEST(Isomorphism, DistinguishesShapes) {
  EXPECT_FALSE(isomorphic(two_triangles(), edge_and_triangle()));
}
