#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "simplexdb/types.hpp"

namespace simplexdb {

using SimplexId = std::string;

/// An n-simplex is its face array: face i deletes vertex slot i. Only
/// 0-simplices carry a datatype label.
struct Simplex {
  SimplexId id;
  int dim = 0;
  std::vector<SimplexId> faces;
  std::optional<std::string> label;

  bool operator==(const Simplex&) const = default;
};

/// Bijection between the vertex slots of two simplices of equal dimension:
/// left slot k is matched with right slot `right_slot[k]`.
struct SlotMatching {
  std::vector<int> right_slot;

  static SlotMatching identity(int dim);
  bool is_identity() const;
  bool operator==(const SlotMatching&) const = default;
};

struct FaceRef {
  int index = 0;
  SimplexId simplex;
  bool operator==(const FaceRef&) const = default;
};

struct CofaceRef {
  SimplexId simplex;
  int index = 0;
  auto operator<=>(const CofaceRef&) const = default;
};

struct Violation {
  enum class Kind {
    DanglingFace,
    FaceCount,
    FaceDimension,
    SimplicialIdentity,
    Label,
    UnknownDataType,
    NegativeDimension,
    Conformance,
    KeyMap,
    Composition,
    DuplicateKey,
  };
  Kind kind;
  SimplexId simplex;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

std::string_view to_string(Violation::Kind kind);

/// A symmetric semi-simplicial set with labeled vertices. Values are treated as
/// immutable once built; every operation below returns a fresh schema.
class Schema {
 public:
  Schema() = default;
  explicit Schema(TypeRegistry registry) : registry_(std::move(registry)) {}

  const TypeRegistry& registry() const { return registry_; }

  /// Raw insertion used while constructing a schema. No validation happens
  /// here; run validate_schema on the finished value.
  void insert(Simplex simplex);

  bool contains(const SimplexId& id) const { return simplices_.count(id) != 0; }
  const Simplex& at(const SimplexId& id) const;
  const Simplex* find(const SimplexId& id) const;
  const std::map<SimplexId, Simplex>& simplices() const { return simplices_; }
  std::size_t size() const { return simplices_.size(); }
  std::size_t count_of_dim(int dim) const;

  std::vector<FaceRef> faces(const SimplexId& id) const;
  /// Every (simplex, face index) whose face is `id`, sorted.
  std::vector<CofaceRef> cofaces(const SimplexId& id) const;

  /// Vertex reached from each slot by deleting all other slots.
  std::vector<SimplexId> vertex_slots(const SimplexId& id) const;
  std::vector<std::string> slot_labels(const SimplexId& id) const;
  const DataType& slot_type(const SimplexId& id, int slot) const;

  /// Iterated face obtained by deleting the given slots (any order).
  SimplexId face_along(const SimplexId& id, std::span<const int> deleted_slots) const;

  /// Every deleted-slot set (sorted ascending) whose iterated face is `face`,
  /// in lexicographic order. Empty when `face` is not an iterated face of `id`.
  std::vector<std::vector<int>> face_paths(const SimplexId& id, const SimplexId& face) const;

  /// `id` together with all of its iterated faces.
  std::set<SimplexId> closure(const SimplexId& id) const;
  /// Every other simplex having `id` as an iterated face.
  std::set<SimplexId> star(const SimplexId& id) const;

  bool operator==(const Schema&) const = default;

 private:
  TypeRegistry registry_;
  std::map<SimplexId, Simplex> simplices_;
};

/// Simplex ids of the symmetric representable: one simplex per non-empty slot
/// subset. With vertex names given, ids concatenate the names of the subset
/// (separated by `|` unless all names are single characters).
Schema make_representable(const TypeRegistry& registry, std::span<const std::string> labels,
                          std::span<const std::string> vertex_names = {});

/// Id that make_representable assigns to the full simplex.
SimplexId representable_top(std::size_t slot_count, std::span<const std::string> vertex_names = {});

ValidationReport validate_schema(const Schema& schema);

/// Where a source simplex ended up: its id in the result and the slot
/// permutation (result slot p holds source slot perm[p]).
struct Placement {
  SimplexId id;
  std::vector<int> perm;
  bool operator==(const Placement&) const = default;
};

using Embedding = std::map<SimplexId, Placement>;

struct GlueResult {
  Schema schema;
  Embedding left;
  Embedding right;
};

struct FoldResult {
  Schema schema;
  Embedding embedding;
};

/// Pushout identifying the closure of `x1` in `left` with the closure of `x2`
/// in `right` along `matching`. Identifications propagate to faces and are
/// closed transitively. Right ids that clash with left ids get an `r:` prefix.
GlueResult glue(const Schema& left, const SimplexId& x1, const Schema& right,
                const SimplexId& x2, const SlotMatching& matching);

/// Same construction with both simplices in one schema (e.g. dropping one
/// endpoint of an edge on the other to make a loop).
FoldResult fold(const Schema& schema, const SimplexId& x1, const SimplexId& x2,
                const SlotMatching& matching);

/// Disjoint union; right ids are renamed as in glue.
GlueResult disjoint_union(const Schema& left, const Schema& right);

/// Rebuilds the schema as the colimit of the representables of its simplices,
/// glued along their codimension-one faces.
Schema reassemble(const Schema& schema);

/// Bijection on simplices preserving dimension, face arrays and labels.
std::optional<std::map<SimplexId, SimplexId>> find_isomorphism(const Schema& a, const Schema& b);
inline bool isomorphic(const Schema& a, const Schema& b) { return find_isomorphism(a, b).has_value(); }

}  // namespace simplexdb
