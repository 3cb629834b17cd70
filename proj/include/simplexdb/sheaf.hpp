#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simplexdb/schema.hpp"
#include "simplexdb/types.hpp"
#include "simplexdb/virtual_table.hpp"

namespace simplexdb {

/// Rows attached to one simplex. A concrete table stores keyed tuples; a
/// virtual table stores a built-in relation and no rows.
struct Table {
  SimplexId simplex;
  std::vector<std::string> keys;
  std::vector<Tuple> rows;
  std::optional<VirtualTable> virt;

  /// Keys "0", "1", ... in row order.
  static Table concrete(SimplexId simplex, std::vector<Tuple> rows);
  static Table keyed(SimplexId simplex, std::vector<std::string> keys, std::vector<Tuple> rows);
  static Table virtual_table(SimplexId simplex, VirtualTable table);

  bool is_virtual() const { return virt.has_value(); }
  std::size_t size() const { return rows.size(); }
  std::optional<std::size_t> find_key(const std::string& key) const;
  std::vector<std::size_t> rows_with_value(const Tuple& value) const;

  bool operator==(const Table&) const = default;
};

/// Row index of the face table for each row of the coface table.
using KeyMap = std::vector<std::size_t>;

/// Tables over a schema. A simplex with no table behaves as gamma. Key maps
/// exist exactly for (simplex, face) pairs where both tables are concrete.
class Sheaf {
 public:
  Sheaf() = default;
  explicit Sheaf(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const { return schema_; }

  /// nullptr when no table was set.
  const Table* table(const SimplexId& id) const;
  /// The table, or a gamma virtual table when none was set.
  Table effective_table(const SimplexId& id) const;
  bool is_concrete(const SimplexId& id) const;
  const KeyMap* key_map(const SimplexId& id, int face) const;

  const std::map<SimplexId, Table>& tables() const { return tables_; }
  const std::map<std::pair<SimplexId, int>, KeyMap>& key_maps() const { return key_maps_; }

  /// Raw mutation for construction and deserialization; run validate_sheaf after.
  void put_table(Table table);
  void put_key_map(const SimplexId& id, int face, KeyMap map);
  void erase_table(const SimplexId& id);
  void erase_key_map(const SimplexId& id, int face);

  bool operator==(const Sheaf&) const = default;

 private:
  Schema schema_;
  std::map<SimplexId, Table> tables_;
  std::map<std::pair<SimplexId, int>, KeyMap> key_maps_;
};

Tuple drop_slot(const Tuple& tuple, int slot);
Tuple drop_slots(const Tuple& tuple, std::vector<int> slots);

bool conforms(const Schema& schema, const SimplexId& simplex, const Tuple& tuple);

/// The universal table on `simplex`.
Table gamma(const Schema& schema, const SimplexId& simplex);

/// Every tuple of a virtual table; throws NotEnumerable when infinite.
std::vector<Tuple> enumerate_virtual(const Schema& schema, const SimplexId& simplex,
                                     const VirtualTable& table);

/// Whether `tuple` lies in the table of `simplex` after restricting through
/// every concrete face (virtual and absent tables only admit tuples whose
/// faces are admitted).
bool effective_member(const Sheaf& sheaf, const SimplexId& simplex, const Tuple& tuple);

/// Attaches a table. Key maps not given are derived by value lookup; absent
/// faces receive the distinct projections of their concrete cofaces. Key maps
/// from concrete cofaces into `table.simplex` are re-derived the same way.
Sheaf set_table(const Sheaf& sheaf, Table table,
                const std::map<int, KeyMap>& key_maps = {});

/// Distinct projections of `table` (on a coface of `face_simplex` via face `face`).
Table project_table(const Sheaf& sheaf, const SimplexId& face_simplex, int face, const Table& table);

/// Right adjoint to restriction along one face: rows of the coface whose face
/// value comes from `table`, completed through the coface's table.
Table pushforward_universal(const Sheaf& sheaf, const SimplexId& coface, int face, const Table& table);

/// Rows present in both tables; keys "(k1,k2)".
Table fiber_product(const Schema& schema, const Table& a, const Table& b);

enum class UnionMode { All, Dedup };
Table table_union(const Table& a, const Table& b, UnionMode mode);

ValidationReport validate_sheaf(const Sheaf& sheaf);

enum class CombinePolicy { Intersect, UnionAll, UnionDedup };
std::string_view to_string(CombinePolicy policy);
CombinePolicy parse_policy(std::string_view text);

struct SheafGlueResult {
  Sheaf sheaf;
  Embedding left;
  Embedding right;
};

/// Glues the schemas and combines tables: simplices that were identified get
/// the policy combination of their sources, and every other table keeps the
/// rows whose faces survive.
SheafGlueResult glue_sheaves(const Sheaf& left, const SimplexId& x1, const Sheaf& right,
                             const SimplexId& x2, const SlotMatching& matching,
                             CombinePolicy policy);

struct SheafFoldResult {
  Sheaf sheaf;
  Embedding embedding;
};

SheafFoldResult fold_sheaf(const Sheaf& sheaf, const SimplexId& x1, const SimplexId& x2,
                           const SlotMatching& matching, CombinePolicy policy);

SheafGlueResult disjoint_union(const Sheaf& left, const Sheaf& right);

}  // namespace simplexdb
