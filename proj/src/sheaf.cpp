#include "simplexdb/sheaf.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>

#include "simplexdb/error.hpp"

namespace simplexdb {

namespace {

constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();

std::vector<std::string> sequential_keys(std::size_t n) {
  std::vector<std::string> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = std::to_string(i);
  return keys;
}

std::string pair_key(const std::vector<std::string>& parts) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  return out + ")";
}

Tuple permute(const Tuple& t, const std::vector<int>& perm) {
  Tuple out(t.size());
  for (std::size_t p = 0; p < t.size(); ++p) out[p] = t[static_cast<std::size_t>(perm[p])];
  return out;
}

void throw_report(const ValidationReport& r, const std::string& what) {
  throw Error(ErrorCode::InvalidSheaf, what + ": " + r.front().message, r.front().simplex);
}

// Row of `face_table` holding `value`; throws when there is none or several.
std::size_t unique_row(const Table& face_table, const Tuple& value, const SimplexId& from) {
  const auto rows = face_table.rows_with_value(value);
  if (rows.empty()) {
    throw Error(ErrorCode::KeyMapViolation,
                "no row " + to_string(value) + " in face table " + face_table.simplex, from);
  }
  if (rows.size() > 1) {
    throw Error(ErrorCode::AmbiguousKeyMap,
                "value " + to_string(value) + " occurs more than once in face table " +
                    face_table.simplex,
                from);
  }
  return rows.front();
}

void derive_key_map(Sheaf& sheaf, const SimplexId& id, int face) {
  const auto& s = sheaf.schema().at(id);
  const auto& t = *sheaf.table(id);
  const auto& ft = *sheaf.table(s.faces[static_cast<std::size_t>(face)]);
  KeyMap km(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) km[r] = unique_row(ft, drop_slot(t.rows[r], face), id);
  sheaf.put_key_map(id, face, std::move(km));
}

void check_rows(const Schema& schema, const Table& t) {
  if (t.keys.size() != t.rows.size()) {
    throw Error(ErrorCode::InvalidArgument, "key count differs from row count", t.simplex);
  }
  std::set<std::string> seen;
  for (const auto& k : t.keys) {
    if (!seen.insert(k).second) throw Error(ErrorCode::InvalidArgument, "duplicate row key " + k, t.simplex);
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (!conforms(schema, t.simplex, t.rows[r])) {
      throw Error(ErrorCode::NonConforming, "row " + t.keys[r] + " " + to_string(t.rows[r]) +
                  " does not conform", t.simplex);
    }
  }
}

void set_table_impl(Sheaf& out, Table t, const std::map<int, KeyMap>& key_maps) {
  const auto& schema = out.schema();
  if (!schema.contains(t.simplex)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", t.simplex);
  const auto id = t.simplex;
  const auto& s = schema.at(id);
  for (int i = 0; i <= s.dim && s.dim > 0; ++i) out.erase_key_map(id, i);

  if (t.is_virtual()) {
    check_virtual(schema, id, *t.virt);
    if (!key_maps.empty()) throw Error(ErrorCode::KeyMapViolation, "virtual tables take no key maps", id);
    out.put_table(std::move(t));
    for (const auto& c : schema.cofaces(id)) {
      out.erase_key_map(c.simplex, c.index);
      if (!out.is_concrete(c.simplex)) continue;
      for (const auto& row : out.table(c.simplex)->rows) {
        if (!effective_member(out, id, drop_slot(row, c.index))) {
          throw Error(ErrorCode::KeyMapViolation,
                      "row " + to_string(row) + " of " + c.simplex + " falls outside the virtual face",
                      id);
        }
      }
    }
    return;
  }

  check_rows(schema, t);
  for (const auto& [i, _] : key_maps) {
    if (i < 0 || i > s.dim || s.dim == 0) throw Error(ErrorCode::FaceIndexOutOfRange, "key map face out of range", id);
  }
  const Tuple dummy;
  out.put_table(t);
  for (int i = 0; i <= s.dim && s.dim > 0; ++i) {
    const auto& f = s.faces[static_cast<std::size_t>(i)];
    if (auto it = key_maps.find(i); it != key_maps.end()) {
      if (!out.is_concrete(f)) {
        throw Error(ErrorCode::KeyMapViolation, "key map given for a face without a concrete table", id);
      }
      const auto& ft = *out.table(f);
      const auto& km = it->second;
      if (km.size() != t.size()) throw Error(ErrorCode::KeyMapViolation, "key map has the wrong length", id);
      for (std::size_t r = 0; r < km.size(); ++r) {
        if (km[r] >= ft.size() || ft.rows[km[r]] != drop_slot(t.rows[r], i)) {
          throw Error(ErrorCode::KeyMapViolation,
                      "key map sends row " + t.keys[r] + " to a row with a different value", id);
        }
      }
      out.put_key_map(id, i, km);
    } else if (out.is_concrete(f)) {
      derive_key_map(out, id, i);
    } else if (out.table(f)) {
      for (const auto& row : t.rows) {
        if (!effective_member(out, f, drop_slot(row, i))) {
          throw Error(ErrorCode::KeyMapViolation,
                      "row " + to_string(row) + " falls outside the virtual face " + f, id);
        }
      }
    } else {
      // Absent face: the distinct projections of every concrete coface.
      std::vector<Tuple> image;
      std::set<Tuple> seen;
      auto take = [&](const Table& src, int face) {
        for (const auto& row : src.rows) {
          auto v = drop_slot(row, face);
          if (seen.insert(v).second) image.push_back(std::move(v));
        }
      };
      take(t, i);
      for (const auto& c : schema.cofaces(f)) {
        if (c.simplex != id && out.is_concrete(c.simplex)) take(*out.table(c.simplex), c.index);
      }
      set_table_impl(out, Table::concrete(f, std::move(image)), {});
    }
  }
  for (const auto& c : schema.cofaces(id)) {
    if (c.simplex == id || !out.is_concrete(c.simplex)) continue;
    derive_key_map(out, c.simplex, c.index);
  }
}

}  // namespace

Table Table::concrete(SimplexId simplex, std::vector<Tuple> rows) {
  auto keys = sequential_keys(rows.size());
  return Table{std::move(simplex), std::move(keys), std::move(rows), std::nullopt};
}

Table Table::keyed(SimplexId simplex, std::vector<std::string> keys, std::vector<Tuple> rows) {
  return Table{std::move(simplex), std::move(keys), std::move(rows), std::nullopt};
}

Table Table::virtual_table(SimplexId simplex, VirtualTable table) {
  return Table{std::move(simplex), {}, {}, std::move(table)};
}

std::optional<std::size_t> Table::find_key(const std::string& key) const {
  auto it = std::find(keys.begin(), keys.end(), key);
  if (it == keys.end()) return std::nullopt;
  return static_cast<std::size_t>(it - keys.begin());
}

std::vector<std::size_t> Table::rows_with_value(const Tuple& value) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] == value) out.push_back(r);
  }
  return out;
}

const Table* Sheaf::table(const SimplexId& id) const {
  auto it = tables_.find(id);
  return it == tables_.end() ? nullptr : &it->second;
}

Table Sheaf::effective_table(const SimplexId& id) const {
  if (const auto* t = table(id)) return *t;
  return gamma(schema_, id);
}

bool Sheaf::is_concrete(const SimplexId& id) const {
  const auto* t = table(id);
  return t && !t->is_virtual();
}

const KeyMap* Sheaf::key_map(const SimplexId& id, int face) const {
  auto it = key_maps_.find({id, face});
  return it == key_maps_.end() ? nullptr : &it->second;
}

void Sheaf::put_table(Table table) {
  auto id = table.simplex;
  tables_.insert_or_assign(std::move(id), std::move(table));
}

void Sheaf::put_key_map(const SimplexId& id, int face, KeyMap map) {
  key_maps_.insert_or_assign({id, face}, std::move(map));
}

void Sheaf::erase_table(const SimplexId& id) { tables_.erase(id); }

void Sheaf::erase_key_map(const SimplexId& id, int face) { key_maps_.erase({id, face}); }

Tuple drop_slot(const Tuple& tuple, int slot) {
  Tuple out;
  out.reserve(tuple.size() - 1);
  for (std::size_t p = 0; p < tuple.size(); ++p) {
    if (static_cast<int>(p) != slot) out.push_back(tuple[p]);
  }
  return out;
}

Tuple drop_slots(const Tuple& tuple, std::vector<int> slots) {
  Tuple out;
  for (std::size_t p = 0; p < tuple.size(); ++p) {
    if (std::find(slots.begin(), slots.end(), static_cast<int>(p)) == slots.end()) out.push_back(tuple[p]);
  }
  return out;
}

bool conforms(const Schema& schema, const SimplexId& simplex, const Tuple& tuple) {
  const auto& s = schema.at(simplex);
  if (tuple.size() != static_cast<std::size_t>(s.dim + 1)) return false;
  for (std::size_t p = 0; p < tuple.size(); ++p) {
    if (!conforms(schema.slot_type(simplex, static_cast<int>(p)), tuple[p])) return false;
  }
  return true;
}

Table gamma(const Schema& schema, const SimplexId& simplex) {
  if (!schema.contains(simplex)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", simplex);
  return Table::virtual_table(simplex, VirtualTable::gamma());
}

std::vector<Tuple> enumerate_virtual(const Schema& schema, const SimplexId& simplex,
                                     const VirtualTable& table) {
  const auto n = static_cast<std::size_t>(schema.at(simplex).dim + 1);
  auto rows = virtual_complete(schema, simplex, table, std::vector<std::optional<Value>>(n));
  if (!rows) throw Error(ErrorCode::NotEnumerable, "virtual table is not finite", simplex);
  return *rows;
}

bool effective_member(const Sheaf& sheaf, const SimplexId& simplex, const Tuple& tuple) {
  const auto& schema = sheaf.schema();
  if (!conforms(schema, simplex, tuple)) return false;
  const auto* t = sheaf.table(simplex);
  if (t && !t->is_virtual()) {
    return std::find(t->rows.begin(), t->rows.end(), tuple) != t->rows.end();
  }
  if (t && !virtual_contains(schema, simplex, *t->virt, tuple)) return false;
  const auto& s = schema.at(simplex);
  for (int i = 0; i <= s.dim && s.dim > 0; ++i) {
    if (!effective_member(sheaf, s.faces[static_cast<std::size_t>(i)], drop_slot(tuple, i))) return false;
  }
  return true;
}

Sheaf set_table(const Sheaf& sheaf, Table table, const std::map<int, KeyMap>& key_maps) {
  Sheaf out = sheaf;
  set_table_impl(out, std::move(table), key_maps);
  if (auto r = validate_sheaf(out); !r.empty()) {
    const auto kind = r.front().kind;
    if (kind == Violation::Kind::KeyMap || kind == Violation::Kind::Composition) {
      throw Error(ErrorCode::KeyMapViolation, r.front().message, r.front().simplex);
    }
    throw_report(r, "table breaks the sheaf");
  }
  return out;
}

Table project_table(const Sheaf& sheaf, const SimplexId& coface, int face, const Table& table) {
  const auto& schema = sheaf.schema();
  const auto& s = schema.at(coface);
  if (table.simplex != coface) throw Error(ErrorCode::SimplexMismatch, "table is not over the simplex", coface);
  if (s.dim == 0 || face < 0 || face > s.dim) {
    throw Error(ErrorCode::FaceIndexOutOfRange, "face index out of range", coface);
  }
  const auto& target = s.faces[static_cast<std::size_t>(face)];
  if (table.is_virtual()) throw Error(ErrorCode::NotEnumerable, "cannot project a virtual table", coface);
  Table out = Table::keyed(target, table.keys, {});
  out.rows.reserve(table.size());
  for (const auto& row : table.rows) out.rows.push_back(drop_slot(row, face));
  return out;
}

Table pushforward_universal(const Sheaf& sheaf, const SimplexId& coface, int face, const Table& table) {
  const auto& schema = sheaf.schema();
  const auto& s = schema.at(coface);
  if (s.dim == 0 || face < 0 || face > s.dim) {
    throw Error(ErrorCode::FaceIndexOutOfRange, "face index out of range", coface);
  }
  if (table.simplex != s.faces[static_cast<std::size_t>(face)]) {
    throw Error(ErrorCode::SimplexMismatch, "table is not over the face", table.simplex);
  }
  if (table.is_virtual()) throw Error(ErrorCode::NotEnumerable, "cannot push forward a virtual table", coface);
  const auto n = static_cast<std::size_t>(s.dim + 1);
  std::vector<std::string> keys;
  std::vector<Tuple> rows;
  std::set<std::string> used;
  auto add = [&](const std::string& k, const std::string& completion, Tuple row) {
    std::string key = pair_key({k, completion});
    for (int dup = 1; !used.insert(key).second; ++dup) key = pair_key({k, completion}) + "#" + std::to_string(dup);
    keys.push_back(std::move(key));
    rows.push_back(std::move(row));
  };
  const auto* own = sheaf.table(coface);
  for (std::size_t r = 0; r < table.size(); ++r) {
    const auto& v = table.rows[r];
    if (own && !own->is_virtual()) {
      for (std::size_t c = 0; c < own->size(); ++c) {
        if (drop_slot(own->rows[c], face) == v) add(table.keys[r], own->keys[c], own->rows[c]);
      }
      continue;
    }
    std::vector<std::optional<Value>> bind(n);
    for (std::size_t p = 0, q = 0; p < n; ++p) {
      if (static_cast<int>(p) != face) bind[p] = v[q++];
    }
    const auto vt = own ? *own->virt : VirtualTable::gamma();
    auto completed = virtual_complete(schema, coface, vt, bind);
    if (!completed) {
      throw Error(ErrorCode::NotEnumerable, "slot " + std::to_string(face) + " cannot be completed", coface);
    }
    for (auto& row : *completed) {
      if (!effective_member(sheaf, coface, row)) continue;
      auto completion = row[static_cast<std::size_t>(face)].to_string();
      add(table.keys[r], completion, std::move(row));
    }
  }
  return Table::keyed(coface, std::move(keys), std::move(rows));
}

Table fiber_product(const Schema& schema, const Table& a, const Table& b) {
  if (a.simplex != b.simplex) throw Error(ErrorCode::SimplexMismatch, "tables over different simplices", a.simplex + "," + b.simplex);
  if (a.is_virtual() && b.is_virtual()) {
    if (a.virt->is_gamma()) return b;
    if (b.virt->is_gamma() || *a.virt == *b.virt) return a;
    throw Error(ErrorCode::UnsupportedCombination, "fiber product of two different virtual tables", a.simplex);
  }
  if (a.is_virtual() || b.is_virtual()) {
    const Table& c = a.is_virtual() ? b : a;
    const Table& v = a.is_virtual() ? a : b;
    Table out = Table::keyed(c.simplex, {}, {});
    for (std::size_t r = 0; r < c.size(); ++r) {
      if (virtual_contains(schema, c.simplex, *v.virt, c.rows[r])) {
        out.keys.push_back(c.keys[r]);
        out.rows.push_back(c.rows[r]);
      }
    }
    return out;
  }
  std::map<Tuple, std::vector<std::size_t>> by_value;
  for (std::size_t r = 0; r < b.size(); ++r) by_value[b.rows[r]].push_back(r);
  Table out = Table::keyed(a.simplex, {}, {});
  for (std::size_t r = 0; r < a.size(); ++r) {
    auto it = by_value.find(a.rows[r]);
    if (it == by_value.end()) continue;
    for (auto q : it->second) {
      out.keys.push_back(pair_key({a.keys[r], b.keys[q]}));
      out.rows.push_back(a.rows[r]);
    }
  }
  return out;
}

Table table_union(const Table& a, const Table& b, UnionMode mode) {
  if (a.simplex != b.simplex) throw Error(ErrorCode::SimplexMismatch, "tables over different simplices", a.simplex + "," + b.simplex);
  if (a.is_virtual() || b.is_virtual()) {
    throw Error(ErrorCode::UnsupportedCombination, "union needs two concrete tables", a.simplex);
  }
  std::vector<Tuple> rows;
  if (mode == UnionMode::All) {
    rows = a.rows;
    rows.insert(rows.end(), b.rows.begin(), b.rows.end());
  } else {
    std::set<Tuple> seen;
    for (const auto* t : {&a, &b}) {
      for (const auto& row : t->rows) {
        if (seen.insert(row).second) rows.push_back(row);
      }
    }
  }
  return Table::concrete(a.simplex, std::move(rows));
}

ValidationReport validate_sheaf(const Sheaf& sheaf) {
  using K = Violation::Kind;
  const auto& schema = sheaf.schema();
  ValidationReport report = validate_schema(schema);
  if (!report.empty()) return report;

  for (const auto& [id, t] : sheaf.tables()) {
    if (!schema.contains(id) || t.simplex != id) {
      report.push_back({K::Conformance, id, "table attached to an unknown simplex"});
      continue;
    }
    if (t.is_virtual()) {
      try {
        check_virtual(schema, id, *t.virt);
      } catch (const Error& e) {
        report.push_back({K::Conformance, id, e.what()});
      }
      continue;
    }
    if (t.keys.size() != t.rows.size()) {
      report.push_back({K::DuplicateKey, id, "key count differs from row count"});
      continue;
    }
    std::set<std::string> seen;
    for (const auto& k : t.keys) {
      if (!seen.insert(k).second) report.push_back({K::DuplicateKey, id, "duplicate key " + k});
    }
    for (std::size_t r = 0; r < t.size(); ++r) {
      if (!conforms(schema, id, t.rows[r])) {
        report.push_back({K::Conformance, id, "row " + t.keys[r] + " " + to_string(t.rows[r]) + " does not conform"});
      }
    }
  }

  for (const auto& [where, km] : sheaf.key_maps()) {
    const auto& [id, i] = where;
    const auto* s = schema.find(id);
    if (!s || i < 0 || i > s->dim || s->dim == 0 || !sheaf.is_concrete(id) ||
        !sheaf.is_concrete(s->faces[static_cast<std::size_t>(i)])) {
      report.push_back({K::KeyMap, id, "stray key map for face " + std::to_string(i)});
    }
  }

  // Commuting condition: the face value of each row is the value of its image.
  std::set<std::pair<SimplexId, int>> broken;
  for (const auto& [id, t] : sheaf.tables()) {
    if (t.is_virtual() || !schema.contains(id)) continue;
    const auto& s = schema.at(id);
    for (int i = 0; i <= s.dim && s.dim > 0; ++i) {
      const auto& f = s.faces[static_cast<std::size_t>(i)];
      if (!sheaf.is_concrete(f)) {
        for (std::size_t r = 0; r < t.size(); ++r) {
          if (!effective_member(sheaf, f, drop_slot(t.rows[r], i))) {
            report.push_back({K::Conformance, id,
                              "row " + t.keys[r] + " projects outside the table of face " + std::to_string(i)});
          }
        }
        continue;
      }
      const auto* km = sheaf.key_map(id, i);
      const auto& ft = *sheaf.table(f);
      if (!km || km->size() != t.size()) {
        report.push_back({K::KeyMap, id, "missing or mis-sized key map for face " + std::to_string(i)});
        broken.insert({id, i});
        continue;
      }
      for (std::size_t r = 0; r < t.size(); ++r) {
        const auto target = (*km)[r];
        if (target >= ft.size() || ft.rows[target] != drop_slot(t.rows[r], i)) {
          report.push_back({K::KeyMap, id,
                            "row " + t.keys[r] + " maps to a face row with a different value (face " +
                                std::to_string(i) + ")"});
          broken.insert({id, i});
        }
      }
    }
  }

  // Composition: r_i r_j = r_{j-1} r_i along the simplicial identity.
  for (const auto& [id, t] : sheaf.tables()) {
    if (t.is_virtual() || !schema.contains(id)) continue;
    const auto& s = schema.at(id);
    if (s.dim < 2) continue;
    for (int j = 1; j <= s.dim; ++j) {
      for (int i = 0; i < j; ++i) {
        const auto& a = s.faces[static_cast<std::size_t>(j)];
        const auto& b = s.faces[static_cast<std::size_t>(i)];
        const auto& g = schema.at(a).faces[static_cast<std::size_t>(i)];
        if (!sheaf.is_concrete(a) || !sheaf.is_concrete(b) || !sheaf.is_concrete(g)) continue;
        if (broken.count({id, j}) || broken.count({id, i}) || broken.count({a, i}) ||
            broken.count({b, j - 1})) {
          continue;
        }
        const auto* kj = sheaf.key_map(id, j);
        const auto* ki = sheaf.key_map(id, i);
        const auto* kai = sheaf.key_map(a, i);
        const auto* kbj = sheaf.key_map(b, j - 1);
        if (!kj || !ki || !kai || !kbj) continue;
        for (std::size_t r = 0; r < t.size(); ++r) {
          if ((*kai)[(*kj)[r]] != (*kbj)[(*ki)[r]]) {
            report.push_back({K::Composition, id,
                              "row " + t.keys[r] + " reaches different rows through faces (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")"});
          }
        }
      }
    }
  }
  return report;
}

std::string_view to_string(CombinePolicy policy) {
  switch (policy) {
    case CombinePolicy::Intersect: return "INTERSECT";
    case CombinePolicy::UnionAll: return "UNION_ALL";
    case CombinePolicy::UnionDedup: return "UNION_DEDUP";
  }
  return "INTERSECT";
}

CombinePolicy parse_policy(std::string_view text) {
  if (text == "INTERSECT") return CombinePolicy::Intersect;
  if (text == "UNION_ALL") return CombinePolicy::UnionAll;
  if (text == "UNION_DEDUP") return CombinePolicy::UnionDedup;
  throw Error(ErrorCode::InvalidArgument, "unknown policy", std::string(text));
}

// Recombination after a schema glue or fold. Every result simplex has one or
// more sources (simplices of the input sheaves placed on it). Tables are built
// bottom-up: a new row is a base row (drawn from the sources by the policy)
// together with one row of each face table it restricts to, where the face
// rows must agree with the sources' key maps and with each other on shared
// faces.
namespace {

struct Source {
  int sheaf;
  SimplexId orig;
  std::vector<int> perm;
};

struct Comp {
  int sheaf;
  SimplexId orig;
  std::size_t row;
  auto operator<=>(const Comp&) const = default;
};

struct Built {
  bool concrete = false;
  std::vector<std::vector<Comp>> comps;
  std::map<Comp, std::vector<std::size_t>> index;
  std::map<Tuple, std::vector<std::size_t>> by_value;
};

struct BaseRow {
  Tuple value;
  std::vector<Comp> comps;
  std::string key;
};

class Recombiner {
 public:
  Recombiner(Schema schema, std::vector<const Sheaf*> inputs,
             std::map<SimplexId, std::vector<Source>> sources, CombinePolicy policy,
             std::set<SimplexId> attached)
      : out_(std::move(schema)),
        inputs_(std::move(inputs)),
        sources_(std::move(sources)),
        policy_(policy),
        attached_(std::move(attached)) {}

  Sheaf run() {
    std::vector<SimplexId> order;
    for (const auto& [id, _] : out_.schema().simplices()) order.push_back(id);
    std::stable_sort(order.begin(), order.end(), [&](const SimplexId& a, const SimplexId& b) {
      return out_.schema().at(a).dim < out_.schema().at(b).dim;
    });
    for (const auto& id : order) build(id);
    if (auto r = validate_sheaf(out_); !r.empty()) throw_report(r, "combined sheaf is invalid");
    return std::move(out_);
  }

 private:
  const Table* source_table(const Source& s) const { return inputs_[static_cast<std::size_t>(s.sheaf)]->table(s.orig); }

  bool union_policy() const { return policy_ != CombinePolicy::Intersect; }

  // Combined virtual table of non-concrete sources, or nullopt for none.
  std::optional<VirtualTable> combine_virtual(const SimplexId& id, const std::vector<Source>& srcs) {
    std::vector<VirtualTable> explicit_tables;
    bool any_universal = false;
    for (const auto& s : srcs) {
      const auto* t = source_table(s);
      if (t && !t->is_virtual()) continue;
      if (!t) {
        any_universal = true;
        continue;
      }
      auto v = permute_slots(*t->virt, s.perm);
      if (v.is_gamma()) {
        any_universal = true;
        explicit_tables.push_back(v);
        continue;
      }
      if (std::find(explicit_tables.begin(), explicit_tables.end(), v) == explicit_tables.end()) {
        explicit_tables.push_back(v);
      }
    }
    std::vector<VirtualTable> specific;
    for (const auto& v : explicit_tables) {
      if (!v.is_gamma()) specific.push_back(v);
    }
    if (union_policy() && srcs.size() > 1 && any_universal) {
      if (explicit_tables.empty()) return std::nullopt;
      return VirtualTable::gamma();
    }
    if (specific.size() > 1) {
      throw Error(ErrorCode::UnsupportedCombination, "two different virtual tables meet", id);
    }
    if (specific.size() == 1) return specific.front();
    if (!explicit_tables.empty()) return VirtualTable::gamma();
    return std::nullopt;
  }

  std::vector<BaseRow> base_rows(const SimplexId& id, const std::vector<Source>& srcs) {
    std::vector<std::size_t> concrete;
    for (std::size_t k = 0; k < srcs.size(); ++k) {
      const auto* t = source_table(srcs[k]);
      if (t && !t->is_virtual()) concrete.push_back(k);
    }
    const bool is_class = srcs.size() > 1;
    std::vector<BaseRow> out;
    auto values_of = [&](std::size_t k) {
      const auto& t = *source_table(srcs[k]);
      std::vector<Tuple> v;
      for (const auto& row : t.rows) v.push_back(permute(row, srcs[k].perm));
      return v;
    };
    if (!is_class || policy_ == CombinePolicy::Intersect) {
      std::vector<std::vector<Tuple>> vals;
      std::vector<std::map<Tuple, std::vector<std::size_t>>> groups;
      for (auto k : concrete) {
        vals.push_back(values_of(k));
        std::map<Tuple, std::vector<std::size_t>> g;
        for (std::size_t r = 0; r < vals.back().size(); ++r) g[vals.back()[r]].push_back(r);
        groups.push_back(std::move(g));
      }
      std::vector<VirtualTable> filters;
      for (const auto& s : srcs) {
        const auto* t = source_table(s);
        if (t && t->is_virtual() && !t->virt->is_gamma()) filters.push_back(permute_slots(*t->virt, s.perm));
      }
      const auto& first = vals.front();
      for (std::size_t r0 = 0; r0 < first.size(); ++r0) {
        const auto& v = first[r0];
        bool pass = std::all_of(filters.begin(), filters.end(), [&](const VirtualTable& f) {
          return virtual_contains(out_.schema(), id, f, v);
        });
        if (!pass) continue;
        std::vector<std::size_t> pick{r0};
        std::function<void(std::size_t)> rec = [&](std::size_t level) {
          if (level == concrete.size()) {
            BaseRow b{v, {}, {}};
            std::vector<std::string> keys;
            for (std::size_t c = 0; c < concrete.size(); ++c) {
              const auto& s = srcs[concrete[c]];
              b.comps.push_back({s.sheaf, s.orig, pick[c]});
              keys.push_back(source_table(s)->keys[pick[c]]);
            }
            b.key = keys.size() == 1 ? keys.front() : pair_key(keys);
            out.push_back(std::move(b));
            return;
          }
          auto it = groups[level].find(v);
          if (it == groups[level].end()) return;
          for (auto r : it->second) {
            pick.push_back(r);
            rec(level + 1);
            pick.pop_back();
          }
        };
        rec(1);
      }
      return out;
    }
    std::map<Tuple, std::size_t> dedup;
    for (auto k : concrete) {
      const auto& s = srcs[k];
      const auto vals = values_of(k);
      for (std::size_t r = 0; r < vals.size(); ++r) {
        Comp c{s.sheaf, s.orig, r};
        if (policy_ == CombinePolicy::UnionDedup) {
          auto [it, fresh] = dedup.emplace(vals[r], out.size());
          if (!fresh) {
            out[it->second].comps.push_back(c);
            continue;
          }
        }
        out.push_back({vals[r], {c}, std::to_string(out.size())});
      }
    }
    return out;
  }

  void build(const SimplexId& id) {
    const auto& schema = out_.schema();
    const auto& simplex = schema.at(id);
    const auto& srcs = sources_.at(id);
    bool any_concrete = false;
    bool all_concrete = true;
    for (const auto& s : srcs) {
      const auto* t = source_table(s);
      const bool c = t && !t->is_virtual();
      any_concrete |= c;
      all_concrete &= c;
    }
    Built& built = built_[id];
    if (union_policy() && srcs.size() > 1 && any_concrete && !all_concrete) {
      if (attached_.count(id)) {
        throw Error(ErrorCode::UnsupportedCombination, "union needs concrete tables on both sides", id);
      }
      // Union with a virtual side stays virtual when it already contains the concrete rows.
      auto v = combine_virtual(id, srcs);
      for (const auto& s : srcs) {
        const auto* t = source_table(s);
        if (!t || t->is_virtual()) continue;
        for (const auto& row : t->rows) {
          if (v && !virtual_contains(schema, id, *v, permute(row, s.perm))) {
            throw Error(ErrorCode::UnsupportedCombination,
                        "union of a virtual table with rows outside it", id);
          }
        }
      }
      if (v) out_.put_table(Table::virtual_table(id, *v));
      return;
    }
    if (!any_concrete) {
      if (auto v = combine_virtual(id, srcs)) out_.put_table(Table::virtual_table(id, *v));
      return;
    }

    const auto bases = base_rows(id, srcs);
    const int n = simplex.dim + 1;
    // For each face p: the face simplex and, per source index, the constraint
    // index map (component of the face row implied by a component of ours).
    std::vector<std::vector<std::vector<std::size_t>>> families(bases.size());
    for (std::size_t b = 0; b < bases.size(); ++b) {
      const auto& base = bases[b];
      std::vector<std::vector<std::size_t>> candidates(static_cast<std::size_t>(simplex.dim > 0 ? n : 0));
      bool dead = false;
      for (int p = 0; p < n && simplex.dim > 0 && !dead; ++p) {
        const auto& f = simplex.faces[static_cast<std::size_t>(p)];
        const auto proj = drop_slot(base.value, p);
        const auto& fb = built_.at(f);
        auto& cand = candidates[static_cast<std::size_t>(p)];
        if (!fb.concrete) {
          if (effective_member(out_, f, proj)) cand.push_back(kNoRow);
          dead = cand.empty();
          continue;
        }
        auto it = fb.by_value.find(proj);
        if (it == fb.by_value.end()) {
          dead = true;
          continue;
        }
        cand = it->second;
        for (const auto& c : base.comps) {
          const auto& src = find_source(id, c);
          const int q = src.perm[static_cast<std::size_t>(p)];
          const auto& in = *inputs_[static_cast<std::size_t>(c.sheaf)];
          const auto& fo = in.schema().at(c.orig).faces[static_cast<std::size_t>(q)];
          if (!in.is_concrete(fo)) continue;
          Comp target{c.sheaf, fo, (*in.key_map(c.orig, q))[c.row]};
          auto hit = fb.index.find(target);
          std::vector<std::size_t> keep;
          if (hit != fb.index.end()) {
            std::set_intersection(cand.begin(), cand.end(), hit->second.begin(), hit->second.end(),
                                  std::back_inserter(keep));
          }
          cand = std::move(keep);
        }
        dead = cand.empty();
      }
      if (dead) continue;
      // Choose one candidate per face, agreeing on shared faces.
      std::vector<std::size_t> pick;
      std::function<void(int)> rec = [&](int p) {
        if (p == static_cast<int>(candidates.size())) {
          families[b].push_back(pick);
          return;
        }
        for (auto c : candidates[static_cast<std::size_t>(p)]) {
          bool ok = true;
          for (int q = 0; q < p && ok && c != kNoRow && simplex.dim >= 2; ++q) {
            const auto other = pick[static_cast<std::size_t>(q)];
            if (other == kNoRow) continue;
            // Shared face of faces q < p: face_{p-1}(face_q) = face_q(face_p).
            const auto& fq = simplex.faces[static_cast<std::size_t>(q)];
            const auto& fp = simplex.faces[static_cast<std::size_t>(p)];
            const auto& g = schema.at(fq).faces[static_cast<std::size_t>(p - 1)];
            if (!out_.is_concrete(g)) continue;
            ok = (*out_.key_map(fq, p - 1))[other] == (*out_.key_map(fp, q))[c];
          }
          if (!ok) continue;
          pick.push_back(c);
          rec(p + 1);
          pick.pop_back();
        }
      };
      rec(0);
    }

    bool single = true;
    for (std::size_t b = 0; b < bases.size(); ++b) single &= families[b].size() == 1;
    Table table = Table::keyed(id, {}, {});
    std::vector<KeyMap> kms(static_cast<std::size_t>(simplex.dim > 0 ? n : 0));
    for (std::size_t b = 0; b < bases.size(); ++b) {
      for (const auto& fam : families[b]) {
        std::string key = bases[b].key;
        if (!single) {
          std::vector<std::string> parts;
          for (std::size_t p = 0; p < fam.size(); ++p) {
            parts.push_back(fam[p] == kNoRow ? "-" : out_.table(simplex.faces[p])->keys[fam[p]]);
          }
          key += "*" + pair_key(parts);
        }
        const auto row = table.rows.size();
        table.keys.push_back(std::move(key));
        table.rows.push_back(bases[b].value);
        built.comps.push_back(bases[b].comps);
        for (const auto& c : bases[b].comps) built.index[c].push_back(row);
        built.by_value[bases[b].value].push_back(row);
        for (std::size_t p = 0; p < fam.size(); ++p) kms[p].push_back(fam[p]);
      }
    }
    built.concrete = true;
    out_.put_table(std::move(table));
    for (std::size_t p = 0; p < kms.size(); ++p) {
      if (built_.at(simplex.faces[p]).concrete) out_.put_key_map(id, static_cast<int>(p), std::move(kms[p]));
    }
  }

  const Source& find_source(const SimplexId& id, const Comp& c) const {
    for (const auto& s : sources_.at(id)) {
      if (s.sheaf == c.sheaf && s.orig == c.orig) return s;
    }
    throw Error(ErrorCode::InvalidSheaf, "lost track of a source simplex", id);
  }

  Sheaf out_;
  std::vector<const Sheaf*> inputs_;
  std::map<SimplexId, std::vector<Source>> sources_;
  CombinePolicy policy_;
  std::set<SimplexId> attached_;
  std::map<SimplexId, Built> built_;
};

void require_valid(const Sheaf& s, const char* what) {
  if (auto r = validate_sheaf(s); !r.empty()) throw_report(r, what);
}

void add_sources(std::map<SimplexId, std::vector<Source>>& sources, int sheaf, const Embedding& emb) {
  for (const auto& [orig, place] : emb) sources[place.id].push_back({sheaf, orig, place.perm});
}

}  // namespace

SheafGlueResult glue_sheaves(const Sheaf& left, const SimplexId& x1, const Sheaf& right,
                             const SimplexId& x2, const SlotMatching& matching,
                             CombinePolicy policy) {
  require_valid(left, "left sheaf invalid");
  require_valid(right, "right sheaf invalid");
  auto g = glue(left.schema(), x1, right.schema(), x2, matching);
  std::map<SimplexId, std::vector<Source>> sources;
  add_sources(sources, 0, g.left);
  add_sources(sources, 1, g.right);
  Recombiner rc(g.schema, {&left, &right}, std::move(sources), policy, {g.left.at(x1).id});
  return {rc.run(), std::move(g.left), std::move(g.right)};
}

SheafFoldResult fold_sheaf(const Sheaf& sheaf, const SimplexId& x1, const SimplexId& x2,
                           const SlotMatching& matching, CombinePolicy policy) {
  require_valid(sheaf, "sheaf invalid");
  auto f = fold(sheaf.schema(), x1, x2, matching);
  std::map<SimplexId, std::vector<Source>> sources;
  add_sources(sources, 0, f.embedding);
  Recombiner rc(f.schema, {&sheaf}, std::move(sources), policy, {f.embedding.at(x1).id});
  return {rc.run(), std::move(f.embedding)};
}

SheafGlueResult disjoint_union(const Sheaf& left, const Sheaf& right) {
  auto g = disjoint_union(left.schema(), right.schema());
  Sheaf out(g.schema);
  for (const auto* side : {&g.left, &g.right}) {
    const Sheaf& src = side == &g.left ? left : right;
    for (const auto& [id, t] : src.tables()) {
      Table moved = t;
      moved.simplex = side->at(id).id;
      out.put_table(std::move(moved));
    }
    for (const auto& [where, km] : src.key_maps()) out.put_key_map(side->at(where.first).id, where.second, km);
  }
  return {std::move(out), std::move(g.left), std::move(g.right)};
}

}  // namespace simplexdb
