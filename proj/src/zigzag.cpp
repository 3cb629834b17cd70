#include "simplexdb/zigzag.hpp"

#include <algorithm>
#include <set>

#include "simplexdb/error.hpp"

namespace simplexdb {

namespace {

std::string pair_key(const std::string& a, const std::string& b) { return "(" + a + "," + b + ")"; }

void check_step(const Schema& schema, const SimplexId& from, const ZigzagStep& step) {
  if (!schema.contains(step.target)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", step.target);
  if (step.face_index.empty()) throw Error(ErrorCode::FaceIndexOutOfRange, "step without face index", from + "," + step.target);
  if (!std::is_sorted(step.face_index.begin(), step.face_index.end()) ||
      std::adjacent_find(step.face_index.begin(), step.face_index.end()) != step.face_index.end()) {
    throw Error(ErrorCode::FaceIndexOutOfRange, "face indices must be strictly ascending", from + "," + step.target);
  }
  const auto& big = step.direction == Direction::Descend ? from : step.target;
  const auto& small = step.direction == Direction::Descend ? step.target : from;
  if (schema.face_along(big, step.face_index) != small) {
    throw Error(ErrorCode::NotIncident, "simplices are not related by the stated face", from + "," + step.target);
  }
}

// Per-evaluation lookups into concrete tables.
class Navigator {
 public:
  explicit Navigator(const Sheaf& sheaf) : sheaf_(sheaf) {}

  const std::vector<std::size_t>& rows_with(const SimplexId& id, const Tuple& value) {
    auto& idx = index_[id];
    if (idx.empty()) {
      const auto& t = *sheaf_.table(id);
      for (std::size_t r = 0; r < t.size(); ++r) idx[t.rows[r]].push_back(r);
      idx[Tuple{}];  // marks the index as built even for empty tables
    }
    auto it = idx.find(value);
    static const std::vector<std::size_t> kNone;
    return it == idx.end() ? kNone : it->second;
  }

  bool member(const SimplexId& id, const Tuple& value) {
    if (sheaf_.is_concrete(id)) return !rows_with(id, value).empty();
    return effective_member(sheaf_, id, value);
  }

  // Follows `deleted` (any order) from a row of `id` down to the iterated face.
  // Returns false when a virtual-to-concrete step finds no row.
  bool restrict(const SimplexId& id, std::optional<std::size_t> pos, const Tuple& value,
                std::vector<int> deleted, SimplexId& out_id, std::optional<std::size_t>& out_pos,
                Tuple& out_value) {
    std::sort(deleted.begin(), deleted.end(), std::greater<>());
    SimplexId cur = id;
    Tuple cur_value = value;
    for (int d : deleted) {
      const auto& f = sheaf_.schema().at(cur).faces[static_cast<std::size_t>(d)];
      Tuple fv = drop_slot(cur_value, d);
      if (sheaf_.is_concrete(f)) {
        if (pos) {
          pos = (*sheaf_.key_map(cur, d))[*pos];
        } else {
          const auto& hits = rows_with(f, fv);
          if (hits.empty()) return false;
          if (hits.size() > 1) {
            throw Error(ErrorCode::AmbiguousKeyMap,
                        "value " + to_string(fv) + " occurs more than once below a virtual table", f);
          }
          pos = hits.front();
        }
      } else {
        pos.reset();
      }
      cur = f;
      cur_value = std::move(fv);
    }
    out_id = cur;
    out_pos = pos;
    out_value = std::move(cur_value);
    return true;
  }

 private:
  const Sheaf& sheaf_;
  std::map<SimplexId, std::map<Tuple, std::vector<std::size_t>>> index_;
};

struct Row {
  std::string key;
  std::size_t origin;
  std::optional<std::size_t> pos;
  Tuple value;
};

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::Ascend ? "ASCEND" : "DESCEND"; }

Direction parse_direction(std::string_view text) {
  if (text == "ASCEND") return Direction::Ascend;
  if (text == "DESCEND") return Direction::Descend;
  throw Error(ErrorCode::MalformedDocument, "unknown direction", std::string(text));
}

std::vector<SimplexId> Zigzag::path() const {
  std::vector<SimplexId> out{start};
  for (const auto& s : steps) out.push_back(s.target);
  return out;
}

void check_zigzag(const Schema& schema, const Zigzag& zigzag) {
  if (!schema.contains(zigzag.start)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", zigzag.start);
  SimplexId cur = zigzag.start;
  for (const auto& step : zigzag.steps) {
    check_step(schema, cur, step);
    cur = step.target;
  }
}

Zigzag zigzag_from_sequence(const Schema& schema, const std::vector<SimplexId>& ids,
                            const std::map<std::size_t, std::vector<int>>& overrides) {
  if (ids.empty()) throw Error(ErrorCode::InvalidArgument, "empty simplex sequence");
  for (const auto& id : ids) {
    if (!schema.contains(id)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", id);
  }
  Zigzag z{ids.front(), {}};
  for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
    const auto& a = ids[k];
    const auto& b = ids[k + 1];
    const int da = schema.at(a).dim;
    const int db = schema.at(b).dim;
    ZigzagStep step;
    step.target = b;
    std::vector<std::vector<int>> paths;
    if (da > db) {
      step.direction = Direction::Descend;
      paths = schema.face_paths(a, b);
    } else if (da < db) {
      step.direction = Direction::Ascend;
      paths = schema.face_paths(b, a);
    }
    if (paths.empty()) {
      throw Error(ErrorCode::NotIncident, "consecutive simplices are not face-incident: (" + a + ", " + b + ")",
                  a + "," + b);
    }
    if (auto it = overrides.find(k); it != overrides.end()) {
      auto chosen = it->second;
      std::sort(chosen.begin(), chosen.end());
      if (std::find(paths.begin(), paths.end(), chosen) == paths.end()) {
        throw Error(ErrorCode::NotIncident, "override does not relate (" + a + ", " + b + ")", a + "," + b);
      }
      step.face_index = std::move(chosen);
    } else {
      step.face_index = paths.front();
    }
    z.steps.push_back(std::move(step));
  }
  return z;
}

Zigzag concatenate(const Zigzag& a, const Zigzag& b) {
  if (a.end() != b.start) throw Error(ErrorCode::SimplexMismatch, "zigzags do not meet", a.end() + "," + b.start);
  Zigzag out = a;
  out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
  return out;
}

Selection select_all(const Sheaf& sheaf, const SimplexId& simplex) {
  if (!sheaf.schema().contains(simplex)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", simplex);
  if (!sheaf.is_concrete(simplex)) throw Error(ErrorCode::NotEnumerable, "cannot select every row of a virtual table", simplex);
  const auto& t = *sheaf.table(simplex);
  Selection s{simplex, t.keys, t.rows, {}};
  for (std::size_t r = 0; r < t.size(); ++r) s.rows.push_back(r);
  return s;
}

Selection select_keys(const Sheaf& sheaf, const SimplexId& simplex, const std::vector<std::string>& keys) {
  if (!sheaf.schema().contains(simplex)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", simplex);
  if (!sheaf.is_concrete(simplex)) throw Error(ErrorCode::MissingTable, "key selection needs a concrete table", simplex);
  const auto& t = *sheaf.table(simplex);
  Selection s{simplex, {}, {}, {}};
  for (const auto& k : keys) {
    auto r = t.find_key(k);
    if (!r) throw Error(ErrorCode::NotFound, "no row with key " + k, simplex);
    s.keys.push_back(k);
    s.values.push_back(t.rows[*r]);
    s.rows.push_back(*r);
  }
  return s;
}

Selection select_values(const Sheaf& sheaf, const SimplexId& simplex, const std::vector<Tuple>& values) {
  const auto& schema = sheaf.schema();
  if (!schema.contains(simplex)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", simplex);
  for (const auto& v : values) {
    if (!conforms(schema, simplex, v)) throw Error(ErrorCode::NonConforming, "selected value " + to_string(v) + " does not conform", simplex);
  }
  Selection s{simplex, {}, {}, {}};
  if (sheaf.is_concrete(simplex)) {
    const auto& t = *sheaf.table(simplex);
    const std::set<Tuple> wanted(values.begin(), values.end());
    for (std::size_t r = 0; r < t.size(); ++r) {
      if (!wanted.count(t.rows[r])) continue;
      s.keys.push_back(t.keys[r]);
      s.values.push_back(t.rows[r]);
      s.rows.push_back(r);
    }
    return s;
  }
  for (const auto& v : values) {
    if (!effective_member(sheaf, simplex, v)) continue;
    s.keys.push_back(std::to_string(s.keys.size()));
    s.values.push_back(v);
    s.rows.push_back(std::nullopt);
  }
  return s;
}

Selection select_mapped(const Sheaf& sheaf, const Table& table, const KeyMap& into_sheaf) {
  const auto& simplex = table.simplex;
  if (!sheaf.schema().contains(simplex)) throw Error(ErrorCode::UnknownSimplex, "unknown simplex", simplex);
  if (!sheaf.is_concrete(simplex)) throw Error(ErrorCode::MissingTable, "mapped selection needs a concrete table", simplex);
  if (table.is_virtual()) throw Error(ErrorCode::InvalidArgument, "selection must be concrete", simplex);
  const auto& t = *sheaf.table(simplex);
  if (into_sheaf.size() != table.size()) throw Error(ErrorCode::KeyMapViolation, "selection key map has the wrong length", simplex);
  Selection s{simplex, table.keys, table.rows, {}};
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (into_sheaf[r] >= t.size() || t.rows[into_sheaf[r]] != table.rows[r]) {
      throw Error(ErrorCode::KeyMapViolation, "selection row " + table.keys[r] + " does not match its sheaf row", simplex);
    }
    s.rows.push_back(into_sheaf[r]);
  }
  return s;
}

QueryResult evaluate(const Sheaf& sheaf, const Zigzag& zigzag, const Selection& selection) {
  const auto& schema = sheaf.schema();
  check_zigzag(schema, zigzag);
  if (selection.simplex != zigzag.start) {
    throw Error(ErrorCode::SimplexMismatch, "selection is over " + selection.simplex + ", zigzag starts at " + zigzag.start,
                selection.simplex);
  }
  Navigator nav(sheaf);

  std::vector<Row> rows;
  for (std::size_t r = 0; r < selection.size(); ++r) {
    rows.push_back({selection.keys[r], r, selection.rows[r], selection.values[r]});
  }

  SimplexId cur = zigzag.start;
  for (const auto& step : zigzag.steps) {
    std::vector<Row> next;
    if (step.direction == Direction::Descend) {
      for (auto& row : rows) {
        SimplexId at;
        std::optional<std::size_t> pos;
        Tuple value;
        if (!nav.restrict(cur, row.pos, row.value, step.face_index, at, pos, value)) continue;
        next.push_back({std::move(row.key), row.origin, pos, std::move(value)});
      }
    } else if (sheaf.is_concrete(step.target)) {
      // Pullback against the coface table along its key maps.
      const auto& t = *sheaf.table(step.target);
      std::map<std::size_t, std::vector<std::size_t>> by_pos;
      std::map<Tuple, std::vector<std::size_t>> by_value;
      for (std::size_t r = 0; r < t.size(); ++r) {
        SimplexId at;
        std::optional<std::size_t> pos;
        Tuple value;
        if (!nav.restrict(step.target, r, t.rows[r], step.face_index, at, pos, value)) continue;
        if (pos) by_pos[*pos].push_back(r);
        else by_value[value].push_back(r);
      }
      static const std::vector<std::size_t> kNone;
      for (const auto& row : rows) {
        const std::vector<std::size_t>* hits = &kNone;
        if (row.pos) {
          if (auto it = by_pos.find(*row.pos); it != by_pos.end()) hits = &it->second;
        } else if (auto it = by_value.find(row.value); it != by_value.end()) {
          hits = &it->second;
        }
        for (auto r : *hits) next.push_back({pair_key(row.key, t.keys[r]), row.origin, r, t.rows[r]});
      }
    } else {
      // Completion through a virtual (or absent) coface table.
      const auto* own = sheaf.table(step.target);
      const auto vt = own ? *own->virt : VirtualTable::gamma();
      const auto n = static_cast<std::size_t>(schema.at(step.target).dim + 1);
      for (const auto& row : rows) {
        std::vector<std::optional<Value>> bind(n);
        for (std::size_t p = 0, q = 0; p < n; ++p) {
          if (!std::binary_search(step.face_index.begin(), step.face_index.end(), static_cast<int>(p))) {
            bind[p] = row.value[q++];
          }
        }
        auto completed = virtual_complete(schema, step.target, vt, bind);
        if (!completed) {
          throw Error(ErrorCode::NotEnumerable,
                      "no determining set of " + step.target + " is known after " + cur, step.target);
        }
        for (auto& full : *completed) {
          const auto& s = schema.at(step.target);
          bool ok = true;
          for (int i = 0; i <= s.dim && ok; ++i) {
            ok = nav.member(s.faces[static_cast<std::size_t>(i)], drop_slot(full, i));
          }
          if (!ok) continue;
          std::vector<std::string> filled;
          for (int d : step.face_index) filled.push_back(full[static_cast<std::size_t>(d)].to_string());
          std::string completion = filled.front();
          for (std::size_t i = 1; i < filled.size(); ++i) completion += "," + filled[i];
          if (filled.size() > 1) completion = "(" + completion + ")";
          next.push_back({pair_key(row.key, completion), row.origin, std::nullopt, std::move(full)});
        }
      }
    }
    rows = std::move(next);
    cur = step.target;
  }

  QueryResult result;
  result.selection = selection;
  result.end_table = Table::keyed(cur, {}, {});
  std::set<std::string> used;
  for (auto& row : rows) {
    // Distinct paths can meet at equal composite keys only through virtual
    // completions with repeated values; keep keys unique regardless.
    std::string key = row.key;
    for (int dup = 1; !used.insert(key).second; ++dup) key = row.key + "#" + std::to_string(dup);
    result.end_table.keys.push_back(std::move(key));
    result.end_table.rows.push_back(std::move(row.value));
    result.back_map.push_back(row.origin);
    result.end_rows.push_back(row.pos);
  }
  result.graph = graph_table(result);
  return result;
}

GraphTable graph_table(const QueryResult& result, bool dedup) {
  GraphTable g{result.selection.simplex, result.end_table.simplex, {}, {}};
  std::set<Tuple> seen;
  for (std::size_t r = 0; r < result.end_table.size(); ++r) {
    Tuple row = result.selection.values[result.back_map[r]];
    const auto& end = result.end_table.rows[r];
    row.insert(row.end(), end.begin(), end.end());
    if (dedup && !seen.insert(row).second) continue;
    g.keys.push_back(result.end_table.keys[r]);
    g.rows.push_back(std::move(row));
  }
  return g;
}

QueryComparison queries_equal(const Sheaf& sheaf, const Zigzag& first, const Zigzag& second,
                              const Selection& selection) {
  if (first.start != second.start || first.end() != second.end()) {
    throw Error(ErrorCode::SimplexMismatch, "zigzags have different endpoints",
                first.start + "->" + first.end() + " vs " + second.start + "->" + second.end());
  }
  const auto a = evaluate(sheaf, first, selection);
  const auto b = evaluate(sheaf, second, selection);
  std::map<Tuple, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : a.graph.rows) ++counts[r].first;
  for (const auto& r : b.graph.rows) ++counts[r].second;
  QueryComparison out;
  for (const auto& [row, c] : counts) {
    if (c.first != c.second) {
      out.equal = false;
      out.witness = row;
      out.count_first = c.first;
      out.count_second = c.second;
      break;
    }
  }
  return out;
}

}  // namespace simplexdb
