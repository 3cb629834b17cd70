#include "simplexdb/schema.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "simplexdb/error.hpp"

namespace simplexdb {

std::string_view to_string(Violation::Kind kind) {
  using K = Violation::Kind;
  switch (kind) {
    case K::DanglingFace: return "dangling_face";
    case K::FaceCount: return "face_count";
    case K::FaceDimension: return "face_dimension";
    case K::SimplicialIdentity: return "simplicial_identity";
    case K::Label: return "label";
    case K::UnknownDataType: return "unknown_datatype";
    case K::NegativeDimension: return "negative_dimension";
    case K::Conformance: return "conformance";
    case K::KeyMap: return "keymap";
    case K::Composition: return "composition";
    case K::DuplicateKey: return "duplicate_key";
  }
  return "unknown";
}

SlotMatching SlotMatching::identity(int dim) {
  SlotMatching m;
  m.right_slot.resize(static_cast<std::size_t>(dim + 1));
  std::iota(m.right_slot.begin(), m.right_slot.end(), 0);
  return m;
}

bool SlotMatching::is_identity() const {
  for (std::size_t k = 0; k < right_slot.size(); ++k) {
    if (right_slot[k] != static_cast<int>(k)) return false;
  }
  return true;
}

void Schema::insert(Simplex simplex) {
  auto id = simplex.id;
  simplices_.insert_or_assign(std::move(id), std::move(simplex));
}

const Simplex* Schema::find(const SimplexId& id) const {
  auto it = simplices_.find(id);
  return it == simplices_.end() ? nullptr : &it->second;
}

const Simplex& Schema::at(const SimplexId& id) const {
  if (const auto* s = find(id)) return *s;
  throw Error(ErrorCode::UnknownSimplex, "unknown simplex", id);
}

std::size_t Schema::count_of_dim(int dim) const {
  return static_cast<std::size_t>(std::count_if(
      simplices_.begin(), simplices_.end(), [dim](const auto& kv) { return kv.second.dim == dim; }));
}

std::vector<FaceRef> Schema::faces(const SimplexId& id) const {
  const auto& s = at(id);
  std::vector<FaceRef> out;
  out.reserve(s.faces.size());
  for (std::size_t i = 0; i < s.faces.size(); ++i) {
    out.push_back({static_cast<int>(i), s.faces[i]});
  }
  return out;
}

std::vector<CofaceRef> Schema::cofaces(const SimplexId& id) const {
  (void)at(id);
  std::vector<CofaceRef> out;
  for (const auto& [sid, s] : simplices_) {
    for (std::size_t i = 0; i < s.faces.size(); ++i) {
      if (s.faces[i] == id) out.push_back({sid, static_cast<int>(i)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SimplexId> Schema::vertex_slots(const SimplexId& id) const {
  const auto& top = at(id);
  std::vector<SimplexId> out;
  out.reserve(static_cast<std::size_t>(top.dim + 1));
  for (int slot = 0; slot <= top.dim; ++slot) {
    const Simplex* cur = &top;
    int pos = slot;
    while (cur->dim > 0) {
      // Drop the last slot unless it is the one we are tracking.
      if (pos < cur->dim) {
        cur = &at(cur->faces[static_cast<std::size_t>(cur->dim)]);
      } else {
        cur = &at(cur->faces[0]);
        --pos;
      }
    }
    out.push_back(cur->id);
  }
  return out;
}

std::vector<std::string> Schema::slot_labels(const SimplexId& id) const {
  std::vector<std::string> out;
  for (const auto& v : vertex_slots(id)) out.push_back(at(v).label.value_or(""));
  return out;
}

const DataType& Schema::slot_type(const SimplexId& id, int slot) const {
  const auto vs = vertex_slots(id);
  if (slot < 0 || slot >= static_cast<int>(vs.size())) {
    throw Error(ErrorCode::FaceIndexOutOfRange, "slot out of range", id);
  }
  const auto& label = at(vs[static_cast<std::size_t>(slot)]).label;
  if (!label) throw Error(ErrorCode::InvalidSchema, "vertex without label", vs[static_cast<std::size_t>(slot)]);
  return registry_.at(*label);
}

SimplexId Schema::face_along(const SimplexId& id, std::span<const int> deleted_slots) const {
  std::vector<int> deleted(deleted_slots.begin(), deleted_slots.end());
  std::sort(deleted.begin(), deleted.end(), std::greater<>());
  if (std::adjacent_find(deleted.begin(), deleted.end()) != deleted.end()) {
    throw Error(ErrorCode::FaceIndexOutOfRange, "slot deleted twice", id);
  }
  const Simplex* cur = &at(id);
  for (int d : deleted) {
    if (d < 0 || d > cur->dim || cur->dim == 0) {
      throw Error(ErrorCode::FaceIndexOutOfRange, "face index out of range", cur->id);
    }
    cur = &at(cur->faces[static_cast<std::size_t>(d)]);
  }
  return cur->id;
}

std::vector<std::vector<int>> Schema::face_paths(const SimplexId& id, const SimplexId& face) const {
  const auto& top = at(id);
  const auto& target = at(face);
  std::vector<std::vector<int>> out;
  const int codim = top.dim - target.dim;
  if (codim <= 0) return out;
  // Lexicographic enumeration of codim-element subsets of {0..dim}.
  std::vector<int> pick(static_cast<std::size_t>(codim));
  std::iota(pick.begin(), pick.end(), 0);
  const int n = top.dim + 1;
  while (true) {
    if (face_along(id, pick) == face) out.push_back(pick);
    int i = codim - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - codim + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < codim; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

std::set<SimplexId> Schema::closure(const SimplexId& id) const {
  std::set<SimplexId> out;
  std::vector<SimplexId> stack{id};
  while (!stack.empty()) {
    auto cur = std::move(stack.back());
    stack.pop_back();
    if (!out.insert(cur).second) continue;
    for (const auto& f : at(cur).faces) stack.push_back(f);
  }
  return out;
}

std::set<SimplexId> Schema::star(const SimplexId& id) const {
  (void)at(id);
  std::set<SimplexId> out;
  std::vector<SimplexId> todo{id};
  while (!todo.empty()) {
    auto cur = std::move(todo.back());
    todo.pop_back();
    for (const auto& c : cofaces(cur)) {
      if (out.insert(c.simplex).second) todo.push_back(c.simplex);
    }
  }
  return out;
}

namespace {

std::string join_names(const std::vector<std::string>& names, unsigned mask) {
  const bool short_names = std::all_of(names.begin(), names.end(),
                                       [](const std::string& s) { return s.size() == 1; });
  std::string id;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!(mask & (1u << i))) continue;
    if (!id.empty() && !short_names) id += "|";
    id += names[i];
  }
  return id;
}

std::vector<std::string> default_names(std::size_t n, std::span<const std::string> given) {
  if (!given.empty()) {
    if (given.size() != n) {
      throw Error(ErrorCode::InvalidArgument, "one vertex name per label required");
    }
    std::vector<std::string> names(given.begin(), given.end());
    std::set<std::string> unique(names.begin(), names.end());
    if (unique.size() != names.size() || unique.count("")) {
      throw Error(ErrorCode::InvalidArgument, "vertex names must be unique and non-empty");
    }
    return names;
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return names;
}

// One simplex per non-empty subset of slots; `name_of` maps a subset mask to an id.
void add_representable(Schema& out, std::span<const std::string> labels,
                       const std::function<SimplexId(unsigned)>& name_of) {
  const std::size_t n = labels.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> slots;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) slots.push_back(static_cast<int>(i));
    }
    Simplex s;
    s.id = name_of(mask);
    s.dim = static_cast<int>(slots.size()) - 1;
    if (s.dim == 0) {
      s.label = labels[static_cast<std::size_t>(slots[0])];
    } else {
      for (int slot : slots) s.faces.push_back(name_of(mask & ~(1u << slot)));
    }
    out.insert(std::move(s));
  }
}

[[noreturn]] void throw_invalid(const ValidationReport& report, const char* what) {
  throw Error(ErrorCode::InvalidSchema, std::string(what) + ": " + report.front().message,
              report.front().simplex);
}

// Union-find over simplex ids. The root of the first argument of unite wins,
// so representatives come from the left/x1 side.
class Identifier {
 public:
  explicit Identifier(const Schema& s) : schema_(s) {}

  const SimplexId& find(const SimplexId& id) {
    auto it = parent_.find(id);
    if (it == parent_.end() || it->second == id) return id_ref(id);
    const SimplexId root = find(it->second);
    it->second = root;
    return id_ref(root);
  }

  void unite(const SimplexId& a, const SimplexId& b) {
    std::vector<std::pair<SimplexId, SimplexId>> work{{a, b}};
    while (!work.empty()) {
      auto [x, y] = work.back();
      work.pop_back();
      const auto rx = find(x);
      const auto ry = find(y);
      if (rx == ry) continue;
      const auto& sx = schema_.at(x);
      const auto& sy = schema_.at(y);
      if (sx.dim != sy.dim) {
        throw Error(ErrorCode::DimensionMismatch, "identification across dimensions", x + "," + y);
      }
      parent_[ry] = rx;
      parent_.try_emplace(rx, rx);
      for (std::size_t i = 0; i < sx.faces.size(); ++i) work.emplace_back(sx.faces[i], sy.faces[i]);
    }
  }

 private:
  const SimplexId& id_ref(const SimplexId& id) {
    return schema_.at(id).id;
  }

  const Schema& schema_;
  std::map<SimplexId, SimplexId> parent_;
};

struct Identified {
  Schema schema;
  std::map<SimplexId, SimplexId> rep;
};

Identified identify_aligned(const Schema& s,
                            const std::vector<std::pair<SimplexId, SimplexId>>& pairs) {
  Identifier uf(s);
  for (const auto& [a, b] : pairs) uf.unite(a, b);
  Identified out{Schema(s.registry()), {}};
  for (const auto& [id, simplex] : s.simplices()) out.rep[id] = uf.find(id);
  for (const auto& [id, simplex] : s.simplices()) {
    const auto& root = out.rep.at(id);
    if (simplex.dim == 0 && s.at(root).label != simplex.label) {
      throw Error(ErrorCode::LabelMismatch, "identified vertices carry different labels",
                  id + "," + root);
    }
    if (root != id) continue;
    Simplex merged = simplex;
    for (auto& f : merged.faces) f = out.rep.at(f);
    out.schema.insert(std::move(merged));
  }
  return out;
}

// Reorders the slots of every simplex by (rank of its vertex, old slot). Any
// global ranking keeps the simplicial identities intact because faces inherit
// the relative order of their parent's remaining slots. Unranked vertices
// share the largest rank, so simplices away from ranked vertices keep their order.
std::pair<Schema, std::map<SimplexId, std::vector<int>>> reindex_by_rank(
    const Schema& s, const std::map<SimplexId, int>& rank) {
  int unranked = 0;
  for (const auto& [_, r] : rank) unranked = std::max(unranked, r + 1);
  std::map<SimplexId, std::vector<int>> perms;
  Schema out(s.registry());
  for (const auto& [id, simplex] : s.simplices()) {
    const auto vs = s.vertex_slots(id);
    std::vector<int> order(vs.size());
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int slot) {
      auto it = rank.find(vs[static_cast<std::size_t>(slot)]);
      return std::pair{it == rank.end() ? unranked : it->second, slot};
    };
    std::sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
    Simplex moved = simplex;
    if (simplex.dim > 0) {
      for (std::size_t p = 0; p < order.size(); ++p) {
        moved.faces[p] = simplex.faces[static_cast<std::size_t>(order[p])];
      }
    }
    perms[id] = std::move(order);
    out.insert(std::move(moved));
  }
  return {std::move(out), std::move(perms)};
}

void check_matching(const Schema& ls, const SimplexId& x1, const Schema& rs, const SimplexId& x2,
                    const SlotMatching& m) {
  const auto& a = ls.at(x1);
  const auto& b = rs.at(x2);
  if (a.dim != b.dim) {
    throw Error(ErrorCode::DimensionMismatch, "glued simplices differ in dimension", x1 + "," + x2);
  }
  const auto n = static_cast<std::size_t>(a.dim + 1);
  if (m.right_slot.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "slot matching has the wrong size");
  }
  std::vector<bool> seen(n, false);
  for (int r : m.right_slot) {
    if (r < 0 || static_cast<std::size_t>(r) >= n || seen[static_cast<std::size_t>(r)]) {
      throw Error(ErrorCode::InvalidArgument, "slot matching is not a bijection");
    }
    seen[static_cast<std::size_t>(r)] = true;
  }
  const auto la = ls.slot_labels(x1);
  const auto lb = rs.slot_labels(x2);
  for (std::size_t k = 0; k < n; ++k) {
    if (la[k] != lb[static_cast<std::size_t>(m.right_slot[k])]) {
      throw Error(ErrorCode::LabelMismatch,
                  "matched slots carry different labels: " + la[k] + " vs " +
                      lb[static_cast<std::size_t>(m.right_slot[k])],
                  x1 + "," + x2);
    }
  }
}

std::vector<int> identity_perm(int dim) {
  std::vector<int> p(static_cast<std::size_t>(dim + 1));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

}  // namespace

Schema make_representable(const TypeRegistry& registry, std::span<const std::string> labels,
                          std::span<const std::string> vertex_names) {
  if (labels.empty()) throw Error(ErrorCode::InvalidArgument, "representable needs at least one label");
  if (labels.size() > 16) throw Error(ErrorCode::InvalidArgument, "representable too large");
  for (const auto& l : labels) (void)registry.at(l);
  const auto names = default_names(labels.size(), vertex_names);
  Schema out(registry);
  add_representable(out, labels, [&](unsigned mask) { return join_names(names, mask); });
  return out;
}

SimplexId representable_top(std::size_t slot_count, std::span<const std::string> vertex_names) {
  const auto names = default_names(slot_count, vertex_names);
  return join_names(names, (1u << slot_count) - 1);
}

ValidationReport validate_schema(const Schema& schema) {
  using K = Violation::Kind;
  ValidationReport report;
  bool structural_ok = true;
  for (const auto& [id, s] : schema.simplices()) {
    if (s.dim < 0) {
      report.push_back({K::NegativeDimension, id, "negative dimension"});
      structural_ok = false;
      continue;
    }
    const auto expected = s.dim == 0 ? 0u : static_cast<std::size_t>(s.dim + 1);
    if (s.faces.size() != expected) {
      report.push_back({K::FaceCount, id,
                        "expected " + std::to_string(expected) + " faces, found " +
                            std::to_string(s.faces.size())});
      structural_ok = false;
    }
    for (std::size_t i = 0; i < s.faces.size(); ++i) {
      const auto* f = schema.find(s.faces[i]);
      if (!f) {
        report.push_back({K::DanglingFace, id, "face " + std::to_string(i) + " references missing simplex " + s.faces[i]});
        structural_ok = false;
      } else if (f->dim != s.dim - 1) {
        report.push_back({K::FaceDimension, id, "face " + std::to_string(i) + " has dimension " + std::to_string(f->dim)});
        structural_ok = false;
      }
    }
    if (s.dim == 0) {
      if (!s.label) {
        report.push_back({K::Label, id, "vertex without label"});
      } else if (!schema.registry().contains(*s.label)) {
        report.push_back({K::UnknownDataType, id, "unknown datatype " + *s.label});
      }
    } else if (s.label) {
      report.push_back({K::Label, id, "only vertices carry labels"});
    }
  }
  if (!structural_ok) return report;
  for (const auto& [id, s] : schema.simplices()) {
    if (s.dim < 2) continue;
    std::string failures;
    for (int j = 0; j <= s.dim; ++j) {
      for (int i = 0; i < j; ++i) {
        const auto& lhs = schema.at(s.faces[static_cast<std::size_t>(j)]).faces[static_cast<std::size_t>(i)];
        const auto& rhs = schema.at(s.faces[static_cast<std::size_t>(i)]).faces[static_cast<std::size_t>(j - 1)];
        if (lhs != rhs) {
          if (!failures.empty()) failures += ", ";
          failures += "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        }
      }
    }
    if (!failures.empty()) {
      report.push_back({K::SimplicialIdentity, id, "face_i(face_j) != face_{j-1}(face_i) for " + failures});
    }
  }
  return report;
}

GlueResult disjoint_union(const Schema& left, const Schema& right) {
  GlueResult out;
  out.schema = Schema(TypeRegistry::merge(left.registry(), right.registry()));
  std::set<SimplexId> taken;
  for (const auto& [id, s] : left.simplices()) {
    out.schema.insert(s);
    out.left[id] = {id, identity_perm(s.dim)};
    taken.insert(id);
  }
  for (const auto& [id, _] : right.simplices()) {
    if (!left.contains(id)) taken.insert(id);
  }
  std::map<SimplexId, SimplexId> renamed;
  for (const auto& [id, _] : right.simplices()) {
    if (!left.contains(id)) {
      renamed[id] = id;
      continue;
    }
    SimplexId candidate = "r:" + id;
    while (taken.count(candidate)) candidate = "r:" + candidate;
    taken.insert(candidate);
    renamed[id] = candidate;
  }
  for (const auto& [id, s] : right.simplices()) {
    Simplex moved = s;
    moved.id = renamed.at(id);
    for (auto& f : moved.faces) f = renamed.at(f);
    out.right[id] = {moved.id, identity_perm(s.dim)};
    out.schema.insert(std::move(moved));
  }
  return out;
}

GlueResult glue(const Schema& left, const SimplexId& x1, const Schema& right, const SimplexId& x2,
                const SlotMatching& matching) {
  if (auto r = validate_schema(left); !r.empty()) throw_invalid(r, "left schema invalid");
  if (auto r = validate_schema(right); !r.empty()) throw_invalid(r, "right schema invalid");
  check_matching(left, x1, right, x2, matching);

  auto joined = disjoint_union(left, right);
  Schema work = std::move(joined.schema);
  const SimplexId x2u = joined.right.at(x2).id;

  std::map<SimplexId, std::vector<int>> perms;
  if (!matching.is_identity()) {
    std::map<SimplexId, int> rank;
    const auto vs = work.vertex_slots(x2u);
    for (std::size_t k = 0; k < matching.right_slot.size(); ++k) {
      const auto& v = vs[static_cast<std::size_t>(matching.right_slot[k])];
      auto [it, fresh] = rank.emplace(v, static_cast<int>(k));
      if (!fresh) it->second = std::min(it->second, static_cast<int>(k));
    }
    auto [re, p] = reindex_by_rank(work, rank);
    if (p.at(x2u) != matching.right_slot) {
      throw Error(ErrorCode::UnrealizableMatching,
                  "slot matching permutes slots that share a vertex", x2);
    }
    work = std::move(re);
    perms = std::move(p);
  }

  auto ident = identify_aligned(work, {{x1, x2u}});
  GlueResult out;
  out.schema = std::move(ident.schema);
  for (const auto& [id, place] : joined.left) {
    out.left[id] = {ident.rep.at(place.id), place.perm};
  }
  for (const auto& [id, place] : joined.right) {
    auto perm = perms.count(place.id) ? perms.at(place.id) : place.perm;
    out.right[id] = {ident.rep.at(place.id), std::move(perm)};
  }
  return out;
}

FoldResult fold(const Schema& schema, const SimplexId& x1, const SimplexId& x2,
                const SlotMatching& matching) {
  if (auto r = validate_schema(schema); !r.empty()) throw_invalid(r, "schema invalid");
  check_matching(schema, x1, schema, x2, matching);

  Schema work = schema;
  std::map<SimplexId, std::vector<int>> perms;
  if (!matching.is_identity()) {
    std::map<SimplexId, int> rank;
    auto put = [&](const SimplexId& v, int k) {
      auto [it, fresh] = rank.emplace(v, k);
      if (!fresh) it->second = std::min(it->second, k);
    };
    const auto v1 = schema.vertex_slots(x1);
    const auto v2 = schema.vertex_slots(x2);
    for (std::size_t k = 0; k < matching.right_slot.size(); ++k) {
      put(v1[k], static_cast<int>(k));
      put(v2[static_cast<std::size_t>(matching.right_slot[k])], static_cast<int>(k));
    }
    auto [re, p] = reindex_by_rank(work, rank);
    if (p.at(x1) != identity_perm(schema.at(x1).dim) || p.at(x2) != matching.right_slot) {
      throw Error(ErrorCode::UnrealizableMatching,
                  "slot matching cannot be realized by reordering slots", x1 + "," + x2);
    }
    work = std::move(re);
    perms = std::move(p);
  }

  auto ident = identify_aligned(work, {{x1, x2}});
  FoldResult out;
  out.schema = std::move(ident.schema);
  for (const auto& [id, s] : schema.simplices()) {
    auto perm = perms.count(id) ? perms.at(id) : identity_perm(s.dim);
    out.embedding[id] = {ident.rep.at(id), std::move(perm)};
  }
  return out;
}

Schema reassemble(const Schema& schema) {
  if (auto r = validate_schema(schema); !r.empty()) throw_invalid(r, "schema invalid");
  auto piece_id = [](const SimplexId& sigma, unsigned mask) {
    return sigma + "/" + std::to_string(mask);
  };
  // Disjoint union of one representable per simplex.
  Schema pieces(schema.registry());
  std::map<SimplexId, unsigned> full_mask;
  for (const auto& [id, s] : schema.simplices()) {
    const auto labels = schema.slot_labels(id);
    add_representable(pieces, labels, [&](unsigned mask) { return piece_id(id, mask); });
    full_mask[id] = (1u << (s.dim + 1)) - 1;
  }
  // Glue the representable of face_i(sigma) onto the i-th face of sigma's representable.
  std::vector<std::pair<SimplexId, SimplexId>> pairs;
  for (const auto& [id, s] : schema.simplices()) {
    for (int i = 0; i < static_cast<int>(s.faces.size()); ++i) {
      const auto& face = s.faces[static_cast<std::size_t>(i)];
      pairs.emplace_back(piece_id(face, full_mask.at(face)), piece_id(id, full_mask.at(id) & ~(1u << i)));
    }
  }
  auto ident = identify_aligned(pieces, pairs);

  // Name each class after the simplex whose representable's top lies in it.
  std::map<SimplexId, SimplexId> name_of_class;
  for (const auto& [id, _] : schema.simplices()) {
    const auto& root = ident.rep.at(piece_id(id, full_mask.at(id)));
    name_of_class.try_emplace(root, id);
  }
  auto name = [&](const SimplexId& root) {
    auto it = name_of_class.find(root);
    return it == name_of_class.end() ? root : it->second;
  };
  Schema out(schema.registry());
  for (const auto& [root, s] : ident.schema.simplices()) {
    Simplex renamed = s;
    renamed.id = name(root);
    for (auto& f : renamed.faces) f = name(f);
    out.insert(std::move(renamed));
  }
  return out;
}

std::optional<std::map<SimplexId, SimplexId>> find_isomorphism(const Schema& a, const Schema& b) {
  if (a.size() != b.size()) return std::nullopt;
  struct Indexed {
    std::vector<SimplexId> ids;
    std::map<SimplexId, int> index;
    std::vector<int> dim;
    std::vector<std::string> label;
    std::vector<std::vector<int>> faces;
    std::vector<std::vector<std::pair<int, int>>> cofaces;
  };
  auto build = [](const Schema& s) {
    Indexed x;
    for (const auto& [id, _] : s.simplices()) {
      x.index[id] = static_cast<int>(x.ids.size());
      x.ids.push_back(id);
    }
    const auto n = x.ids.size();
    x.dim.resize(n);
    x.label.resize(n);
    x.faces.resize(n);
    x.cofaces.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& sx = s.at(x.ids[i]);
      x.dim[i] = sx.dim;
      x.label[i] = sx.label.value_or("");
      for (std::size_t f = 0; f < sx.faces.size(); ++f) {
        const int fi = x.index.at(sx.faces[f]);
        x.faces[i].push_back(fi);
        x.cofaces[static_cast<std::size_t>(fi)].emplace_back(static_cast<int>(i), static_cast<int>(f));
      }
    }
    return x;
  };
  const Indexed A = build(a);
  const Indexed B = build(b);
  const std::size_t n = A.ids.size();

  // Joint colour refinement so colours are comparable across both schemas.
  std::vector<long> ca(n), cb(n);
  {
    std::map<std::tuple<int, std::string, std::size_t>, long> dict;
    auto colour = [&](const Indexed& x, std::size_t i) {
      auto key = std::tuple{x.dim[i], x.label[i], x.cofaces[i].size()};
      return dict.try_emplace(key, static_cast<long>(dict.size())).first->second;
    };
    for (std::size_t i = 0; i < n; ++i) ca[i] = colour(A, i);
    for (std::size_t i = 0; i < n; ++i) cb[i] = colour(B, i);
  }
  std::size_t classes = 0;
  for (std::size_t round = 0; round <= n; ++round) {
    std::map<std::vector<long>, long> dict;
    auto signature = [&](const Indexed& x, const std::vector<long>& c, std::size_t i) {
      std::vector<long> sig{c[i]};
      for (int f : x.faces[i]) sig.push_back(c[static_cast<std::size_t>(f)]);
      std::vector<std::pair<long, int>> co;
      for (auto [s, idx] : x.cofaces[i]) co.emplace_back(c[static_cast<std::size_t>(s)], idx);
      std::sort(co.begin(), co.end());
      sig.push_back(-1);
      for (auto [cc, idx] : co) {
        sig.push_back(cc);
        sig.push_back(idx);
      }
      return dict.try_emplace(std::move(sig), static_cast<long>(dict.size())).first->second;
    };
    std::vector<long> na(n), nb(n);
    for (std::size_t i = 0; i < n; ++i) na[i] = signature(A, ca, i);
    for (std::size_t i = 0; i < n; ++i) nb[i] = signature(B, cb, i);
    ca = std::move(na);
    cb = std::move(nb);
    if (dict.size() == classes) break;
    classes = dict.size();
  }
  {
    auto sa = ca, sb = cb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
  }

  std::vector<int> map_ab(n, -1), map_ba(n, -1);
  std::vector<int> trail;
  std::function<bool(int, int)> assign = [&](int x, int y) -> bool {
    const auto xs = static_cast<std::size_t>(x);
    const auto ys = static_cast<std::size_t>(y);
    if (map_ab[xs] != -1) return map_ab[xs] == y;
    if (map_ba[ys] != -1) return false;
    if (ca[xs] != cb[ys]) return false;
    map_ab[xs] = y;
    map_ba[ys] = x;
    trail.push_back(x);
    for (std::size_t f = 0; f < A.faces[xs].size(); ++f) {
      if (!assign(A.faces[xs][f], B.faces[ys][f])) return false;
    }
    return true;
  };
  auto undo = [&](std::size_t mark) {
    while (trail.size() > mark) {
      const int x = trail.back();
      trail.pop_back();
      map_ba[static_cast<std::size_t>(map_ab[static_cast<std::size_t>(x)])] = -1;
      map_ab[static_cast<std::size_t>(x)] = -1;
    }
  };
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return A.dim[static_cast<std::size_t>(x)] > A.dim[static_cast<std::size_t>(y)];
  });
  std::function<bool(std::size_t)> search = [&](std::size_t pos) -> bool {
    while (pos < n && map_ab[static_cast<std::size_t>(order[pos])] != -1) ++pos;
    if (pos == n) return true;
    const int x = order[pos];
    for (std::size_t y = 0; y < n; ++y) {
      if (map_ba[y] != -1 || cb[y] != ca[static_cast<std::size_t>(x)]) continue;
      const auto mark = trail.size();
      if (assign(x, static_cast<int>(y)) && search(pos + 1)) return true;
      undo(mark);
    }
    return false;
  };
  if (!search(0)) return std::nullopt;
  std::map<SimplexId, SimplexId> out;
  for (std::size_t i = 0; i < n; ++i) out[A.ids[i]] = B.ids[static_cast<std::size_t>(map_ab[i])];
  return out;
}

}  // namespace simplexdb
