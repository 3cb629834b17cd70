#include "simplexdb/virtual_table.hpp"

#include <algorithm>
#include <numeric>

#include "simplexdb/error.hpp"

namespace simplexdb {

namespace {

struct BuiltinInfo {
  int arity;
  // Argument subsets that determine the rest.
  std::vector<std::vector<int>> determining;
};

std::optional<BuiltinInfo> builtin_info(const std::string& name) {
  if (name == "addition") return BuiltinInfo{3, {{0, 1}, {0, 2}, {1, 2}}};
  if (name == "difference-d") return BuiltinInfo{2, {{0}, {1}}};
  return std::nullopt;
}

std::int64_t param(const VirtualTable& t, const std::string& name) {
  auto it = t.params.find(name);
  if (it == t.params.end()) {
    throw Error(ErrorCode::UnknownBuiltin, "missing built-in parameter " + name, t.builtin);
  }
  return it->second;
}

// Arguments of the built-in, in argument order.
std::vector<std::optional<std::int64_t>> to_args(const VirtualTable& t,
                                                 const std::vector<std::optional<Value>>& by_slot) {
  std::vector<std::optional<std::int64_t>> args(t.slots.size());
  for (std::size_t p = 0; p < t.slots.size(); ++p) {
    if (by_slot[p] && by_slot[p]->is_integer()) {
      args[static_cast<std::size_t>(t.slots[p])] = by_slot[p]->as_integer();
    }
  }
  return args;
}

// Fills in missing arguments; false when the relation has no solution or overflows.
bool solve(const VirtualTable& t, std::vector<std::optional<std::int64_t>>& a) {
  if (t.builtin == "addition") {
    std::int64_t r = 0;
    if (a[0] && a[1] && !a[2]) {
      if (__builtin_add_overflow(*a[0], *a[1], &r)) return false;
      a[2] = r;
    } else if (a[0] && a[2] && !a[1]) {
      if (__builtin_sub_overflow(*a[2], *a[0], &r)) return false;
      a[1] = r;
    } else if (a[1] && a[2] && !a[0]) {
      if (__builtin_sub_overflow(*a[2], *a[1], &r)) return false;
      a[0] = r;
    }
    return true;
  }
  if (t.builtin == "difference-d") {
    const auto d = param(t, "d");
    std::int64_t r = 0;
    if (a[0] && !a[1]) {
      if (__builtin_add_overflow(*a[0], d, &r)) return false;
      a[1] = r;
    } else if (a[1] && !a[0]) {
      if (__builtin_sub_overflow(*a[1], d, &r)) return false;
      a[0] = r;
    }
    return true;
  }
  return false;
}

bool holds(const VirtualTable& t, const std::vector<std::int64_t>& a) {
  std::int64_t r = 0;
  if (t.builtin == "addition") return !__builtin_add_overflow(a[0], a[1], &r) && r == a[2];
  if (t.builtin == "difference-d") return !__builtin_sub_overflow(a[1], a[0], &r) && r == param(t, "d");
  return false;
}

bool slot_types_conform(const Schema& schema, const SimplexId& simplex, const Tuple& tuple) {
  const auto& s = schema.at(simplex);
  if (tuple.size() != static_cast<std::size_t>(s.dim + 1)) return false;
  for (std::size_t p = 0; p < tuple.size(); ++p) {
    if (!conforms(schema.slot_type(simplex, static_cast<int>(p)), tuple[p])) return false;
  }
  return true;
}

}  // namespace

void check_virtual(const Schema& schema, const SimplexId& simplex, const VirtualTable& table) {
  const auto& s = schema.at(simplex);
  if (table.is_gamma()) {
    if (!table.slots.empty() || !table.params.empty()) {
      throw Error(ErrorCode::UnknownBuiltin, "gamma takes no slots or parameters", simplex);
    }
    return;
  }
  auto info = builtin_info(table.builtin);
  if (!info) throw Error(ErrorCode::UnknownBuiltin, "unknown virtual built-in", table.builtin);
  if (s.dim + 1 != info->arity || static_cast<int>(table.slots.size()) != info->arity) {
    throw Error(ErrorCode::NonConforming,
                table.builtin + " needs a simplex with " + std::to_string(info->arity) + " slots",
                simplex);
  }
  std::vector<int> sorted = table.slots;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < info->arity; ++i) {
    if (sorted[static_cast<std::size_t>(i)] != i) {
      throw Error(ErrorCode::NonConforming, "built-in slot assignment is not a permutation", simplex);
    }
  }
  for (int p = 0; p <= s.dim; ++p) {
    if (schema.slot_type(simplex, p).kind != TypeKind::Integer) {
      throw Error(ErrorCode::NonConforming, table.builtin + " needs integer columns", simplex);
    }
  }
  if (table.builtin == "difference-d") (void)param(table, "d");
}

bool virtual_contains(const Schema& schema, const SimplexId& simplex, const VirtualTable& table,
                      const Tuple& tuple) {
  if (!slot_types_conform(schema, simplex, tuple)) return false;
  if (table.is_gamma()) return true;
  std::vector<std::int64_t> args(table.slots.size());
  for (std::size_t p = 0; p < table.slots.size(); ++p) {
    args[static_cast<std::size_t>(table.slots[p])] = tuple[p].as_integer();
  }
  return holds(table, args);
}

std::vector<std::vector<int>> determining_sets(const Schema& schema, const SimplexId& simplex,
                                               const VirtualTable& table) {
  const auto& s = schema.at(simplex);
  if (table.is_gamma()) {
    std::vector<int> open;
    for (int p = 0; p <= s.dim; ++p) {
      if (schema.slot_type(simplex, p).kind != TypeKind::Enumerated) open.push_back(p);
    }
    return {open};
  }
  auto info = builtin_info(table.builtin);
  if (!info) throw Error(ErrorCode::UnknownBuiltin, "unknown virtual built-in", table.builtin);
  std::vector<std::vector<int>> out;
  for (const auto& args : info->determining) {
    std::vector<int> slots;
    for (std::size_t p = 0; p < table.slots.size(); ++p) {
      if (std::find(args.begin(), args.end(), table.slots[p]) != args.end()) {
        slots.push_back(static_cast<int>(p));
      }
    }
    out.push_back(std::move(slots));
  }
  return out;
}

std::optional<std::vector<Tuple>> virtual_complete(const Schema& schema, const SimplexId& simplex,
                                                   const VirtualTable& table,
                                                   const std::vector<std::optional<Value>>& bindings) {
  const auto n = static_cast<std::size_t>(schema.at(simplex).dim + 1);
  if (bindings.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "binding count does not match simplex", simplex);
  }
  const auto sets = determining_sets(schema, simplex, table);
  const bool determined = std::any_of(sets.begin(), sets.end(), [&](const std::vector<int>& set) {
    return std::all_of(set.begin(), set.end(),
                       [&](int p) { return bindings[static_cast<std::size_t>(p)].has_value(); });
  });
  if (!determined) return std::nullopt;

  std::vector<Tuple> out;
  if (table.is_gamma()) {
    // Odometer over the unbound (necessarily enumerated) slots.
    std::vector<std::size_t> open;
    for (std::size_t p = 0; p < n; ++p) {
      if (!bindings[p]) open.push_back(p);
    }
    Tuple base(n);
    for (std::size_t p = 0; p < n; ++p) {
      if (bindings[p]) base[p] = *bindings[p];
    }
    std::vector<std::size_t> digit(open.size(), 0);
    while (true) {
      Tuple t = base;
      for (std::size_t k = 0; k < open.size(); ++k) {
        t[open[k]] = Value(schema.slot_type(simplex, static_cast<int>(open[k])).values[digit[k]]);
      }
      if (virtual_contains(schema, simplex, table, t)) out.push_back(std::move(t));
      std::size_t k = 0;
      for (; k < open.size(); ++k) {
        const auto size = schema.slot_type(simplex, static_cast<int>(open[k])).values.size();
        if (++digit[k] < size) break;
        digit[k] = 0;
      }
      if (k == open.size()) break;
    }
    return out;
  }

  auto args = to_args(table, bindings);
  for (std::size_t p = 0; p < n; ++p) {
    if (bindings[p] && !bindings[p]->is_integer()) return out;
  }
  if (!solve(table, args)) return out;
  Tuple t(n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& a = args[static_cast<std::size_t>(table.slots[p])];
    if (!a) return out;
    t[p] = Value(*a);
  }
  if (virtual_contains(schema, simplex, table, t)) out.push_back(std::move(t));
  return out;
}

VirtualTable permute_slots(const VirtualTable& table, const std::vector<int>& perm) {
  if (table.is_gamma()) return table;
  VirtualTable out = table;
  for (std::size_t p = 0; p < perm.size(); ++p) {
    out.slots[p] = table.slots[static_cast<std::size_t>(perm[p])];
  }
  return out;
}

std::string describe(const VirtualTable& table) {
  if (table.is_gamma()) return "every conforming tuple";
  static const char* kNames[] = {"a", "b", "c"};
  std::vector<std::string> cols(table.slots.size());
  for (std::size_t p = 0; p < table.slots.size(); ++p) cols[p] = kNames[table.slots[p]];
  if (table.builtin == "addition") return "c = a + b over columns (" + cols[0] + "," + cols[1] + "," + cols[2] + ")";
  if (table.builtin == "difference-d") {
    return "b - a = " + std::to_string(table.params.at("d")) + " over columns (" + cols[0] + "," +
           cols[1] + ")";
  }
  return table.builtin;
}

std::vector<Tuple> sample_rows(const Schema& schema, const SimplexId& simplex,
                               const VirtualTable& table, std::size_t count) {
  const auto n = static_cast<std::size_t>(schema.at(simplex).dim + 1);
  std::vector<Tuple> out;
  if (table.is_gamma()) {
    auto all = virtual_complete(schema, simplex, table, std::vector<std::optional<Value>>(n));
    if (all) {
      for (auto& t : *all) {
        if (out.size() == count) break;
        out.push_back(std::move(t));
      }
    }
    return out;
  }
  const auto sets = determining_sets(schema, simplex, table);
  const auto& seed_slots = sets.front();
  for (std::int64_t i = 0; out.size() < count && i < static_cast<std::int64_t>(count) * 4; ++i) {
    std::vector<std::optional<Value>> bind(n);
    std::int64_t v = i;
    for (int p : seed_slots) bind[static_cast<std::size_t>(p)] = Value(v++);
    if (auto rows = virtual_complete(schema, simplex, table, bind)) {
      for (auto& t : *rows) out.push_back(std::move(t));
    }
  }
  if (out.size() > count) out.resize(count);
  return out;
}

}  // namespace simplexdb
