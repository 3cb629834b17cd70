#include "simplexdb/tile.hpp"

#include <chrono>
#include <regex>

#include "simplexdb/error.hpp"

namespace simplexdb {

std::int64_t parse_timestamp(const std::string& text) {
  static const std::regex pattern(
      R"((\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2})(?:\.\d+)?)?)?(Z|[+-]\d{2}:\d{2})?)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) {
    throw Error(ErrorCode::InvalidProvenance, "malformed timestamp '" + text + "'", text);
  }
  using namespace std::chrono;
  const year_month_day ymd{year{std::stoi(m[1])}, month{unsigned(std::stoi(m[2]))}, day{unsigned(std::stoi(m[3]))}};
  const int hh = m[4].matched ? std::stoi(m[4]) : 0;
  const int mm = m[5].matched ? std::stoi(m[5]) : 0;
  const int ss = m[6].matched ? std::stoi(m[6]) : 0;
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    throw Error(ErrorCode::InvalidProvenance, "timestamp out of range '" + text + "'", text);
  }
  std::int64_t secs = sys_days(ymd).time_since_epoch().count() * 86400LL + hh * 3600 + mm * 60 + ss;
  if (m[7].matched && m[7] != "Z") {
    const std::string zone = m[7];
    const int offset = std::stoi(zone.substr(1, 2)) * 3600 + std::stoi(zone.substr(4, 2)) * 60;
    secs += zone[0] == '+' ? -offset : offset;
  }
  return secs;
}

void check_provenance(const Provenance& p) {
  if (parse_timestamp(p.created_at) > parse_timestamp(p.freshness)) {
    throw Error(ErrorCode::InvalidProvenance,
                "freshness " + p.freshness + " precedes created_at " + p.created_at, p.freshness);
  }
}

void check_tile(const Tile& tile) {
  if (tile.name.empty()) throw Error(ErrorCode::MalformedDocument, "tile has no name");
  auto report = validate_schema(tile.schema);
  if (!report.empty()) {
    throw Error(ErrorCode::InvalidSchema, "tile " + tile.name + ": " + report.front().message,
                report.front().simplex);
  }
  if (!tile.schema.contains(tile.top)) {
    throw Error(ErrorCode::UnknownSimplex, "tile top " + tile.top + " is not in its schema", tile.top);
  }
  if (tile.schema.closure(tile.top).size() != tile.schema.size()) {
    throw Error(ErrorCode::InvalidSchema, "tile " + tile.name + " has simplices outside the closure of " + tile.top,
                tile.top);
  }
  if (tile.table.simplex != tile.top) {
    throw Error(ErrorCode::SimplexMismatch, "tile table sits on " + tile.table.simplex + ", not " + tile.top,
                tile.table.simplex);
  }
  check_provenance(tile.provenance);
  tile_sheaf(tile);
}

Sheaf tile_sheaf(const Tile& tile) { return set_table(Sheaf(tile.schema), tile.table); }

void TileLibrary::add(Tile tile) {
  check_tile(tile);
  auto name = tile.name;
  tiles_.insert_or_assign(std::move(name), std::move(tile));
}

const Tile* TileLibrary::find(const std::string& name) const {
  auto it = tiles_.find(name);
  return it == tiles_.end() ? nullptr : &it->second;
}

const Tile& TileLibrary::at(const std::string& name) const {
  if (const auto* t = find(name)) return *t;
  throw Error(ErrorCode::NotFound, "no tile named " + name, name);
}

std::vector<const Tile*> TileLibrary::list(bool verified_only) const {
  std::vector<const Tile*> out;
  for (const auto& [name, t] : tiles_) {
    if (!verified_only || t.provenance.verified) out.push_back(&t);
  }
  return out;
}

std::string_view to_string(LogEntry::Op op) {
  switch (op) {
    case LogEntry::Op::Place: return "place";
    case LogEntry::Op::Drop: return "drop";
    case LogEntry::Op::Fold: return "fold";
  }
  return "?";
}

LogEntry::Op parse_log_op(std::string_view text) {
  if (text == "place") return LogEntry::Op::Place;
  if (text == "drop") return LogEntry::Op::Drop;
  if (text == "fold") return LogEntry::Op::Fold;
  throw Error(ErrorCode::MalformedDocument, "unknown log op '" + std::string(text) + "'", std::string(text));
}

Workspace empty_workspace(std::uint64_t seed) {
  Workspace ws;
  ws.seed = seed;
  return ws;
}

namespace {

void require_policy(const Sheaf& a, const SimplexId& x1, const Sheaf& b, const SimplexId& x2,
                    const std::optional<CombinePolicy>& policy) {
  if (policy) return;
  if (a.schema().contains(x1) && b.schema().contains(x2) && a.is_concrete(x1) && b.is_concrete(x2)) {
    throw Error(ErrorCode::PolicyRequired,
                "both " + x1 + " and " + x2 + " carry tables; choose INTERSECT, UNION_ALL or UNION_DEDUP",
                x1 + "," + x2);
  }
}

std::vector<ProvenanceRecord> remap(const std::vector<ProvenanceRecord>& records, const Embedding& emb) {
  auto out = records;
  for (auto& r : out) r.simplex = emb.at(r.simplex).id;
  return out;
}

Workspace finish(const Workspace& before, Sheaf sheaf, std::vector<ProvenanceRecord> provenance, LogEntry entry) {
  Workspace out;
  out.seed = before.seed;
  out.sheaf = std::move(sheaf);
  out.layout = layout_schema(out.sheaf.schema(), out.seed);
  out.provenance = std::move(provenance);
  out.log = before.log;
  out.log.push_back(std::move(entry));
  return out;
}

}  // namespace

Workspace drop_tile(const Workspace& ws, const Tile& tile, const std::optional<Attachment>& at,
                    std::optional<CombinePolicy> policy) {
  check_tile(tile);
  const Sheaf piece = tile_sheaf(tile);
  LogEntry entry;
  entry.tile = tile;
  entry.policy = policy;
  if (!at) {
    auto g = disjoint_union(ws.sheaf, piece);
    entry.op = LogEntry::Op::Place;
    auto prov = remap(ws.provenance, g.left);
    prov.push_back({tile.name, g.right.at(tile.top).id, tile.provenance});
    return finish(ws, std::move(g.sheaf), std::move(prov), std::move(entry));
  }
  require_policy(ws.sheaf, at->target, piece, at->tile_simplex, policy);
  auto g = glue_sheaves(ws.sheaf, at->target, piece, at->tile_simplex, at->matching,
                        policy.value_or(CombinePolicy::Intersect));
  entry.op = LogEntry::Op::Drop;
  entry.target = at->target;
  entry.other = at->tile_simplex;
  entry.matching = at->matching;
  auto prov = remap(ws.provenance, g.left);
  prov.push_back({tile.name, g.right.at(tile.top).id, tile.provenance});
  return finish(ws, std::move(g.sheaf), std::move(prov), std::move(entry));
}

Workspace fold_workspace(const Workspace& ws, const SimplexId& x1, const SimplexId& x2,
                         const SlotMatching& matching, std::optional<CombinePolicy> policy) {
  require_policy(ws.sheaf, x1, ws.sheaf, x2, policy);
  auto f = fold_sheaf(ws.sheaf, x1, x2, matching, policy.value_or(CombinePolicy::Intersect));
  LogEntry entry;
  entry.op = LogEntry::Op::Fold;
  entry.target = x1;
  entry.other = x2;
  entry.matching = matching;
  entry.policy = policy;
  return finish(ws, std::move(f.sheaf), remap(ws.provenance, f.embedding), std::move(entry));
}

Workspace apply(const Workspace& ws, const LogEntry& entry) {
  switch (entry.op) {
    case LogEntry::Op::Place:
    case LogEntry::Op::Drop: {
      if (!entry.tile) throw Error(ErrorCode::MalformedDocument, "log entry without a tile");
      std::optional<Attachment> at;
      if (entry.op == LogEntry::Op::Drop) at = Attachment{entry.target, entry.other, entry.matching};
      return drop_tile(ws, *entry.tile, at, entry.policy);
    }
    case LogEntry::Op::Fold:
      return fold_workspace(ws, entry.target, entry.other, entry.matching, entry.policy);
  }
  throw Error(ErrorCode::MalformedDocument, "unknown log entry");
}

Workspace replay(std::uint64_t seed, const std::vector<LogEntry>& log) {
  Workspace ws = empty_workspace(seed);
  for (const auto& e : log) ws = apply(ws, e);
  return ws;
}

WorkspaceQuery run_query(const Workspace& ws, const QueryPath& path, const SelectionSpec& wanted) {
  Zigzag z = std::holds_alternative<Zigzag>(path) ? std::get<Zigzag>(path)
                                                   : curve_to_zigzag(ws.schema(), ws.layout, std::get<Polyline>(path));
  check_zigzag(ws.schema(), z);
  const SimplexId where = wanted.simplex.value_or(z.start);
  Selection sel;
  switch (wanted.kind) {
    case SelectionSpec::Kind::All: sel = select_all(ws.sheaf, where); break;
    case SelectionSpec::Kind::Keys: sel = select_keys(ws.sheaf, where, wanted.keys); break;
    case SelectionSpec::Kind::Values: sel = select_values(ws.sheaf, where, wanted.values); break;
  }
  auto result = evaluate(ws.sheaf, z, sel);
  return {std::move(z), std::move(result)};
}

}  // namespace simplexdb
