#include "simplexdb/realization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "simplexdb/error.hpp"

namespace simplexdb {

namespace {

constexpr double kLoopRadius = 0.3;
constexpr double kArcOffset = 0.2;
constexpr int kCurveSegments = 48;

Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
double norm(Point a) { return std::hypot(a.x, a.y); }

double segment_distance(Point p, Point a, Point b, double* t_out = nullptr) {
  const Point ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  double t = 0;
  if (len2 > 0) t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
  if (t_out) *t_out = t;
  return norm(p - (a + t * ab));
}

// Distance to a polyline and arc-length fraction of the nearest point.
double polyline_distance(const Polyline& line, Point p, double* fraction = nullptr) {
  if (line.size() == 1) {
    if (fraction) *fraction = 0;
    return norm(p - line.front());
  }
  double total = 0;
  std::vector<double> lengths;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    lengths.push_back(norm(line[i + 1] - line[i]));
    total += lengths.back();
  }
  double best = std::numeric_limits<double>::infinity();
  double best_at = 0;
  double walked = 0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    double t = 0;
    const double d = segment_distance(p, line[i], line[i + 1], &t);
    if (d < best) {
      best = d;
      best_at = walked + t * lengths[i];
    }
    walked += lengths[i];
  }
  if (fraction) *fraction = total > 0 ? best_at / total : 0;
  return best;
}

// Planar barycentric coordinates; nullopt for a degenerate triangle.
std::optional<std::array<double, 3>> planar_barycentric(Point a, Point b, Point c, Point p) {
  const double det = (b.y - c.y) * (a.x - c.x) + (c.x - b.x) * (a.y - c.y);
  if (std::abs(det) < 1e-12) return std::nullopt;
  const double l0 = ((b.y - c.y) * (p.x - c.x) + (c.x - b.x) * (p.y - c.y)) / det;
  const double l1 = ((c.y - a.y) * (p.x - c.x) + (a.x - c.x) * (p.y - c.y)) / det;
  return std::array<double, 3>{l0, l1, 1 - l0 - l1};
}

std::vector<Point> vertex_points(const Schema& schema, const Layout& layout, const SimplexId& id) {
  std::vector<Point> out;
  for (const auto& v : schema.vertex_slots(id)) out.push_back(layout.points.at(v));
  return out;
}

}  // namespace

StandardSimplex::StandardSimplex(int n) : n_(n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "standard simplex of negative dimension");
}

bool StandardSimplex::contains(const std::vector<double>& coords) const {
  if (coords.size() != static_cast<std::size_t>(n_ + 1)) return false;
  double sum = 0;
  for (double x : coords) {
    if (!std::isfinite(x) || x < 0) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= kSimplexTolerance;
}

std::vector<double> StandardSimplex::vertex(int i) const {
  if (i < 0 || i > n_) throw Error(ErrorCode::FaceIndexOutOfRange, "vertex index out of range");
  std::vector<double> v(static_cast<std::size_t>(n_ + 1), 0.0);
  v[static_cast<std::size_t>(i)] = 1.0;
  return v;
}

Layout layout_schema(const Schema& schema, std::uint64_t seed) {
  std::vector<SimplexId> ids;
  for (const auto& [id, s] : schema.simplices()) {
    if (s.dim == 0) ids.push_back(id);
  }
  Layout out;
  const std::size_t n = ids.size();
  if (n == 0) return out;
  if (n == 1) {
    out.points[ids.front()] = {0, 0};
    return out;
  }
  std::map<SimplexId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[ids[i]] = i;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& [id, s] : schema.simplices()) {
    if (s.dim < 1) continue;
    // Every pair of distinct vertices of the simplex is drawn as an edge.
    const auto vs = schema.vertex_slots(id);
    for (std::size_t a = 0; a < vs.size(); ++a) {
      for (std::size_t b = a + 1; b < vs.size(); ++b) {
        auto i = index.at(vs[a]);
        auto j = index.at(vs[b]);
        if (i != j) edges.insert({std::min(i, j), std::max(i, j)});
      }
    }
  }

  std::mt19937_64 gen(seed);
  auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  const double spread = std::sqrt(static_cast<double>(n));
  std::vector<Point> pos(n);
  for (auto& p : pos) {
    p.x = (2 * uniform() - 1) * spread;
    p.y = (2 * uniform() - 1) * spread;
  }

  const double start_temp = 0.5 * spread;
  std::vector<Point> disp(n);
  for (int it = 0; it < kLayoutIterations; ++it) {
    const double temp = start_temp * (1.0 - static_cast<double>(it) / kLayoutIterations);
    std::fill(disp.begin(), disp.end(), Point{});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        Point d = pos[i] - pos[j];
        double len = norm(d);
        if (len < 1e-9) {
          d = {1e-3 * (uniform() - 0.5), 1e-3 * (uniform() - 0.5)};
          len = std::max(norm(d), 1e-9);
        }
        const Point push = (1.0 / (len * len)) * d;  // magnitude 1/len
        disp[i] = disp[i] + push;
        disp[j] = disp[j] - push;
      }
    }
    for (const auto& [i, j] : edges) {
      const Point d = pos[i] - pos[j];
      const Point pull = norm(d) * d;  // magnitude len^2
      disp[i] = disp[i] - pull;
      disp[j] = disp[j] + pull;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double len = norm(disp[i]);
      if (len < 1e-12) continue;
      const double step = std::min(0.1 * len, temp);
      pos[i] = pos[i] + (step / len) * disp[i];
    }
  }

  Point centroid{};
  for (const auto& p : pos) centroid = centroid + p;
  centroid = (1.0 / static_cast<double>(n)) * centroid;
  for (std::size_t i = 0; i < n; ++i) {
    Point p = pos[i] - centroid;
    // Keep distinct vertices apart even if the iteration collapsed them.
    for (std::size_t j = 0; j < i; ++j) {
      if (norm(p - out.points[ids[j]]) < 1e-6) p = p + Point{1e-3 * (1 + uniform()), 1e-3 * (1 + uniform())};
    }
    out.points[ids[i]] = p;
  }
  return out;
}

double layout_scale(const Layout& layout) {
  if (layout.points.empty()) return 1.0;
  double minx = std::numeric_limits<double>::infinity();
  double miny = minx;
  double maxx = -minx;
  double maxy = -minx;
  for (const auto& [_, p] : layout.points) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const double s = std::max(maxx - minx, maxy - miny);
  return s > 1e-12 ? s : 1.0;
}

Polyline edge_curve(const Schema& schema, const Layout& layout, const SimplexId& edge) {
  const auto& s = schema.at(edge);
  if (s.dim != 1) throw Error(ErrorCode::InvalidArgument, "not an edge", edge);
  const auto vs = schema.vertex_slots(edge);
  const Point u = layout.points.at(vs[0]);
  const Point v = layout.points.at(vs[1]);

  // Edges over the same vertex pair, in id order, get distinct shapes.
  std::vector<SimplexId> parallel;
  const std::set<SimplexId> ends(vs.begin(), vs.end());
  for (const auto& [id, other] : schema.simplices()) {
    if (other.dim != 1) continue;
    const auto ovs = schema.vertex_slots(id);
    if (std::set<SimplexId>(ovs.begin(), ovs.end()) == ends) parallel.push_back(id);
  }
  const auto k = static_cast<std::size_t>(std::find(parallel.begin(), parallel.end(), edge) - parallel.begin());

  Polyline out;
  if (vs[0] == vs[1]) {
    double base = norm(u) > 1e-9 ? std::atan2(u.y, u.x) : std::numbers::pi / 2;
    base += 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(parallel.size());
    const double r = kLoopRadius * (1.0 + 0.5 * static_cast<double>(k) / static_cast<double>(parallel.size()));
    const Point c = u + r * Point{std::cos(base), std::sin(base)};
    for (int i = 0; i <= kCurveSegments; ++i) {
      const double theta = base + std::numbers::pi + 2 * std::numbers::pi * i / kCurveSegments;
      out.push_back(c + r * Point{std::cos(theta), std::sin(theta)});
    }
    out.front() = u;
    out.back() = u;
    return out;
  }
  if (k == 0) return {u, v};
  // Offset arcs alternate sides, measured against a fixed orientation of the pair.
  const bool flipped = vs[0] > vs[1];
  const Point a = flipped ? v : u;
  const Point b = flipped ? u : v;
  const Point d = b - a;
  const double len = norm(d);
  const Point normal = len > 0 ? Point{-d.y / len, d.x / len} : Point{0, 1};
  const double h = kArcOffset * std::ceil(static_cast<double>(k) / 2.0) * len * (k % 2 ? 1.0 : -1.0);
  const Point control = 0.5 * (a + b) + (2 * h) * normal;
  for (int i = 0; i <= kCurveSegments; ++i) {
    const double t = static_cast<double>(i) / kCurveSegments;
    const Point p = ((1 - t) * (1 - t)) * a + (2 * (1 - t) * t) * control + (t * t) * b;
    out.push_back(p);
  }
  if (flipped) std::reverse(out.begin(), out.end());
  return out;
}

Polyline simplex_outline(const Schema& schema, const Layout& layout, const SimplexId& id) {
  const auto& s = schema.at(id);
  if (s.dim == 0) return {layout.points.at(id)};
  if (s.dim == 1) return edge_curve(schema, layout, id);
  auto pts = vertex_points(schema, layout, id);
  pts.push_back(pts.front());
  return pts;
}

std::optional<SimplexId> locate_point(const Schema& schema, const Layout& layout, Point p) {
  const double eps = kLocateEpsilon * layout_scale(layout);
  std::optional<SimplexId> best;
  int best_dim = 3;
  for (const auto& [id, s] : schema.simplices()) {
    if (s.dim >= best_dim || s.dim > 2) continue;
    bool hit = false;
    if (s.dim == 0) {
      hit = norm(p - layout.points.at(id)) <= eps;
    } else if (s.dim == 1) {
      hit = polyline_distance(edge_curve(schema, layout, id), p) <= eps / 2;
    } else {
      const auto pts = vertex_points(schema, layout, id);
      if (auto l = planar_barycentric(pts[0], pts[1], pts[2], p)) {
        hit = (*l)[0] >= 0 && (*l)[1] >= 0 && (*l)[2] >= 0;
      }
    }
    // Map iteration is in id order, so the first hit of a dimension is the lowest id.
    if (hit) {
      best = id;
      best_dim = s.dim;
    }
  }
  return best;
}

Barycentric barycentric_at(const Schema& schema, const Layout& layout, const SimplexId& id, Point p) {
  const auto& s = schema.at(id);
  if (s.dim == 0) return {id, {1.0}};
  if (s.dim == 1) {
    double t = 0;
    polyline_distance(edge_curve(schema, layout, id), p, &t);
    return {id, {1 - t, t}};
  }
  if (s.dim == 2) {
    const auto pts = vertex_points(schema, layout, id);
    auto l = planar_barycentric(pts[0], pts[1], pts[2], p);
    if (!l) return {id, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    return {id, {(*l)[0], (*l)[1], (*l)[2]}};
  }
  throw Error(ErrorCode::InvalidArgument, "no planar coordinates above dimension 2", id);
}

Zigzag curve_to_zigzag(const Schema& schema, const Layout& layout, const Polyline& curve) {
  if (curve.empty()) throw Error(ErrorCode::InvalidArgument, "empty polyline");
  const double eps = kLocateEpsilon * layout_scale(layout);
  const double step = eps / 2;

  // Samples at a fixed arc-length spacing along the whole curve, plus the endpoint.
  std::vector<Point> samples;
  {
    double next = 0;
    double walked = 0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
      const Point a = curve[i];
      const Point b = curve[i + 1];
      const double len = norm(b - a);
      while (next <= walked + len) {
        const double t = len > 0 ? (next - walked) / len : 0;
        samples.push_back(a + t * (b - a));
        next += step;
        if (len == 0) break;
      }
      walked += len;
    }
    if (samples.empty() || !(samples.back() == curve.back())) samples.push_back(curve.back());
  }

  struct Run {
    std::optional<SimplexId> id;
    std::size_t first;
    std::size_t last;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto at = locate_point(schema, layout, samples[i]);
    if (!runs.empty() && runs.back().id == at) {
      runs.back().last = i;
    } else {
      runs.push_back({at, i, i});
    }
  }
  if (!runs.front().id || !runs.back().id) {
    throw Error(ErrorCode::CurveOffRealization, "curve must start and end on the schema");
  }
  std::vector<Run> kept;
  for (const auto& r : runs) {
    if (!r.id) {
      const double gap = static_cast<double>(r.last - r.first + 1) * step;
      if (gap >= eps) {
        throw Error(ErrorCode::CurveOffRealization, "curve leaves the schema near sample " + std::to_string(r.first));
      }
      continue;
    }
    if (!kept.empty() && kept.back().id == r.id) {
      kept.back().last = r.last;
    } else {
      kept.push_back(r);
    }
  }

  Zigzag z{*kept.front().id, {}};
  for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
    const auto& a = *kept[k].id;
    const auto& b = *kept[k + 1].id;
    const int da = schema.at(a).dim;
    const int db = schema.at(b).dim;
    ZigzagStep st;
    st.target = b;
    std::vector<std::vector<int>> paths;
    SimplexId big;
    Point where;
    if (da > db) {
      st.direction = Direction::Descend;
      paths = schema.face_paths(a, b);
      big = a;
      where = samples[kept[k].last];
    } else if (da < db) {
      st.direction = Direction::Ascend;
      paths = schema.face_paths(b, a);
      big = b;
      where = samples[kept[k + 1].first];
    }
    if (paths.empty()) {
      throw Error(ErrorCode::NotIncident, "curve passes between non-incident simplices (" + a + ", " + b + ")",
                  a + "," + b);
    }
    st.face_index = paths.front();
    if (paths.size() > 1) {
      // The crossed face is the one whose deleted slots carry the least weight.
      const auto bc = barycentric_at(schema, layout, big, where);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& path : paths) {
        double w = 0;
        for (int d : path) w += bc.coords[static_cast<std::size_t>(d)];
        if (w < best) {
          best = w;
          st.face_index = path;
        }
      }
    }
    z.steps.push_back(std::move(st));
  }
  check_zigzag(schema, z);
  return z;
}

}  // namespace simplexdb
