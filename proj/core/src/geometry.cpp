#include "qcorr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "predicates.hpp"
#include "qcorr/error.hpp"

namespace qcorr::geometry {

using detail::incircle;
using detail::orient2d;

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// ---------------------------------------------------------------------------
// NeighborhoodGraph

NeighborhoodGraph::NeighborhoodGraph(std::vector<NodeId> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());

  for (Edge& e : edges) {
    if (e.u == e.v) {
      throw PreconditionError("NeighborhoodGraph: self-loop at node " + std::to_string(e.u));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!contains(e.u) || !contains(e.v)) {
      throw PreconditionError("NeighborhoodGraph: edge (" + std::to_string(e.u) + ", " +
                              std::to_string(e.v) + ") names an unlisted node");
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }),
              edges.end());
  edges_ = std::move(edges);

  offsets_.assign(nodes_.size() + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[position(e.u) + 1];
    ++offsets_[position(e.v) + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[fill[position(e.u)]++] = e.v;
    adjacency_[fill[position(e.v)]++] = e.u;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

NeighborhoodGraph NeighborhoodGraph::over_range(std::size_t n, std::vector<Edge> edges) {
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  return NeighborhoodGraph(std::move(nodes), std::move(edges));
}

bool NeighborhoodGraph::contains(NodeId id) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), id);
}

std::size_t NeighborhoodGraph::position(NodeId id) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id) {
    throw PreconditionError("NeighborhoodGraph: unknown node " + std::to_string(id));
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool NeighborhoodGraph::has_edge(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{a, b},
                                   [](const Edge& e, const std::pair<NodeId, NodeId>& k) {
                                     return e.u != k.first ? e.u < k.first : e.v < k.second;
                                   });
  return it != edges_.end() && it->u == a && it->v == b;
}

std::optional<double> NeighborhoodGraph::label(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  for (NodeId n : neighbors(a)) {
    if (n == b) {
      const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{a, b},
                                       [](const Edge& e, const std::pair<NodeId, NodeId>& k) {
                                         return e.u != k.first ? e.u < k.first : e.v < k.second;
                                       });
      return it->label;
    }
  }
  return std::nullopt;
}

std::span<const NodeId> NeighborhoodGraph::neighbors(NodeId id) const {
  if (!contains(id)) return {};
  const std::size_t p = position(id);
  return {adjacency_.data() + offsets_[p], offsets_[p + 1] - offsets_[p]};
}

// ---------------------------------------------------------------------------
// Delaunay: lexicographic sweep insertion with Lawson flips. Every new point
// lies outside the current hull, so insertion only ever fans onto the
// visible hull chain.

namespace {

struct Tri {
  std::array<int, 3> v;  // counterclockwise
  std::array<int, 3> n;  // n[i] is across the edge opposite v[i]
};

class Sweep {
public:
  explicit Sweep(std::span<const Point2> pts) : pts_(pts) {}

  std::vector<Tri> run(const std::vector<int>& order);

private:
  int slot_of(int t, int vertex) const {
    const auto& v = tris_[static_cast<std::size_t>(t)].v;
    for (int i = 0; i < 3; ++i) {
      if (v[static_cast<std::size_t>(i)] == vertex) return i;
    }
    return -1;
  }
  // Slot in triangle t of the edge (a, b), i.e. the slot of its third vertex.
  int edge_slot(int t, int a, int b) const {
    const auto& v = tris_[static_cast<std::size_t>(t)].v;
    for (int i = 0; i < 3; ++i) {
      const int x = v[static_cast<std::size_t>((i + 1) % 3)];
      const int y = v[static_cast<std::size_t>((i + 2) % 3)];
      if ((x == a && y == b) || (x == b && y == a)) return i;
    }
    return -1;
  }
  void set_neighbor(int t, int a, int b, int other) {
    if (t < 0) return;
    const int s = edge_slot(t, a, b);
    tris_[static_cast<std::size_t>(t)].n[static_cast<std::size_t>(s)] = other;
  }
  int add(int a, int b, int c) {
    tris_.push_back(Tri{{a, b, c}, {-1, -1, -1}});
    return static_cast<int>(tris_.size()) - 1;
  }
  void note_hull_edge(int t, int a, int b) {
    // Record t as the owner of hull edge a->b when it is a ccw boundary edge.
    if (next_[static_cast<std::size_t>(a)] == b) hull_tri_[static_cast<std::size_t>(a)] = t;
  }
  void legalize(int t, int p);

  std::span<const Point2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> next_, prev_, hull_tri_;
};

void Sweep::legalize(int t0, int p0) {
  std::vector<std::pair<int, int>> stack{{t0, p0}};
  while (!stack.empty()) {
    const auto [t, p] = stack.back();
    stack.pop_back();
    const int sp = slot_of(t, p);
    if (sp < 0) continue;
    Tri& tri = tris_[static_cast<std::size_t>(t)];
    const int a = tri.v[static_cast<std::size_t>((sp + 1) % 3)];
    const int b = tri.v[static_cast<std::size_t>((sp + 2) % 3)];
    const int t2 = tri.n[static_cast<std::size_t>(sp)];
    if (t2 < 0) continue;
    const int s2 = edge_slot(t2, a, b);
    const int d = tris_[static_cast<std::size_t>(t2)].v[static_cast<std::size_t>(s2)];
    const auto P = [&](int i) { return pts_[static_cast<std::size_t>(i)]; };
    const auto in = incircle(P(p), P(a), P(b), P(d));
    // Cocircular: keep whichever diagonal touches the lowest index.
    if (in < 0 || (in == 0 && std::min(p, d) > std::min(a, b))) continue;

    // t = (p, a, b), t2 = (b, a, d)  ->  t = (p, a, d), t2 = (p, d, b)
    const int n_pa = tris_[static_cast<std::size_t>(t)].n[static_cast<std::size_t>(edge_slot(t, p, a))];
    const int n_bp = tris_[static_cast<std::size_t>(t)].n[static_cast<std::size_t>(edge_slot(t, b, p))];
    const int n_ad = tris_[static_cast<std::size_t>(t2)].n[static_cast<std::size_t>(edge_slot(t2, a, d))];
    const int n_db = tris_[static_cast<std::size_t>(t2)].n[static_cast<std::size_t>(edge_slot(t2, d, b))];

    tris_[static_cast<std::size_t>(t)] = Tri{{p, a, d}, {-1, -1, -1}};
    tris_[static_cast<std::size_t>(t2)] = Tri{{p, d, b}, {-1, -1, -1}};
    Tri& nt = tris_[static_cast<std::size_t>(t)];
    Tri& nt2 = tris_[static_cast<std::size_t>(t2)];
    nt.n = {n_ad, t2, n_pa};   // opposite p: (a,d); opposite a: (d,p); opposite d: (p,a)
    nt2.n = {n_db, n_bp, t};   // opposite p: (d,b); opposite d: (b,p); opposite b: (p,d)

    set_neighbor(n_ad, a, d, t);
    set_neighbor(n_bp, b, p, t2);
    if (n_ad < 0) note_hull_edge(t, a, d);
    if (n_pa < 0) note_hull_edge(t, p, a);
    if (n_db < 0) note_hull_edge(t2, d, b);
    if (n_bp < 0) note_hull_edge(t2, b, p);

    stack.emplace_back(t, p);
    stack.emplace_back(t2, p);
  }
}

std::vector<Tri> Sweep::run(const std::vector<int>& order) {
  const std::size_t n = pts_.size();
  next_.assign(n, -1);
  prev_.assign(n, -1);
  hull_tri_.assign(n, -1);
  const auto P = [&](int i) { return pts_[static_cast<std::size_t>(i)]; };

  std::size_t k = 2;
  int turn = 0;
  for (; k < order.size(); ++k) {
    turn = orient2d(P(order[0]), P(order[1]), P(order[k]));
    if (turn != 0) break;
  }
  if (k >= order.size()) throw DegenerateGeometry("delaunay: all points are collinear");

  // Fan from the collinear prefix onto the first off-line point.
  const int apex = order[k];
  std::vector<int> fan;
  for (std::size_t i = 0; i + 1 < k + 0 || i + 1 <= k - 1; ++i) {
    const int a = order[i], b = order[i + 1];
    fan.push_back(turn > 0 ? add(a, b, apex) : add(b, a, apex));
  }
  for (std::size_t i = 0; i + 1 < fan.size(); ++i) {
    const int shared = order[i + 1];
    set_neighbor(fan[i], shared, apex, fan[i + 1]);
    set_neighbor(fan[i + 1], shared, apex, fan[i]);
  }
  std::vector<int> ring;
  if (turn > 0) {
    for (std::size_t i = 0; i < k; ++i) ring.push_back(order[i]);
    ring.push_back(apex);
  } else {
    ring.push_back(order[0]);
    ring.push_back(apex);
    for (std::size_t i = k - 1; i >= 1; --i) ring.push_back(order[i]);
  }
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const int a = ring[i], b = ring[(i + 1) % ring.size()];
    next_[static_cast<std::size_t>(a)] = b;
    prev_[static_cast<std::size_t>(b)] = a;
  }
  for (int t : fan) {
    const auto& v = tris_[static_cast<std::size_t>(t)].v;
    for (int i = 0; i < 3; ++i) note_hull_edge(t, v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>((i + 1) % 3)]);
  }

  for (std::size_t q = k + 1; q < order.size(); ++q) {
    const int p = order[q];
    const int start = order[q - 1];
    int left = start, right = start;
    while (orient2d(P(prev_[static_cast<std::size_t>(left)]), P(left), P(p)) < 0) {
      left = prev_[static_cast<std::size_t>(left)];
    }
    while (orient2d(P(right), P(next_[static_cast<std::size_t>(right)]), P(p)) < 0) {
      right = next_[static_cast<std::size_t>(right)];
    }

    std::vector<int> created;
    for (int v = left; v != right; v = next_[static_cast<std::size_t>(v)]) {
      const int w = next_[static_cast<std::size_t>(v)];
      const int old = hull_tri_[static_cast<std::size_t>(v)];
      const int t = add(v, p, w);
      tris_[static_cast<std::size_t>(t)].n[1] = old;  // across (w, v)
      set_neighbor(old, v, w, t);
      if (!created.empty()) {
        const int prev_t = created.back();
        tris_[static_cast<std::size_t>(t)].n[2] = prev_t;                 // across (v, p)
        tris_[static_cast<std::size_t>(prev_t)].n[0] = t;                // across (p, v)
      }
      created.push_back(t);
    }
    for (int v = next_[static_cast<std::size_t>(left)]; v != right;) {
      const int w = next_[static_cast<std::size_t>(v)];
      next_[static_cast<std::size_t>(v)] = prev_[static_cast<std::size_t>(v)] = -1;
      hull_tri_[static_cast<std::size_t>(v)] = -1;
      v = w;
    }
    next_[static_cast<std::size_t>(left)] = p;
    prev_[static_cast<std::size_t>(p)] = left;
    next_[static_cast<std::size_t>(p)] = right;
    prev_[static_cast<std::size_t>(right)] = p;
    hull_tri_[static_cast<std::size_t>(left)] = created.front();
    hull_tri_[static_cast<std::size_t>(p)] = created.back();

    for (int t : created) legalize(t, p);
  }
  return tris_;
}

// Sorted unique order plus, for every input index, its representative.
std::pair<std::vector<int>, std::vector<int>> unique_order(std::span<const Point2> pts) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const Point2 pa = pts[static_cast<std::size_t>(a)], pb = pts[static_cast<std::size_t>(b)];
    return pa.x != pb.x ? pa.x < pb.x : pa.y < pb.y;
  });
  std::vector<int> rep(pts.size());
  std::vector<int> order;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const int cur = idx[i];
    if (!order.empty() && pts[static_cast<std::size_t>(order.back())] == pts[static_cast<std::size_t>(cur)]) {
      rep[static_cast<std::size_t>(cur)] = order.back();
    } else {
      order.push_back(cur);
      rep[static_cast<std::size_t>(cur)] = cur;
    }
  }
  return {order, rep};
}

}  // namespace

std::vector<std::array<NodeId, 3>> delaunay_triangles(std::span<const Point2> points) {
  const auto [order, rep] = unique_order(points);
  if (order.size() < 3) {
    throw DegenerateGeometry("delaunay: need at least 3 distinct points, got " +
                             std::to_string(order.size()));
  }
  Sweep sweep(points);
  const std::vector<Tri> tris = sweep.run(order);
  std::vector<std::array<NodeId, 3>> out;
  out.reserve(tris.size());
  for (const Tri& t : tris) {
    out.push_back({static_cast<NodeId>(t.v[0]), static_cast<NodeId>(t.v[1]),
                   static_cast<NodeId>(t.v[2])});
  }
  return out;
}

NeighborhoodGraph delaunay(std::span<const Point2> points) {
  const auto tris = delaunay_triangles(points);
  const auto [order, rep] = unique_order(points);
  std::vector<Edge> edges;
  edges.reserve(tris.size() * 3);
  for (const auto& t : tris) {
    for (int i = 0; i < 3; ++i) {
      edges.push_back(Edge{t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)], std::nullopt});
    }
  }
  // Duplicates inherit the adjacency of their representative.
  std::vector<std::vector<NodeId>> dups(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (rep[i] != static_cast<int>(i)) dups[static_cast<std::size_t>(rep[i])].push_back(i);
  }
  const std::size_t base = edges.size();
  for (std::size_t e = 0; e < base; ++e) {
    const NodeId u = edges[e].u, v = edges[e].v;
    for (NodeId du : dups[u]) {
      edges.push_back(Edge{du, v, std::nullopt});
      for (NodeId dv : dups[v]) edges.push_back(Edge{du, dv, std::nullopt});
    }
    for (NodeId dv : dups[v]) edges.push_back(Edge{u, dv, std::nullopt});
  }
  return NeighborhoodGraph::over_range(points.size(), std::move(edges));
}

std::vector<NodeId> convex_hull(std::span<const Point2> points) {
  if (points.empty()) return {};
  const auto [order, rep] = unique_order(points);
  if (order.size() == 1) return {static_cast<NodeId>(order[0])};
  const auto P = [&](int i) { return points[static_cast<std::size_t>(i)]; };

  std::vector<int> hull;
  hull.reserve(order.size() * 2);
  for (int idx : order) {  // lower chain
    while (hull.size() >= 2 && orient2d(P(hull[hull.size() - 2]), P(hull.back()), P(idx)) <= 0) {
      hull.pop_back();
    }
    hull.push_back(idx);
  }
  const std::size_t lower = hull.size() + 1;
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {  // upper chain
    while (hull.size() >= lower && orient2d(P(hull[hull.size() - 2]), P(hull.back()), P(*it)) <= 0) {
      hull.pop_back();
    }
    hull.push_back(*it);
  }
  hull.pop_back();  // first point repeated
  if (hull.size() == 2 && hull[0] == hull[1]) hull.pop_back();
  return {hull.begin(), hull.end()};
}

NeighborhoodGraph grid_neighbors(std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) throw PreconditionError("grid_neighbors: empty lattice");
  std::vector<Edge> edges;
  edges.reserve(2 * nx * ny);
  for (std::size_t r = 0; r < ny; ++r) {
    for (std::size_t c = 0; c < nx; ++c) {
      const NodeId id = r * nx + c;
      if (c + 1 < nx) edges.push_back(Edge{id, id + 1, std::nullopt});
      if (r + 1 < ny) edges.push_back(Edge{id, id + nx, std::nullopt});
    }
  }
  return NeighborhoodGraph::over_range(nx * ny, std::move(edges));
}

double signed_area2(std::span<const Point2> polygon) {
  double acc = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2 a = polygon[i], b = polygon[(i + 1) % polygon.size()];
    acc += a.x * b.y - a.y * b.x;
  }
  return acc;
}

namespace {

bool on_segment(Point2 p, Point2 a, Point2 b) {
  if (orient2d(a, b, p) != 0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return distance(p, Point2{a.x + t * dx, a.y + t * dy});
}

}  // namespace

bool point_in_polygon(Point2 p, std::span<const Point2> polygon) {
  if (polygon.size() < 3) throw DegenerateGeometry("point_in_polygon: fewer than 3 vertices");
  bool has_turn = false;
  for (std::size_t i = 0; i + 2 < polygon.size() + 2 && !has_turn; ++i) {
    has_turn = orient2d(polygon[i % polygon.size()], polygon[(i + 1) % polygon.size()],
                        polygon[(i + 2) % polygon.size()]) != 0;
    if (i >= polygon.size()) break;
  }
  if (!has_turn || signed_area2(polygon) == 0.0) {
    throw DegenerateGeometry("point_in_polygon: polygon has zero area");
  }

  int winding = 0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2 a = polygon[i], b = polygon[(i + 1) % polygon.size()];
    if (on_segment(p, a, b)) return true;
    if (a.y <= p.y) {
      if (b.y > p.y && orient2d(a, b, p) > 0) ++winding;
    } else if (b.y <= p.y && orient2d(a, b, p) < 0) {
      --winding;
    }
  }
  return winding != 0;
}

bool hull_contains(std::span<const Point2> points, Point2 p, double tolerance) {
  const auto hull = convex_hull(points);
  if (hull.empty()) return false;
  if (hull.size() == 1) return distance(points[hull[0]], p) <= tolerance;
  if (hull.size() == 2) return segment_distance(p, points[hull[0]], points[hull[1]]) <= tolerance;
  std::vector<Point2> poly;
  poly.reserve(hull.size());
  for (NodeId i : hull) poly.push_back(points[i]);
  if (point_in_polygon(p, poly)) return true;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (segment_distance(p, poly[i], poly[(i + 1) % poly.size()]) <= tolerance) return true;
  }
  return false;
}

}  // namespace qcorr::geometry
