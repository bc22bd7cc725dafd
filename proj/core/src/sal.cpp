#include "qcorr/sal.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qcorr::sal {

namespace {

bool lex_less(Point2 a, Point2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<std::size_t> parent_;
};

}  // namespace

Field::Field(std::vector<Sample> samples) : samples_(std::move(samples)) {
  std::vector<Point2> locs = locations();
  for (const Point2& p : locs) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw PreconditionError("Field: non-finite sample location");
    }
  }
  std::sort(locs.begin(), locs.end(), lex_less);
  const auto dup = std::adjacent_find(locs.begin(), locs.end());
  if (dup != locs.end()) {
    std::ostringstream os;
    os.precision(17);
    os << "Field: duplicate sample location (" << dup->x << ", " << dup->y << ")";
    throw PreconditionError(os.str());
  }
}

std::vector<Point2> Field::locations() const {
  std::vector<Point2> out;
  out.reserve(samples_.size());
  for (const Sample& s : samples_) out.push_back(s.location);
  return out;
}

NeighborhoodGraph aggregate(std::span<const Point2> locations, const NeighborRule& rule) {
  if (locations.empty()) throw PreconditionError("aggregate: no objects");
  const std::size_t n = locations.size();
  if (std::holds_alternative<DelaunayRule>(rule)) return geometry::delaunay(locations);
  if (const auto* g = std::get_if<GridRule>(&rule)) {
    if (g->nx * g->ny != n) {
      throw PreconditionError("aggregate: grid rule " + std::to_string(g->nx) + "x" +
                              std::to_string(g->ny) + " over " + std::to_string(n) +
                              " objects");
    }
    return geometry::grid_neighbors(g->nx, g->ny);
  }
  std::vector<geometry::Edge> edges;
  if (const auto* r = std::get_if<RadiusRule>(&rule)) {
    if (!(r->radius >= 0.0)) throw PreconditionError("aggregate: negative radius");
    std::vector<std::size_t> by_x(n);
    std::iota(by_x.begin(), by_x.end(), std::size_t{0});
    std::sort(by_x.begin(), by_x.end(),
              [&](std::size_t a, std::size_t b) { return locations[a].x < locations[b].x; });
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Point2 a = locations[by_x[i]], b = locations[by_x[j]];
        if (b.x - a.x > r->radius) break;
        if (geometry::distance(a, b) <= r->radius) edges.push_back({by_x[i], by_x[j], std::nullopt});
      }
    }
  } else {
    const auto& pred = std::get<CustomRule>(rule);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (pred(i, j)) edges.push_back({i, j, std::nullopt});
      }
    }
  }
  return NeighborhoodGraph::over_range(n, std::move(edges));
}

std::vector<Crossing> interpolate(const Field& field, const NeighborhoodGraph& graph,
                                  std::span<const double> levels) {
  std::vector<Crossing> out;
  for (const auto& e : graph.edges()) {
    if (e.u >= field.size() || e.v >= field.size()) {
      throw PreconditionError("interpolate: graph node outside the field");
    }
    const Sample& sa = field[e.u];
    const Sample& sb = field[e.v];
    if (!std::isfinite(sa.value) || !std::isfinite(sb.value)) continue;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const double v = levels[k];
      const bool below_a = sa.value <= v;
      const bool below_b = sb.value <= v;
      if (below_a == below_b) continue;
      // Interpolate from the below endpoint so a sample sitting exactly on
      // the level is returned unchanged (t = 0).
      const Sample& lo = below_a ? sa : sb;
      const Sample& hi = below_a ? sb : sa;
      const double t = (v - lo.value) / (hi.value - lo.value);
      const Point2 loc{lo.location.x + t * (hi.location.x - lo.location.x),
                       lo.location.y + t * (hi.location.y - lo.location.y)};
      out.push_back(Crossing{loc, v, k, below_a ? e.u : e.v, below_a ? e.v : e.u, t});
    }
  }
  return out;
}

std::vector<std::vector<NodeId>> classify(const NeighborhoodGraph& graph,
                                          const Equivalence& equivalent) {
  const auto& nodes = graph.nodes();
  const auto pos = [&](NodeId id) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), id) -
                                    nodes.begin());
  };
  DisjointSets sets(nodes.size());
  for (const auto& e : graph.edges()) {
    if (equivalent(e.u, e.v)) sets.unite(pos(e.u), pos(e.v));
  }
  std::vector<std::vector<NodeId>> classes;
  std::vector<std::size_t> slot(nodes.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = classes.size();
      classes.emplace_back();
    }
    classes[slot[root]].push_back(nodes[i]);
  }
  return classes;
}

std::string echo_class(std::span<const NodeId> members) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i == 8 && members.size() > 10) {
      os << ", ... (" << members.size() << " total)";
      break;
    }
    os << (i ? ", " : "") << members[i];
  }
  os << "}";
  return os.str();
}

Polyline chain(std::span<const NodeId> members, const NeighborhoodGraph& adjacency,
               std::span<const Point2> locations) {
  if (members.empty()) throw DegenerateGeometry("chain: empty class");
  for (NodeId m : members) {
    if (m >= locations.size()) throw PreconditionError("chain: member without a location");
  }
  std::vector<NodeId> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  const auto is_member = [&](NodeId id) {
    return std::binary_search(sorted.begin(), sorted.end(), id);
  };
  const auto local = [&](NodeId id) {
    std::vector<NodeId> out;
    for (NodeId n : adjacency.neighbors(id)) {
      if (is_member(n)) out.push_back(n);
    }
    return out;
  };
  const auto lowest = [&](std::span<const NodeId> ids) {
    return *std::min_element(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
      if (locations[a] == locations[b]) return a < b;
      return lex_less(locations[a], locations[b]);
    });
  };

  if (sorted.size() == 1) return Polyline{sorted, false};

  // Walk the restricted adjacency when it is a simple path or cycle.
  bool simple = true;
  std::vector<NodeId> ends;
  for (NodeId m : sorted) {
    const std::size_t deg = local(m).size();
    if (deg == 0 || deg > 2) {
      simple = false;
      break;
    }
    if (deg == 1) ends.push_back(m);
  }
  if (simple && (ends.empty() || ends.size() == 2)) {
    const bool cycle = ends.empty();
    NodeId start = cycle ? lowest(sorted) : lowest(ends);
    std::vector<NodeId> order{start};
    NodeId prev = start;
    NodeId cur = start;
    while (order.size() <= sorted.size()) {
      const auto nb = local(cur);
      std::optional<NodeId> step;
      for (NodeId n : nb) {
        if (order.size() > 1 && n == prev) continue;
        if (!step || n < *step) step = n;
      }
      if (!step || *step == start) break;
      order.push_back(*step);
      prev = cur;
      cur = *step;
    }
    if (order.size() == sorted.size()) {
      if (cycle && order.size() >= 3) {
        std::vector<Point2> poly;
        for (NodeId id : order) poly.push_back(locations[id]);
        if (geometry::signed_area2(poly) < 0.0) std::reverse(order.begin() + 1, order.end());
      }
      return Polyline{order, cycle && order.size() >= 3};
    }
  }

  // Nearest-neighbor chaining.
  std::vector<NodeId> remaining = sorted;
  const NodeId start = lowest(remaining);
  remaining.erase(std::find(remaining.begin(), remaining.end(), start));
  std::vector<NodeId> order{start};
  while (!remaining.empty()) {
    const Point2 at = locations[order.back()];
    auto best = remaining.begin();
    double best_d = geometry::distance(at, locations[*best]);
    for (auto it = remaining.begin() + 1; it != remaining.end(); ++it) {
      const double d = geometry::distance(at, locations[*it]);
      if (d < best_d) {
        best_d = d;
        best = it;
      }
    }
    order.push_back(*best);
    remaining.erase(best);
  }
  const bool closed = order.size() >= 3 && adjacency.contains(order.front()) &&
                      adjacency.contains(order.back()) &&
                      adjacency.has_edge(order.front(), order.back());
  return Polyline{order, closed};
}

AnalogyGraph::AnalogyGraph(std::vector<AnalogyEdge> edges) {
  edges_.reserve(edges.size());
  for (AnalogyEdge e : edges) {
    if (!(e.confidence > 0.0)) continue;
    if (e.l1 == e.l2) throw PreconditionError("AnalogyGraph: self-analogy");
    if (e.l1 > e.l2) std::swap(e.l1, e.l2);
    e.confidence = std::min(e.confidence, 1.0);
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end(), [](const AnalogyEdge& a, const AnalogyEdge& b) {
    return a.l1 != b.l1 ? a.l1 < b.l1 : a.l2 < b.l2;
  });
  // A pair reached through two higher-level edges keeps its strongest label.
  std::vector<AnalogyEdge> merged;
  for (const AnalogyEdge& e : edges_) {
    if (!merged.empty() && merged.back().l1 == e.l1 && merged.back().l2 == e.l2) {
      merged.back().confidence = std::max(merged.back().confidence, e.confidence);
    } else {
      merged.push_back(e);
    }
  }
  edges_ = std::move(merged);
}

bool AnalogyGraph::has_edge(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{a, b},
                                   [](const AnalogyEdge& e, const std::pair<NodeId, NodeId>& k) {
                                     return e.l1 != k.first ? e.l1 < k.first : e.l2 < k.second;
                                   });
  return it != edges_.end() && it->l1 == a && it->l2 == b;
}

bool AnalogyGraph::touches(NodeId l) const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [l](const AnalogyEdge& e) { return e.l1 == l || e.l2 == l; });
}

AnalogyGraph AnalogyGraph::induced(std::span<const NodeId> nodes) const {
  std::vector<NodeId> keep(nodes.begin(), nodes.end());
  std::sort(keep.begin(), keep.end());
  AnalogyGraph out;
  for (const AnalogyEdge& e : edges_) {
    if (std::binary_search(keep.begin(), keep.end(), e.l1) &&
        std::binary_search(keep.begin(), keep.end(), e.l2)) {
      out.edges_.push_back(e);
    }
  }
  return out;
}

}  // namespace qcorr::sal
