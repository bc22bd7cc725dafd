#pragma once

// Spatial aggregation operators: aggregate -> interpolate -> classify ->
// redescribe, plus analogize/correspond for relating neighboring higher-level
// objects. Domain analyzers supply the predicates and abstraction functions.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "qcorr/error.hpp"
#include "qcorr/geometry.hpp"

namespace qcorr::sal {

using geometry::NeighborhoodGraph;
using geometry::NodeId;
using geometry::Point2;

struct Sample {
  Point2 location;
  double value = 0.0;  ///< may be +-infinity
};

/// Scalar samples at pairwise distinct locations.
class Field {
public:
  Field() = default;
  /// Throws PreconditionError when two samples share a location or a
  /// location is not finite.
  explicit Field(std::vector<Sample> samples);

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

  std::vector<Point2> locations() const;

private:
  std::vector<Sample> samples_;
};

// --- aggregate -------------------------------------------------------------

struct DelaunayRule {};
struct GridRule {
  std::size_t nx = 0;
  std::size_t ny = 0;
};
struct RadiusRule {
  double radius = 0.0;  ///< inclusive
};
using CustomRule = std::function<bool(NodeId, NodeId)>;
using NeighborRule = std::variant<DelaunayRule, GridRule, RadiusRule, CustomRule>;

/// Neighborhood graph over objects located at `locations` (node id = index).
/// GridRule expects row-major lattice order and nx * ny locations.
NeighborhoodGraph aggregate(std::span<const Point2> locations, const NeighborRule& rule);

// --- interpolate -----------------------------------------------------------

/// A level crossing on the edge (a, b): location = a + t (b - a).
struct Crossing {
  Point2 location;
  double level = 0.0;
  std::size_t level_index = 0;
  NodeId a = 0;
  NodeId b = 0;
  double t = 0.0;
};

/// Every graph edge whose endpoint values straddle a level emits one linearly
/// interpolated crossing. Straddling is half-open: an endpoint is below when
/// value <= level, and an edge straddles when exactly one endpoint is below,
/// so an endpoint sitting on the level is emitted as the crossing itself.
/// Edges with a non-finite endpoint emit nothing. Output is ordered by edge,
/// then by level index.
std::vector<Crossing> interpolate(const Field& field, const NeighborhoodGraph& graph,
                                  std::span<const double> levels);

// --- classify --------------------------------------------------------------

using Equivalence = std::function<bool(NodeId, NodeId)>;

/// Connected components of the subgraph keeping edges where `equivalent`
/// holds. Every graph node lands in exactly one class; classes are sorted and
/// ordered by their smallest member.
std::vector<std::vector<NodeId>> classify(const NeighborhoodGraph& graph,
                                          const Equivalence& equivalent);

// --- redescribe ------------------------------------------------------------

template <class Payload>
struct HigherObject {
  std::size_t id = 0;
  std::vector<NodeId> constituents;
  Payload abstraction{};
};

/// Ordered chain over a class, the usual payload for contour classes.
struct Polyline {
  std::vector<NodeId> order;
  bool closed = false;
};

/// Orders `members` by walking `adjacency` when it restricts to a simple path
/// or cycle over them; otherwise chains nearest neighbors starting from the
/// lexicographically smallest location. Throws DegenerateGeometry when the
/// class is empty.
Polyline chain(std::span<const NodeId> members, const NeighborhoodGraph& adjacency,
               std::span<const Point2> locations);

std::string echo_class(std::span<const NodeId> members);

template <class Abstraction>
auto redescribe(std::size_t id, std::vector<NodeId> members, Abstraction&& abstraction)
    -> HigherObject<std::invoke_result_t<Abstraction, std::span<const NodeId>>> {
  using Payload = std::invoke_result_t<Abstraction, std::span<const NodeId>>;
  if (members.empty()) throw PreconditionError("redescribe: empty class");
  try {
    Payload payload = abstraction(std::span<const NodeId>(members));
    return HigherObject<Payload>{id, std::move(members), std::move(payload)};
  } catch (const Error& e) {
    throw DegenerateGeometry(std::string("redescribe: abstraction failed for class ") +
                             echo_class(members) + ": " + e.what());
  }
}

// --- analogize -------------------------------------------------------------

struct AnalogyEdge {
  NodeId l1 = 0;
  NodeId l2 = 0;
  double confidence = 0.0;
};

/// Weighted relation between lower-level objects. Zero-confidence edges are
/// never stored; stored confidences are clamped to [0, 1].
class AnalogyGraph {
public:
  AnalogyGraph() = default;
  explicit AnalogyGraph(std::vector<AnalogyEdge> edges);

  const std::vector<AnalogyEdge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  bool has_edge(NodeId a, NodeId b) const;
  /// True when `l` has at least one incident edge.
  bool touches(NodeId l) const;

  /// Edges with both endpoints in `nodes`.
  AnalogyGraph induced(std::span<const NodeId> nodes) const;

private:
  std::vector<AnalogyEdge> edges_;  // l1 < l2, sorted
};

template <class Payload>
const HigherObject<Payload>& object_by_id(std::span<const HigherObject<Payload>> objects,
                                          std::size_t id) {
  for (const auto& h : objects) {
    if (h.id == id) return h;
  }
  throw PreconditionError("unknown higher-level object " + std::to_string(id));
}

/// {l1, l2, a(l1, l2)} over every g_h edge {h1, h2}, l1 in h1, l2 in h2,
/// keeping positive confidences.
template <class Payload, class Predicate>
AnalogyGraph analogize(const NeighborhoodGraph& g_h,
                       std::span<const HigherObject<Payload>> objects, Predicate&& a) {
  std::vector<AnalogyEdge> out;
  for (const auto& e : g_h.edges()) {
    const auto& h1 = object_by_id(objects, e.u);
    const auto& h2 = object_by_id(objects, e.v);
    for (NodeId l1 : h1.constituents) {
      for (NodeId l2 : h2.constituents) {
        const double c = a(l1, l2);
        if (c > 0.0) out.push_back(AnalogyEdge{l1, l2, c});
      }
    }
  }
  return AnalogyGraph(std::move(out));
}

// --- correspond ------------------------------------------------------------

template <class SO>
struct CorrespondenceEdge {
  std::size_t h1 = 0;
  std::size_t h2 = 0;
  SO payload{};
};

template <class SO>
struct CorrespondenceGraph {
  std::vector<CorrespondenceEdge<SO>> edges;
};

/// One payload per g_h edge: c(h1, h2, g_l restricted to the union of their
/// constituents).
template <class Payload, class Abstraction>
auto correspond(const NeighborhoodGraph& g_h, std::span<const HigherObject<Payload>> objects,
                const AnalogyGraph& g_l, Abstraction&& c)
    -> CorrespondenceGraph<std::invoke_result_t<Abstraction, const HigherObject<Payload>&,
                                                const HigherObject<Payload>&,
                                                const AnalogyGraph&>> {
  using SO = std::invoke_result_t<Abstraction, const HigherObject<Payload>&,
                                  const HigherObject<Payload>&, const AnalogyGraph&>;
  CorrespondenceGraph<SO> out;
  out.edges.reserve(g_h.edge_count());
  for (const auto& e : g_h.edges()) {
    const auto& h1 = object_by_id(objects, e.u);
    const auto& h2 = object_by_id(objects, e.v);
    std::vector<NodeId> both(h1.constituents);
    both.insert(both.end(), h2.constituents.begin(), h2.constituents.end());
    try {
      out.edges.push_back({h1.id, h2.id, c(h1, h2, g_l.induced(both))});
    } catch (const Error& err) {
      throw Error("correspond: abstraction failed for pair (" + std::to_string(h1.id) + ", " +
                  std::to_string(h2.id) + "): " + err.what());
    }
  }
  return out;
}

}  // namespace qcorr::sal
