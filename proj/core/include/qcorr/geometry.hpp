#pragma once

// Planar computational geometry over the complex plane (x = Re z, y = Im z)
// and the neighborhood-graph container shared by every aggregation level.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qcorr::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
double distance(Point2 a, Point2 b);

using NodeId = std::size_t;

struct Edge {
  NodeId u = 0;  ///< always < v after graph normalization
  NodeId v = 0;
  std::optional<double> label;
};

/// Undirected simple graph over externally owned objects. Immutable once
/// built: edges are normalized to (min, max), deduplicated and sorted.
class NeighborhoodGraph {
public:
  NeighborhoodGraph() = default;

  /// Throws PreconditionError on self-loops or edges naming unlisted nodes.
  NeighborhoodGraph(std::vector<NodeId> nodes, std::vector<Edge> edges);

  /// Graph over nodes 0..n-1.
  static NeighborhoodGraph over_range(std::size_t n, std::vector<Edge> edges);

  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool contains(NodeId id) const;
  bool has_edge(NodeId a, NodeId b) const;
  std::optional<double> label(NodeId a, NodeId b) const;
  std::span<const NodeId> neighbors(NodeId id) const;

private:
  std::size_t position(NodeId id) const;

  std::vector<NodeId> nodes_;  // sorted
  std::vector<Edge> edges_;    // sorted by (u, v)
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
};

/// Delaunay triangulation edge set over point indices 0..n-1. Exact
/// duplicates share the adjacency of their first occurrence. Throws
/// DegenerateGeometry for fewer than 3 distinct points or all-collinear
/// input.
NeighborhoodGraph delaunay(std::span<const Point2> points);

/// Triangles (index triples, counterclockwise) of the same triangulation.
std::vector<std::array<NodeId, 3>> delaunay_triangles(std::span<const Point2> points);

/// Counterclockwise hull vertex indices starting from the lowest
/// (x, y) point. Interior points, points on hull edges and duplicates are
/// excluded. Collinear input yields its two extreme points.
std::vector<NodeId> convex_hull(std::span<const Point2> points);

/// 4-connected lattice over nx * ny cells, node id = row * nx + col.
NeighborhoodGraph grid_neighbors(std::size_t nx, std::size_t ny);

/// Boundary-inclusive containment test. Throws DegenerateGeometry for a
/// polygon with fewer than 3 vertices or zero area.
bool point_in_polygon(Point2 p, std::span<const Point2> polygon);

/// Containment in the convex hull of `points` that tolerates degenerate
/// hulls: a collinear set contains exactly the points on its segment and a
/// single point only itself, each within `tolerance`.
bool hull_contains(std::span<const Point2> points, Point2 p, double tolerance);

/// Twice the signed area of the polygon (positive for counterclockwise).
double signed_area2(std::span<const Point2> polygon);

}  // namespace qcorr::geometry
