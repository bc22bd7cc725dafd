#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "internal.hpp"
#include "lattice.hpp"
#include "qcorr/error.hpp"

namespace qcorr::portrait {

namespace detail {

bool inside(const LevelCurve& curve, Point2 p) {
  if (!curve.closed || curve.polyline.size() < 3) return false;
  try {
    return geometry::point_in_polygon(p, curve.polyline);
  } catch (const DegenerateGeometry&) {
    return false;
  }
}

double matched_fraction(std::span<const std::size_t> from, std::span<const std::size_t> to,
                        const geometry::NeighborhoodGraph& g_i) {
  if (from.empty()) return 0.0;
  using Group = sal::HigherObject<int>;
  std::vector<Group> groups{{0, {from.begin(), from.end()}, 0}, {1, {to.begin(), to.end()}, 0}};
  const auto g_h = geometry::NeighborhoodGraph::over_range(2, {{0, 1, std::nullopt}});
  const auto analogy = sal::analogize(
      g_h, std::span<const Group>(groups), [&](sal::NodeId l1, sal::NodeId l2) {
        return l1 != l2 && g_i.contains(l1) && g_i.contains(l2) && g_i.has_edge(l1, l2) ? 1.0
                                                                                        : 0.0;
      });
  std::vector<sal::NodeId> touched;
  for (const auto& e : analogy.edges()) {
    touched.push_back(e.l1);
    touched.push_back(e.l2);
  }
  std::sort(touched.begin(), touched.end());
  std::size_t hit = 0;
  for (std::size_t id : from) hit += std::binary_search(touched.begin(), touched.end(), id);
  return static_cast<double>(hit) / static_cast<double>(from.size());
}

double largest_angular_gap(Point2 center, std::span<const Point2> locations) {
  std::vector<double> angles;
  for (const Point2& p : locations) {
    if (p == center) continue;
    angles.push_back(std::atan2(p.y - center.y, p.x - center.x));
  }
  if (angles.size() < 2) return 2.0 * std::numbers::pi;
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap;
}

std::vector<Point2> separating_samples(const LevelCurve& inner, const LevelCurve& outer,
                                       std::span<const LevelCurve* const> also_outside,
                                       std::span<const RawSample> raw) {
  const double lo = std::min(inner.level, outer.level);
  const double hi = std::max(inner.level, outer.level);
  std::vector<Point2> out;
  for (const RawSample& s : raw) {
    if (!(s.magnitude > lo && s.magnitude < hi)) continue;
    if (!inside(outer, s.location) || inside(inner, s.location)) continue;
    if (std::any_of(also_outside.begin(), also_outside.end(),
                    [&](const LevelCurve* c) { return inside(*c, s.location); })) {
      continue;
    }
    out.push_back(s.location);
  }
  return out;
}

void polish_crossings(CurveSet& set, const sal::Field& field, const DenseMatrix& a,
                      double a_two_norm) {
  constexpr int kMaxSteps = 60;
  constexpr double kRelTol = 1e-3;
  constexpr double kReach = 4.0;  // edge lengths
  const auto mag = [&](Point2 p) {
    return magnitude(numkernel::portrait_value(a, a_two_norm, Complex(p.x, p.y)));
  };
  std::unordered_map<std::size_t, double> cache;
  const auto node_magnitude = [&](std::size_t id) {
    auto it = cache.find(id);
    if (it == cache.end()) it = cache.emplace(id, mag(field[id].location)).first;
    return it->second;
  };
  const auto lerp = [](Point2 p, Point2 q, double t) {
    return Point2{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
  };
  // Illinois false position for g(t) = mag(lerp(pa, pb, t)) - level, given
  // a sign change between the ends.
  const auto solve = [&](Point2 pa, Point2 pb, double ga, double gb, double t, double level) {
    double ta = 0.0, tb = 1.0;
    int side = 0;
    for (int step = 0; step < kMaxSteps; ++step) {
      const double g = mag(lerp(pa, pb, t)) - level;
      if (std::abs(g) <= kRelTol * level) break;
      if ((g < 0.0) == (ga < 0.0)) {
        ta = t;
        ga = g;
        if (side == -1) gb *= 0.5;
        side = -1;
      } else {
        tb = t;
        gb = g;
        if (side == 1) ga *= 0.5;
        side = 1;
      }
      t = (ta * gb - tb * ga) / (gb - ga);
    }
    return t;
  };

  for (sal::Crossing& x : set.points) {
    const Point2 pa = field[x.a].location, pb = field[x.b].location;
    // Refined lattices fill some node values in, so evaluate the ends.
    const double ga = node_magnitude(x.a) - x.level;
    const double gb = node_magnitude(x.b) - x.level;
    if (ga != 0.0 && gb != 0.0 && (ga < 0.0) != (gb < 0.0)) {
      x.t = solve(pa, pb, ga, gb, x.t, x.level);
      x.location = lerp(pa, pb, x.t);
      continue;
    }
    // The edge does not straddle the true level, so the crossing came from
    // filled-in values. Look for the level across the edge instead, along
    // the local gradient of log magnitude, within a few edge lengths.
    const Point2 p0 = x.location;
    const double h = std::hypot(pb.x - pa.x, pb.y - pa.y);
    const double g0 = mag(p0) - x.level;
    if (g0 == 0.0 || !(h > 0.0)) continue;
    const double d = 1e-3 * h;
    const double lx = std::log(mag({p0.x + d, p0.y})) - std::log(mag({p0.x - d, p0.y}));
    const double ly = std::log(mag({p0.x, p0.y + d})) - std::log(mag({p0.x, p0.y - d}));
    const double len = std::hypot(lx, ly);
    if (!(len > 0.0) || !std::isfinite(len)) continue;
    // Step uphill when below the level, then try the other way.
    const double sgn = g0 < 0.0 ? 1.0 : -1.0;
    bool found = false;
    for (const double way : {sgn, -sgn}) {
      const Point2 dir{way * lx / len, way * ly / len};
      for (double s = h / 16.0; s <= kReach * h && !found; s *= 2.0) {
        const Point2 q{p0.x + s * dir.x, p0.y + s * dir.y};
        const double gq = mag(q) - x.level;
        if (gq != 0.0 && (gq < 0.0) == (g0 < 0.0)) continue;
        const double t = solve(p0, q, g0, gq, g0 / (g0 - gq), x.level);
        x.location = lerp(p0, q, t);
        found = true;
      }
      if (found) break;
    }
  }
  for (LevelCurve& c : set.curves) {
    for (std::size_t k = 0; k < c.point_ids.size() && k < c.polyline.size(); ++k) {
      c.polyline[k] = set.points[c.point_ids[k]].location;
    }
  }
}

}  // namespace detail

CurveSet extract_curves(const sal::Field& field, const Grid& grid, std::span<const double> levels,
                        std::span<const Complex> eigenvalues) {
  if (field.size() != grid.nx * grid.ny) {
    throw PreconditionError("extract_curves: field does not match the grid");
  }
  CurveSet out;
  if (levels.empty()) return out;

  std::vector<sal::Sample> mags;
  mags.reserve(field.size());
  for (const auto& s : field.samples()) mags.push_back({s.location, detail::magnitude(s.value)});
  const sal::Field magnitude_field(std::move(mags));
  const std::vector<Point2> locations = magnitude_field.locations();

  const auto lattice = sal::aggregate(locations, sal::GridRule{grid.nx, grid.ny});
  out.points = sal::interpolate(magnitude_field, lattice, levels);

  // Crossing lookup by (lattice edge, level).
  const std::size_t nl = levels.size();
  const auto edge_key = [&](std::size_t u, std::size_t v, std::size_t k) {
    if (u > v) std::swap(u, v);
    const std::size_t dir = (v == u + 1) ? 0 : 1;
    return (u * 2 + dir) * nl + k;
  };
  std::unordered_map<std::size_t, std::size_t> crossing_at;
  crossing_at.reserve(out.points.size() * 2);
  for (std::size_t c = 0; c < out.points.size(); ++c) {
    const auto& x = out.points[c];
    crossing_at.emplace(edge_key(x.a, x.b, x.level_index), c);
  }

  // Marching-squares connectivity inside each cell.
  std::vector<geometry::Edge> links;
  const auto value = [&](std::size_t id) { return magnitude_field[id].value; };
  for (std::size_t j = 0; j + 1 < grid.ny; ++j) {
    for (std::size_t i = 0; i + 1 < grid.nx; ++i) {
      const std::size_t c[4] = {grid.id(i, j), grid.id(i + 1, j), grid.id(i + 1, j + 1),
                                grid.id(i, j + 1)};
      // Edge e joins corners e and e+1 (mod 4).
      for (std::size_t k = 0; k < nl; ++k) {
        const double v = levels[k];
        bool in[4];
        for (int q = 0; q < 4; ++q) in[q] = value(c[q]) <= v;
        std::size_t cross[4];
        bool has[4];
        int count = 0;
        for (int e = 0; e < 4; ++e) {
          has[e] = in[e] != in[(e + 1) % 4];
          if (has[e]) {
            const auto it = crossing_at.find(edge_key(c[e], c[(e + 1) % 4], k));
            has[e] = it != crossing_at.end();
            if (has[e]) {
              cross[e] = it->second;
              ++count;
            }
          }
        }
        if (count == 2) {
          std::size_t ends[2], n = 0;
          for (int e = 0; e < 4; ++e) {
            if (has[e]) ends[n++] = cross[e];
          }
          if (ends[0] != ends[1]) links.push_back({ends[0], ends[1], std::nullopt});
        } else if (count == 4) {
          const double center = 0.25 * (value(c[0]) + value(c[1]) + value(c[2]) + value(c[3]));
          const bool center_in = center <= v;
          // Cut off every corner on the side the center is not on; corner q
          // touches edges q-1 and q.
          for (int q = 0; q < 4; ++q) {
            if (in[q] == center_in) continue;
            const std::size_t a = cross[(q + 3) % 4], b = cross[q];
            if (a != b) links.push_back({a, b, std::nullopt});
          }
        }
      }
    }
  }
  const auto adjacency = geometry::NeighborhoodGraph::over_range(out.points.size(), std::move(links));

  std::vector<Point2> point_locations;
  point_locations.reserve(out.points.size());
  for (const auto& x : out.points) point_locations.push_back(x.location);

  auto classes = sal::classify(adjacency, [&](sal::NodeId a, sal::NodeId b) {
    return out.points[a].level_index == out.points[b].level_index;
  });
  std::stable_sort(classes.begin(), classes.end(), [&](const auto& a, const auto& b) {
    return out.points[a.front()].level_index < out.points[b.front()].level_index;
  });

  for (auto& members : classes) {
    if (members.size() < 2) {
      ++out.dropped_degenerate;
      continue;
    }
    const std::size_t level_index = out.points[members.front()].level_index;
    auto object = sal::redescribe(out.curves.size(), std::move(members),
                                  [&](std::span<const sal::NodeId> m) {
                                    return sal::chain(m, adjacency, point_locations);
                                  });
    LevelCurve curve;
    curve.level = levels[level_index];
    curve.level_index = level_index;
    curve.closed = object.abstraction.closed;
    curve.point_ids.assign(object.abstraction.order.begin(), object.abstraction.order.end());
    for (std::size_t id : curve.point_ids) curve.polyline.push_back(point_locations[id]);
    if (curve.closed) {
      for (std::size_t e = 0; e < eigenvalues.size(); ++e) {
        if (detail::inside(curve, {eigenvalues[e].real(), eigenvalues[e].imag()})) {
          curve.enclosed_eigenvalues.push_back(e);
        }
      }
      if (curve.enclosed_eigenvalues.empty()) {
        ++out.dropped_empty;
        continue;
      }
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

geometry::NeighborhoodGraph curve_adjacency(const CurveSet& set,
                                            const geometry::NeighborhoodGraph& g_i) {
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(set.points.size(), kNone);
  for (std::size_t c = 0; c < set.curves.size(); ++c) {
    for (std::size_t id : set.curves[c].point_ids) owner[id] = c;
  }
  std::vector<geometry::Edge> edges;
  for (const auto& e : g_i.edges()) {
    if (e.u >= owner.size() || e.v >= owner.size()) continue;
    const std::size_t a = owner[e.u], b = owner[e.v];
    if (a != kNone && b != kNone && a != b) edges.push_back({a, b, std::nullopt});
  }
  return geometry::NeighborhoodGraph::over_range(set.curves.size(), std::move(edges));
}

CurveCorrespondence curve_correspondence(const CurveSet& set, std::size_t k, std::size_t l,
                                         const geometry::NeighborhoodGraph& g_i,
                                         std::span<const RawSample> raw,
                                         std::span<const Complex> eigenvalues) {
  if (k >= set.curves.size() || l >= set.curves.size()) {
    throw PreconditionError("curve_correspondence: curve index out of range");
  }
  const LevelCurve& ck = set.curves[k];
  const LevelCurve& cl = set.curves[l];
  std::vector<std::size_t> shared;
  std::set_intersection(ck.enclosed_eigenvalues.begin(), ck.enclosed_eigenvalues.end(),
                        cl.enclosed_eigenvalues.begin(), cl.enclosed_eigenvalues.end(),
                        std::back_inserter(shared));
  if (shared.empty()) {
    throw PreconditionError("curve_correspondence: curves " + std::to_string(k) + " and " +
                            std::to_string(l) + " share no enclosed eigenvalue");
  }
  CurveCorrespondence out;
  out.m_k = detail::matched_fraction(ck.point_ids, cl.point_ids, g_i);
  out.m_l = detail::matched_fraction(cl.point_ids, ck.point_ids, g_i);
  const bool k_inner = ck.level <= cl.level;
  const auto between = detail::separating_samples(k_inner ? ck : cl, k_inner ? cl : ck, {}, raw);
  const Complex center = eigenvalues[shared.front()];
  out.theta_kl = detail::largest_angular_gap({center.real(), center.imag()}, between);
  return out;
}

double correspondence_score(const CurveCorrespondence& c, double theta_max) {
  return std::min(c.m_k, c.m_l) * std::max(0.0, 1.0 - c.theta_kl / theta_max);
}

}  // namespace qcorr::portrait
