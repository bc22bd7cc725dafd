#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "internal.hpp"
#include "qcorr/error.hpp"

namespace qcorr::jordan {

namespace {

bool lex_less(Point2 a, Point2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }

bool on_boundary(Point2 p, std::span<const Point2> hull) {
  if (hull.size() == 1) return p == hull[0];
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2 a = hull[i], b = hull[(i + 1) % hull.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    const double len = geometry::distance(a, b);
    if (std::abs(cross) > 1e-12 * len * len) continue;
    if (std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
        p.y <= std::max(a.y, b.y)) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Triangle> triangles_for(std::span<const Point2> points, std::size_t cap,
                                    std::uint64_t seed) {
  // Distinct positions, first occurrence represents.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(points[a], points[b]); });
  std::vector<std::size_t> reps;
  for (std::size_t i : order) {
    if (reps.empty() || !(points[reps.back()] == points[i])) reps.push_back(i);
  }
  std::sort(reps.begin(), reps.end());
  if (reps.size() < 3) return {};

  std::vector<Point2> hull;
  for (std::size_t h : geometry::convex_hull(points)) hull.push_back(points[h]);
  std::vector<char> on_hull(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) on_hull[i] = on_boundary(points[reps[i]], hull);

  std::vector<std::array<std::uint32_t, 3>> triples;
  const auto n = static_cast<std::uint32_t>(reps.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const int ij = on_hull[i] + on_hull[j];
      for (std::uint32_t k = j + 1; k < n; ++k) {
        if (ij + on_hull[k] >= 2) triples.push_back({i, j, k});
      }
    }
  }
  if (triples.size() > cap) {
    Rng rng(derive_seed(seed, {0x7419}));
    for (std::size_t i = 0; i < cap; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, triples.size() - 1);
      std::swap(triples[i], triples[pick(rng)]);
    }
    triples.resize(cap);
    std::sort(triples.begin(), triples.end());
  }

  std::vector<Triangle> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    std::array<std::size_t, 3> v{reps[t[0]], reps[t[1]], reps[t[2]]};
    std::array<double, 3> s{geometry::distance(points[v[1]], points[v[2]]),
                            geometry::distance(points[v[0]], points[v[2]]),
                            geometry::distance(points[v[0]], points[v[1]])};
    std::array<int, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return s[a] < s[b]; });
    Triangle tri;
    for (int k = 0; k < 3; ++k) {
      tri.v[k] = v[idx[k]];
      tri.sides[k] = s[idx[k]];
    }
    out.push_back(tri);
  }
  return out;
}

std::vector<TrianglePair> congruent_pairs(std::span<const Triangle> triangles, double tolerance) {
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw PreconditionError("congruent_pairs: tolerance must lie in (0, 1)");
  }
  const double width = std::log1p(tolerance);
  const auto cell = [&](double side) { return static_cast<std::int64_t>(std::floor(std::log(side) / width)); };
  struct KeyHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& k) const {
      std::uint64_t h = 0;
      for (auto v : k) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
      return static_cast<std::size_t>(h);
    }
  };
  std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::size_t>, KeyHash> buckets;
  std::vector<std::array<std::int64_t, 3>> keys(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& s = triangles[t].sides;
    if (!(s[0] > 0.0)) continue;
    keys[t] = {cell(s[0]), cell(s[1]), cell(s[2])};
    buckets[keys[t]].push_back(t);
  }

  const auto close = [&](double a, double b) {
    return std::abs(a - b) <= tolerance * std::min(a, b);
  };
  std::vector<TrianglePair> out;
  for (std::size_t a = 0; a < triangles.size(); ++a) {
    const Triangle& ta = triangles[a];
    if (!(ta.sides[0] > 0.0)) continue;
    std::vector<std::size_t> candidates;
    for (int d0 = -1; d0 <= 1; ++d0) {
      for (int d1 = -1; d1 <= 1; ++d1) {
        for (int d2 = -1; d2 <= 1; ++d2) {
          const auto it = buckets.find({keys[a][0] + d0, keys[a][1] + d1, keys[a][2] + d2});
          if (it == buckets.end()) continue;
          for (std::size_t b : it->second) {
            if (b > a) candidates.push_back(b);
          }
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t b : candidates) {
      const Triangle& tb = triangles[b];
      if (!(close(ta.sides[0], tb.sides[0]) && close(ta.sides[1], tb.sides[1]) &&
            close(ta.sides[2], tb.sides[2]))) {
        continue;
      }
      int shared = 0;
      for (std::size_t x : ta.v) shared += std::count(tb.v.begin(), tb.v.end(), x);
      if (shared >= 2) continue;

      // Sides that tie within tolerance in either triangle leave the vertex
      // analogy open inside the tie group.
      std::array<int, 3> group{0, 0, 0};
      for (int k = 1; k < 3; ++k) {
        const bool tie = close(ta.sides[k - 1], ta.sides[k]) || close(tb.sides[k - 1], tb.sides[k]);
        group[k] = tie ? group[k - 1] : group[k - 1] + 1;
      }
      TrianglePair pair{a, b, {}};
      std::array<int, 3> perm{0, 1, 2};
      do {
        if (group[perm[0]] == group[0] && group[perm[1]] == group[1] && group[perm[2]] == group[2]) {
          pair.maps.push_back({tb.v[perm[0]], tb.v[perm[1]], tb.v[perm[2]]});
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      out.push_back(std::move(pair));
    }
  }
  return out;
}

namespace {

template <class Accept>
std::pair<double, std::size_t> ring_search(const std::vector<Point2>& pts,
                                           const std::vector<std::vector<std::size_t>>& buckets,
                                           double x0, double y0, double cell, std::size_t nx,
                                           std::size_t ny, Point2 p, Accept accept) {
  const auto clampi = [](double v, std::size_t n) {
    if (!(v > 0.0)) return std::int64_t{0};
    return std::min(static_cast<std::int64_t>(n) - 1, static_cast<std::int64_t>(v));
  };
  const std::int64_t cx = clampi((p.x - x0) / cell, nx), cy = clampi((p.y - y0) / cell, ny);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_id = static_cast<std::size_t>(-1);
  const auto limit = static_cast<std::int64_t>(std::max(nx, ny));
  for (std::int64_t r = 0; r <= limit; ++r) {
    for (std::int64_t y = cy - r; y <= cy + r; ++y) {
      if (y < 0 || y >= static_cast<std::int64_t>(ny)) continue;
      const bool edge_row = (y == cy - r || y == cy + r);
      for (std::int64_t x = cx - r; x <= cx + r; x += edge_row ? 1 : 2 * r) {
        if (x >= 0 && x < static_cast<std::int64_t>(nx)) {
          for (std::size_t id : buckets[static_cast<std::size_t>(y) * nx + static_cast<std::size_t>(x)]) {
            const double d = geometry::distance(p, pts[id]);
            if (accept(id, d) && (d < best || (d == best && id < best_id))) {
              best = d;
              best_id = id;
            }
          }
        }
        if (r == 0) break;
      }
    }
    if (best <= static_cast<double>(r) * cell) break;
  }
  return {best, best_id};
}

double median_nn_spacing(const std::vector<Point2>& points_,
                         const std::vector<std::vector<std::size_t>>& buckets_, double x0_,
                         double y0_, double cell_, std::size_t nx_, std::size_t ny_) {
  std::vector<double> d;
  d.reserve(points_.size());
  for (const Point2& p : points_) {
    const double nn = ring_search(points_, buckets_, x0_, y0_, cell_, nx_, ny_, p,
                                  [](std::size_t, double dist) { return dist > 0.0; })
                          .first;
    if (std::isfinite(nn)) d.push_back(nn);
  }
  if (d.empty()) return 0.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(d.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

PointIndex::PointIndex(std::span<const Point2> points) : points_(points.begin(), points.end()) {
  if (points_.empty()) return;
  double x1 = points_[0].x, y1 = points_[0].y;
  x0_ = x1;
  y0_ = y1;
  for (const Point2& p : points_) {
    x0_ = std::min(x0_, p.x);
    y0_ = std::min(y0_, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const double extent = std::max(x1 - x0_, y1 - y0_);
  cell_ = extent > 0.0 ? extent / std::ceil(std::sqrt(static_cast<double>(points_.size()))) : 1.0;
  nx_ = static_cast<std::size_t>(std::floor((x1 - x0_) / cell_)) + 1;
  ny_ = static_cast<std::size_t>(std::floor((y1 - y0_) / cell_)) + 1;
  buckets_.assign(nx_ * ny_, {});
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto cx = std::min(nx_ - 1, static_cast<std::size_t>((points_[i].x - x0_) / cell_));
    const auto cy = std::min(ny_ - 1, static_cast<std::size_t>((points_[i].y - y0_) / cell_));
    buckets_[cy * nx_ + cx].push_back(i);
  }
  for (std::size_t h : geometry::convex_hull(points_)) hull_.push_back(points_[h]);
  spacing_ = median_nn_spacing(points_, buckets_, x0_, y0_, cell_, nx_, ny_);
}

std::pair<double, std::size_t> PointIndex::nearest(Point2 p) const {
  if (points_.empty()) throw PreconditionError("PointIndex: empty point set");
  return ring_search(points_, buckets_, x0_, y0_, cell_, nx_, ny_, p,
                     [](std::size_t, double) { return true; });
}

namespace detail {

std::optional<RotationModel> fit_points(const std::array<Point2, 3>& from,
                                        const std::array<Point2, 3>& to, const PointIndex* cloud,
                                        double max_residual, double* residual) {
  Point2 ca, cb;
  for (int k = 0; k < 3; ++k) {
    ca = ca + from[k];
    cb = cb + to[k];
  }
  ca = (1.0 / 3.0) * ca;
  cb = (1.0 / 3.0) * cb;
  double sdot = 0.0, scross = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Point2 a = from[k] - ca, b = to[k] - cb;
    sdot += a.x * b.x + a.y * b.y;
    scross += a.x * b.y - a.y * b.x;
  }
  if (sdot == 0.0 && scross == 0.0) return std::nullopt;
  const double phi = std::atan2(scross, sdot);
  if (std::abs(phi) < kAngularFloor) return std::nullopt;
  const double c = std::cos(phi), s = std::sin(phi);
  const auto rot = [&](Point2 p) { return Point2{c * p.x - s * p.y, s * p.x + c * p.y}; };

  const Point2 t = cb - rot(ca);
  double res = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Point2 e = rot(from[k]) + t - to[k];
    res += e.x * e.x + e.y * e.y;
  }
  res = std::sqrt(res / 3.0);
  if (residual) *residual = res;
  if (res > max_residual) return std::nullopt;

  // Fixed point of z -> R z + t.
  const double det = (1.0 - c) * (1.0 - c) + s * s;
  const Point2 center{((1.0 - c) * t.x - s * t.y) / det, (s * t.x + (1.0 - c) * t.y) / det};
  const auto apply = [&](Point2 p) { return rot(p - center) + center; };

  RotationModel m;
  m.x = center.x;
  m.y = center.y;
  m.phi = phi;
  m.theta = std::abs(phi);
  if (!cloud || cloud->empty()) return m;
  double sum = 0.0;
  for (const Point2& p : cloud->points()) {
    const double nn = cloud->nearest(apply(p)).first;
    sum += nn * nn;
  }
  m.d = std::sqrt(sum / static_cast<double>(cloud->points().size()));
  for (int k = 0; k < 3; ++k) {
    const Point2 pa = from[k], pb = to[k];
    const Point2 pc = cloud->points()[cloud->nearest(apply(pb)).second];
    m.r = std::max(m.r, std::abs(geometry::distance(pa, pb) - geometry::distance(pb, pc)));
  }
  return m;
}

}  // namespace detail

std::optional<RotationModel> fit_rotation(const TrianglePair& pair,
                                          std::span<const Triangle> triangles,
                                          const PointIndex& cloud, double tolerance) {
  if (pair.a >= triangles.size() || pair.b >= triangles.size()) {
    throw PreconditionError("fit_rotation: triangle index out of range");
  }
  if (pair.maps.empty()) throw PreconditionError("fit_rotation: pair has no vertex analogy");
  const Triangle& ta = triangles[pair.a];
  const auto pts = cloud.points();
  std::array<Point2, 3> from;
  for (int k = 0; k < 3; ++k) from[k] = pts[ta.v[k]];
  const double max_residual = tolerance * ta.sides[2];

  // Pick the map first so d and r are measured once.
  std::optional<std::array<Point2, 3>> best;
  double best_res = std::numeric_limits<double>::infinity();
  for (const auto& map : pair.maps) {
    std::array<Point2, 3> to;
    for (int k = 0; k < 3; ++k) to[k] = pts[map[k]];
    double res = 0.0;
    if (detail::fit_points(from, to, nullptr, max_residual, &res) && res < best_res) {
      best = to;
      best_res = res;
    }
  }
  if (!best) return std::nullopt;
  return detail::fit_points(from, *best, &cloud, max_residual);
}

std::optional<int> implied_rho(double theta, int rho_max) {
  if (!(theta > 0.0)) return std::nullopt;
  const double k = std::numbers::pi / theta;
  const double rho = std::round(k);
  if (std::abs(k - rho) > 0.15 || rho < 1.0 || rho > rho_max) return std::nullopt;
  return static_cast<int>(rho);
}

double score_model(const RotationModel& model, const PointIndex& cloud, int rho_max) {
  if (cloud.empty()) throw PreconditionError("score_model: empty cloud");
  if (!implied_rho(model.theta, rho_max)) return 0.0;
  const auto hull = cloud.hull();
  double extent = 0.0;
  for (const Point2& p : hull) extent = std::max({extent, std::abs(p.x), std::abs(p.y)});
  if (!geometry::hull_contains(hull, {model.x, model.y}, 1e-9 * (1.0 + extent))) return 0.0;
  const double scale = cloud.median_spacing();
  if (scale == 0.0) return (model.d == 0.0 && model.r == 0.0) ? 1.0 : 0.0;
  return std::exp(-model.d / scale) * std::exp(-model.r / scale);
}

}  // namespace qcorr::jordan
