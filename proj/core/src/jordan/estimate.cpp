#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "qcorr/error.hpp"
#include "qcorr/jordan.hpp"

namespace qcorr::jordan {

namespace {

constexpr double kThetaScale = 0.1;

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

struct CellKey {
  int rho;
  std::int64_t x, y, t;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(k.rho));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k.x));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k.y));
    return static_cast<std::size_t>(splitmix64(h ^ static_cast<std::uint64_t>(k.t)));
  }
};

}  // namespace

ClusterResult cluster_estimates(std::span<const ScoredModel> models, int rho_max) {
  if (models.empty()) throw DegenerateGeometry("cluster_estimates: no structure detected");

  std::vector<std::size_t> live;
  std::vector<int> rho_of(models.size(), 0);
  double cell = 0.0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!(models[i].confidence > 0.0)) continue;
    const auto rho = implied_rho(models[i].model.theta, rho_max);
    if (!rho) continue;
    rho_of[i] = *rho;
    live.push_back(i);
    cell = std::max(cell, models[i].scale);
  }
  ClusterResult result;
  if (live.empty()) return result;
  cell = std::max(cell, 1e-12);

  const auto key = [&](std::size_t i) {
    const RotationModel& m = models[i].model;
    return CellKey{rho_of[i], static_cast<std::int64_t>(std::floor(m.x / cell)),
                   static_cast<std::int64_t>(std::floor(m.y / cell)),
                   static_cast<std::int64_t>(std::floor(m.theta / kThetaScale))};
  };
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> buckets;
  for (std::size_t k = 0; k < live.size(); ++k) buckets[key(live[k])].push_back(k);

  DisjointSets sets(live.size());
  for (std::size_t k = 0; k < live.size(); ++k) {
    const std::size_t i = live[k];
    const CellKey base = key(i);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dt = -1; dt <= 1; ++dt) {
          const auto it = buckets.find({base.rho, base.x + dx, base.y + dy, base.t + dt});
          if (it == buckets.end()) continue;
          for (std::size_t q : it->second) {
            if (q <= k) continue;
            const std::size_t j = live[q];
            const RotationModel& a = models[i].model;
            const RotationModel& b = models[j].model;
            const double s = std::max(models[i].scale, models[j].scale);
            if (std::abs(a.x - b.x) <= s && std::abs(a.y - b.y) <= s &&
                std::abs(a.theta - b.theta) <= kThetaScale) {
              sets.unite(k, q);
            }
          }
        }
      }
    }
  }

  std::map<std::size_t, std::size_t> slot;
  std::vector<Cluster> clusters;
  std::vector<double> scale;
  for (std::size_t k = 0; k < live.size(); ++k) {
    const auto [it, fresh] = slot.try_emplace(sets.find(k), clusters.size());
    if (fresh) {
      clusters.emplace_back();
      scale.push_back(0.0);
    }
    clusters[it->second].members.push_back(live[k]);
    scale[it->second] = std::max(scale[it->second], models[live[k]].scale);
  }

  // Confidence mass per level, the denominator of each cluster's share.
  std::map<std::size_t, double> level_mass;
  for (std::size_t i : live) level_mass[models[i].level] += models[i].confidence;

  std::vector<std::map<std::size_t, double>> mass(clusters.size());
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    Cluster& c = clusters[k];
    std::map<std::size_t, double> best;
    double w = 0.0, x = 0.0, y = 0.0, t = 0.0;
    for (std::size_t i : c.members) {
      const ScoredModel& m = models[i];
      double& b = best[m.level];
      b = std::max(b, m.confidence);
      mass[k][m.level] += m.confidence;
      w += m.confidence;
      x += m.confidence * m.model.x;
      y += m.confidence * m.model.y;
      t += m.confidence * m.model.theta;
      c.support += m.model.support;
    }
    c.center = {x / w, y / w};
    c.theta = t / w;
    c.rho = rho_of[c.members.front()];
    c.joint = 1.0;
    for (const auto& [level, conf] : best) {
      c.levels.push_back(level);
      c.joint *= conf;
    }
    c.score = std::pow(c.joint, 1.0 / static_cast<double>(best.size()));
  }
  const auto weight_of = [&](const std::map<std::size_t, double>& m) {
    double log_sum = 0.0;
    for (const auto& [level, v] : m) log_sum += std::log(v / level_mass[level]);
    return std::exp(log_sum / static_cast<double>(m.size()));
  };

  // A 2rho-gon is also symmetric under every multiple of pi / rho, so a
  // coarser-rho cluster at the same center is evidence for the finer one.
  // Coarse clusters go first so chains of folds carry their mass along.
  std::vector<double> own_weight(clusters.size());
  for (std::size_t k = 0; k < clusters.size(); ++k) own_weight[k] = weight_of(mass[k]);
  std::vector<std::size_t> by_rho(clusters.size());
  std::iota(by_rho.begin(), by_rho.end(), std::size_t{0});
  std::stable_sort(by_rho.begin(), by_rho.end(),
                   [&](std::size_t a, std::size_t b) { return clusters[a].rho < clusters[b].rho; });
  std::vector<char> folded(clusters.size(), 0);
  for (std::size_t b : by_rho) {
    const Cluster& cb = clusters[b];
    std::optional<std::size_t> into;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      const Cluster& ca = clusters[a];
      if (folded[a] || cb.rho >= ca.rho || ca.rho % cb.rho != 0) continue;
      if (geometry::distance(ca.center, cb.center) > std::max(scale[a], scale[b])) continue;
      if (own_weight[a] < 0.5 * own_weight[b]) continue;
      if (!into || own_weight[a] > own_weight[*into] ||
          (own_weight[a] == own_weight[*into] && ca.rho > clusters[*into].rho)) {
        into = a;
      }
    }
    if (!into) continue;
    folded[b] = 1;
    for (const auto& [level, v] : mass[b]) mass[*into][level] += v;
    clusters[*into].support += cb.support;
  }
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    if (folded[k]) continue;
    clusters[k].weight = weight_of(mass[k]);
    result.clusters.push_back(std::move(clusters[k]));
  }
  std::stable_sort(result.clusters.begin(), result.clusters.end(),
                   [](const Cluster& a, const Cluster& b) {
                     if (a.weight != b.weight) return a.weight > b.weight;
                     if (a.score != b.score) return a.score > b.score;
                     if (a.support != b.support) return a.support > b.support;
                     return a.rho > b.rho;
                   });

  double total = 0.0;
  for (const Cluster& c : result.clusters) total += c.weight;
  for (const Cluster& c : result.clusters) {
    const double p = c.weight / total;
    if (p > 0.0) result.entropy -= p * std::log2(p);
  }
  result.high_entropy = result.entropy > kHighEntropyBits;

  const Cluster& win = result.clusters.front();
  JordanEstimate est;
  est.lambda = win.center;
  est.rho = win.rho;
  est.confidence = win.score;
  est.joint = win.joint;
  est.weight = win.weight;
  est.support = win.support;
  est.entropy = result.entropy;
  est.high_entropy = result.high_entropy;
  result.estimate = est;
  return result;
}

std::vector<ScoredModel> analyze_cloud(std::span<const Point2> points, std::size_t level,
                                       double tolerance, int rho_max, std::uint64_t seed) {
  std::vector<ScoredModel> out;
  const auto triangles = triangles_for(points, 5000, seed);
  if (triangles.empty()) return out;
  const PointIndex index(points);
  for (const TrianglePair& pair : congruent_pairs(triangles, tolerance)) {
    const auto model = fit_rotation(pair, triangles, index, tolerance);
    if (!model) continue;
    out.push_back({level, *model, score_model(*model, index, rho_max), index.median_spacing()});
  }
  return out;
}

}  // namespace qcorr::jordan
