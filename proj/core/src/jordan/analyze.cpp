#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "internal.hpp"
#include "qcorr/error.hpp"

namespace qcorr::jordan {

namespace {

// A congruent pair found in some round. Vertex positions never move once
// sampled, so the rotation is re-fitted against the grown cloud each round.
struct StoredPair {
  std::array<Point2, 3> from;
  std::array<Point2, 3> to;
  double max_residual = 0.0;
};

struct LevelState {
  SampleCloud cloud;
  std::vector<StoredPair> pairs;
  std::set<std::array<std::size_t, 6>> seen;
  std::vector<ScoredModel> models;
};

void add_pairs(LevelState& state, double tolerance, int rho_max, std::size_t cap,
               std::uint64_t seed) {
  const auto& pts = state.cloud.points;
  const auto triangles = triangles_for(pts, 5000, seed);
  std::vector<std::pair<std::array<std::size_t, 6>, StoredPair>> fresh;
  for (const TrianglePair& pair : congruent_pairs(triangles, tolerance)) {
    const Triangle& ta = triangles[pair.a];
    std::array<Point2, 3> from;
    for (int k = 0; k < 3; ++k) from[k] = pts[ta.v[k]];
    // Keep the best-fitting vertex map, as fit_rotation does.
    std::optional<std::array<std::size_t, 3>> best;
    double best_res = std::numeric_limits<double>::infinity();
    const double max_residual = tolerance * ta.sides[2];
    for (const auto& map : pair.maps) {
      std::array<Point2, 3> to;
      for (int k = 0; k < 3; ++k) to[k] = pts[map[k]];
      double res = 0.0;
      if (detail::fit_points(from, to, nullptr, max_residual, &res) && res < best_res) {
        best = map;
        best_res = res;
      }
    }
    if (!best) continue;
    // The rotation is fixed by the vertices, so the angle gate never changes.
    {
      std::array<Point2, 3> to;
      for (int k = 0; k < 3; ++k) to[k] = pts[(*best)[k]];
      if (!implied_rho(detail::fit_points(from, to, nullptr, max_residual)->theta, rho_max)) continue;
    }
    // Canonical key: the unordered pair of vertex-id triples.
    std::array<std::size_t, 3> u = ta.v, w = *best;
    std::sort(u.begin(), u.end());
    std::sort(w.begin(), w.end());
    if (w < u) std::swap(u, w);
    const std::array<std::size_t, 6> key{u[0], u[1], u[2], w[0], w[1], w[2]};
    StoredPair stored{from, {}, max_residual};
    for (int k = 0; k < 3; ++k) stored.to[k] = pts[(*best)[k]];
    if (!state.seen.contains(key)) fresh.emplace_back(key, stored);
  }
  if (fresh.size() > cap) {
    Rng rng(derive_seed(seed, {0x7061}));
    for (std::size_t i = 0; i < cap; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, fresh.size() - 1);
      std::swap(fresh[i], fresh[pick(rng)]);
    }
    fresh.resize(cap);
    std::sort(fresh.begin(), fresh.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  for (auto& [key, stored] : fresh) {
    state.seen.insert(key);
    state.pairs.push_back(stored);
  }
}

void rescore(LevelState& state, std::size_t level, int rho_max) {
  state.models.clear();
  if (state.cloud.points.empty()) return;
  const PointIndex index(state.cloud.points);
  double extent = 0.0;
  for (const Point2& q : index.hull()) extent = std::max({extent, std::abs(q.x), std::abs(q.y)});
  for (const StoredPair& p : state.pairs) {
    // Centers outside the hull score 0 whatever d is; skip measuring it.
    const auto center = detail::fit_points(p.from, p.to, nullptr, p.max_residual);
    if (!geometry::hull_contains(index.hull(), {center->x, center->y}, 1e-9 * (1.0 + extent))) {
      continue;
    }
    const auto model = detail::fit_points(p.from, p.to, &index, p.max_residual);
    if (!model) continue;
    state.models.push_back(
        {level, *model, score_model(*model, index, rho_max), index.median_spacing()});
  }
}

}  // namespace

JordanResult analyze_jordan(const DenseMatrix& a, const JordanConfig& config) {
  config.validate();
  if (!a.square()) throw PreconditionError("analyze_jordan: matrix is not square");

  // Level 0 is the smallest perturbation (largest exponent).
  std::vector<int> exps = config.delta_exponents;
  std::sort(exps.begin(), exps.end(), std::greater<>());
  std::vector<LevelState> levels(exps.size());
  for (std::size_t i = 0; i < exps.size(); ++i) {
    levels[i].cloud.delta_index = i;
    levels[i].cloud.delta_exp = exps[i];
  }

  JordanResult result;
  std::vector<RoundHistory> history;
  std::size_t level = 0;
  std::optional<ClusterResult> last;
  for (int round = 0; round < config.max_rounds; ++round) {
    LevelState& state = levels[level];
    const RoundLog log = collect_round(a, exps[level], config.round_size, config.region,
                                       config.seed, static_cast<std::uint64_t>(round), state.cloud);
    add_pairs(state, config.tolerance, config.rho_max, static_cast<std::size_t>(config.pair_cap),
              derive_seed(config.seed, {0x7472, level, static_cast<std::uint64_t>(round)}));
    rescore(state, level, config.rho_max);

    std::vector<ScoredModel> all;
    for (const LevelState& s : levels) all.insert(all.end(), s.models.begin(), s.models.end());
    std::size_t cluster_count = 0;
    if (!all.empty()) {
      last = cluster_estimates(all, config.rho_max);
      cluster_count = last->clusters.size();
    }
    history.push_back({level, cluster_count});

    JordanAuditEntry entry;
    entry.round = round + 1;
    entry.delta_exp = exps[level];
    entry.trials = log.trials;
    entry.failed_trials = log.failed;
    entry.points_added = log.points_added;
    entry.cloud_size = state.cloud.points.size();
    entry.models = std::count_if(state.models.begin(), state.models.end(),
                                 [](const ScoredModel& m) { return m.confidence > 0.0; });
    entry.clusters = cluster_count;
    entry.entropy = last && cluster_count ? last->entropy : 0.0;

    const bool have_winner = last && last->estimate.has_value();
    if (have_winner) entry.winner_support = last->estimate->support;
    if (have_winner && !last->high_entropy && config.stop_when_confident) {
      entry.next = "stop";
      result.audit.push_back(entry);
      result.estimate = *last->estimate;
      result.estimate.confident = true;
      break;
    }

    std::size_t populated = 0;
    for (const LevelState& s : levels) populated += s.models.empty() ? 0 : 1;
    // High entropy: resample where the evidence disagrees most with the
    // winner. HigherLevel opens a new level instead.
    if (have_winner && populated >= 2 && config.policy != Policy::HigherLevel) {
      const Point2 c = last->estimate->lambda;
      double worst = -1.0;
      std::size_t outlier = level;
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& ms = levels[i].models;
        const auto best = std::max_element(ms.begin(), ms.end(), [](const auto& x, const auto& y) {
          return x.confidence < y.confidence;
        });
        if (best == ms.end()) continue;
        const double dev = geometry::distance(c, {best->model.x, best->model.y});
        if (dev > worst) {
          worst = dev;
          outlier = i;
        }
      }
      level = outlier;
      entry.next = "outlier";
    } else {
      const PolicyDecision d = next_action(history, levels.size(), config.policy);
      entry.next = d.exhausted ? "exhausted" : (d.level == level ? "same" : "higher");
      level = d.level;
    }
    result.audit.push_back(entry);
  }

  result.found = last && last->estimate.has_value();
  if (result.found && !result.estimate.confident) result.estimate = *last->estimate;
  result.estimate.rounds_used = static_cast<int>(result.audit.size());

  for (LevelState& s : levels) {
    LevelSummary sum;
    sum.delta_exp = s.cloud.delta_exp;
    sum.cloud_size = s.cloud.points.size();
    for (const ScoredModel& m : s.models) {
      if (!(m.confidence > 0.0)) continue;
      ++sum.models;
      if (m.confidence > sum.best_confidence) {
        sum.best_confidence = m.confidence;
        sum.best = m.model;
      }
    }
    result.levels.push_back(sum);
    result.clouds.push_back(std::move(s.cloud));
  }
  return result;
}

}  // namespace qcorr::jordan
