#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "internal.hpp"
#include "qcorr/error.hpp"

namespace qcorr::portrait {

namespace {

Bounds curve_box(const LevelCurve& c) {
  Bounds b{c.polyline.front().x, c.polyline.front().x, c.polyline.front().y,
           c.polyline.front().y};
  for (const Point2& p : c.polyline) {
    b.re_min = std::min(b.re_min, p.x);
    b.re_max = std::max(b.re_max, p.x);
    b.im_min = std::min(b.im_min, p.y);
    b.im_max = std::max(b.im_max, p.y);
  }
  return b;
}

// Closed curves at one level that no other closed curve at that level
// surrounds, larger enclosures first.
std::vector<std::size_t> outermost(const CurveSet& set, std::size_t level_index) {
  std::vector<std::size_t> closed;
  for (std::size_t c = 0; c < set.curves.size(); ++c) {
    const auto& curve = set.curves[c];
    if (curve.level_index == level_index && curve.closed && !curve.enclosed_eigenvalues.empty()) {
      closed.push_back(c);
    }
  }
  std::stable_sort(closed.begin(), closed.end(), [&](std::size_t a, std::size_t b) {
    const auto na = set.curves[a].enclosed_eigenvalues.size();
    const auto nb = set.curves[b].enclosed_eigenvalues.size();
    if (na != nb) return na > nb;
    return std::abs(geometry::signed_area2(set.curves[a].polyline)) >
           std::abs(geometry::signed_area2(set.curves[b].polyline));
  });
  std::vector<std::size_t> out;
  for (std::size_t c : closed) {
    const bool nested = std::any_of(out.begin(), out.end(), [&](std::size_t o) {
      return detail::inside(set.curves[o], set.curves[c].polyline.front());
    });
    if (!nested) out.push_back(c);
  }
  return out;
}

Point2 centroid(std::span<const std::size_t> members, std::span<const Complex> eigenvalues) {
  Point2 acc;
  for (std::size_t m : members) acc = acc + Point2{eigenvalues[m].real(), eigenvalues[m].imag()};
  return (1.0 / static_cast<double>(members.size())) * acc;
}

}  // namespace

MergeReport track_merges(const CurveSet& set, const geometry::NeighborhoodGraph& g_i,
                         std::span<const RawSample> raw, std::span<const Complex> eigenvalues,
                         const PortraitConfig& config) {
  const std::size_t n = eigenvalues.size();
  const std::size_t nl = config.levels.size();
  MergeReport report;
  auto& nodes = report.tree.nodes;
  for (std::size_t e = 0; e < n; ++e) nodes.push_back(MergeNode{{e}, {}, std::nullopt, 0.0, 1.0, {}});

  std::vector<std::size_t> group_of(n);      // eigenvalue -> tree node of its group
  std::iota(group_of.begin(), group_of.end(), std::size_t{0});
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> last_curve(n, kNone);  // tree node -> latest enclosing curve
  std::vector<char> has_open(nl, 0);
  std::vector<std::vector<char>> enclosed_at(nl, std::vector<char>(n, 0));
  for (const auto& c : set.curves) {
    if (!c.closed) has_open[c.level_index] = 1;
  }

  // Ascending perturbation: the last level of V first.
  for (std::size_t step = 0; step < nl; ++step) {
    const std::size_t k = nl - 1 - step;
    const auto outer = outermost(set, k);
    std::vector<std::pair<std::size_t, std::size_t>> single;  // (node, curve)
    for (std::size_t c : outer) {
      const LevelCurve& curve = set.curves[c];
      for (std::size_t e : curve.enclosed_eigenvalues) enclosed_at[k][e] = 1;
      std::vector<std::size_t> groups;
      for (std::size_t e : curve.enclosed_eigenvalues) groups.push_back(group_of[e]);
      std::sort(groups.begin(), groups.end());
      groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
      if (groups.size() == 1) {
        single.emplace_back(groups.front(), c);
        continue;
      }

      MergeNode node;
      node.children = groups;
      node.level_index = k;
      node.level = config.levels[k];
      for (std::size_t g : groups) {
        node.members.insert(node.members.end(), nodes[g].members.begin(), nodes[g].members.end());
      }
      std::sort(node.members.begin(), node.members.end());

      // Support: merge curve against each child's last curve below it.
      std::vector<std::size_t> child_points;
      std::vector<const LevelCurve*> child_curves;
      bool missing = false;
      for (std::size_t g : groups) {
        if (last_curve[g] == kNone) {
          missing = true;
          continue;
        }
        const auto& cc = set.curves[last_curve[g]];
        child_points.insert(child_points.end(), cc.point_ids.begin(), cc.point_ids.end());
        child_curves.push_back(&cc);
      }
      const double m_outer = detail::matched_fraction(curve.point_ids, child_points, g_i);
      double confidence = 1.0;
      bool weak = false;
      if (missing && step > 0) {
        confidence = 0.0;
        weak = true;
      }
      for (std::size_t g : groups) {
        if (last_curve[g] == kNone) continue;
        const LevelCurve& inner = set.curves[last_curve[g]];
        std::vector<std::size_t> others(curve.point_ids);
        std::vector<const LevelCurve*> siblings;
        for (const LevelCurve* s : child_curves) {
          if (s == &inner) continue;
          siblings.push_back(s);
          others.insert(others.end(), s->point_ids.begin(), s->point_ids.end());
        }
        CurveCorrespondence corr;
        corr.m_k = detail::matched_fraction(inner.point_ids, others, g_i);
        corr.m_l = m_outer;
        const auto between = detail::separating_samples(inner, curve, siblings, raw);
        corr.theta_kl = detail::largest_angular_gap(centroid(nodes[g].members, eigenvalues), between);
        node.support.push_back(corr);
        confidence = std::min(confidence, correspondence_score(corr, config.theta_max));
        if (corr.theta_kl > config.theta_max || corr.m_k < config.match_min ||
            corr.m_l < config.match_min) {
          weak = true;
        }
      }
      node.confidence = confidence;
      if (weak) report.weak_regions.push_back(curve_box(curve));

      const std::size_t id = nodes.size();
      for (std::size_t e : node.members) group_of[e] = id;
      nodes.push_back(std::move(node));
      last_curve.push_back(c);
    }
    for (const auto& [g, c] : single) last_curve[g] = c;
  }

  // Pairs and certainty.
  for (std::size_t id = n; id < nodes.size(); ++id) {
    const MergeNode& node = nodes[id];
    const std::size_t k = *node.level_index;
    bool uncertain = false;
    for (std::size_t below = k + 1; below < nl && !uncertain; ++below) {
      if (!has_open[below]) continue;
      for (std::size_t e : node.members) {
        if (!enclosed_at[below][e]) uncertain = true;
      }
    }
    for (std::size_t a = 0; a < node.children.size(); ++a) {
      for (std::size_t b = a + 1; b < node.children.size(); ++b) {
        for (std::size_t i : nodes[node.children[a]].members) {
          for (std::size_t j : nodes[node.children[b]].members) {
            const auto [lo, hi] = std::minmax(i, j);
            if (uncertain) {
              report.unresolved.emplace_back(lo, hi);
            } else {
              report.merges.push_back(MergePair{lo, hi, node.level, k, node.confidence});
            }
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (group_of[i] != group_of[j]) report.unresolved.emplace_back(i, j);
    }
  }
  std::sort(report.unresolved.begin(), report.unresolved.end());
  std::sort(report.merges.begin(), report.merges.end(), [](const MergePair& a, const MergePair& b) {
    if (a.level != b.level) return a.level < b.level;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  std::vector<std::size_t> roots;
  for (std::size_t e = 0; e < n; ++e) roots.push_back(group_of[e]);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  report.tree.roots = std::move(roots);
  return report;
}

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::ExpandGrid: return "expand";
    case ActionKind::Subsample: return "subsample";
    case ActionKind::Done: return "done";
  }
  return "?";
}

SamplingAction refine(const MergeReport& report, double spacing) {
  if (!report.unresolved.empty()) {
    return {ActionKind::ExpandGrid, std::nullopt,
            std::to_string(report.unresolved.size()) + " unresolved pair(s)"};
  }
  if (!report.weak_regions.empty()) {
    Bounds box = report.weak_regions.front();
    for (const Bounds& b : report.weak_regions) {
      box.re_min = std::min(box.re_min, b.re_min);
      box.re_max = std::max(box.re_max, b.re_max);
      box.im_min = std::min(box.im_min, b.im_min);
      box.im_max = std::max(box.im_max, b.im_max);
    }
    box.re_min -= spacing;
    box.re_max += spacing;
    box.im_min -= spacing;
    box.im_max += spacing;
    return {ActionKind::Subsample, box,
            std::to_string(report.weak_regions.size()) + " weak merge correspondence(s)"};
  }
  return {ActionKind::Done, std::nullopt, "all merges confident"};
}

}  // namespace qcorr::portrait
