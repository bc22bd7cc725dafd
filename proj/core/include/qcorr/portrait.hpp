#pragma once

// Spectral-portrait merge analysis: sample the normalized resolvent norm on a
// lattice, extract level curves, relate curves at neighboring levels and
// report at which perturbation level eigenvalues become indistinguishable.
// Sampling is refined (grid expansion, local subsampling) until the merge
// tree is confident or the refinement budget runs out.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcorr/geometry.hpp"
#include "qcorr/numkernel.hpp"
#include "qcorr/sal.hpp"

namespace qcorr::portrait {

using geometry::Point2;
using numkernel::Complex;
using numkernel::DenseMatrix;

struct PortraitConfig {
  /// Perturbation magnitudes, strictly decreasing, each in (0, 1).
  std::vector<double> levels;
  /// Base lattice spacing; defaults to half the smallest gap between distinct
  /// eigenvalue clusters, capped at 0.5.
  std::optional<double> initial_resolution;
  double margin = 1.0;
  double theta_max = 0.7853981633974483;  // pi / 4
  double match_min = 0.8;
  int max_refinements = 8;

  /// Throws PreconditionError naming the offending field.
  void validate() const;
};

/// Decades 10^-first .. 10^-last.
std::vector<double> decade_levels(int first, int last);

struct Bounds {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(Point2 p) const {
    return re_min <= p.x && p.x <= re_max && im_min <= p.y && p.y <= im_max;
  }
};

/// Regular lattice: node (i, j) sits at origin + spacing * (i, j), node id
/// j * nx + i.
struct Grid {
  Point2 origin;
  double spacing = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;

  Point2 at(std::size_t i, std::size_t j) const {
    return {origin.x + spacing * static_cast<double>(i), origin.y + spacing * static_cast<double>(j)};
  }
  std::size_t id(std::size_t i, std::size_t j) const { return j * nx + i; }
  Bounds bounds() const {
    return {origin.x, at(nx - 1, 0).x, origin.y, at(0, ny - 1).y};
  }
  /// Lattice of the given spacing aligned to multiples of it and covering
  /// `b`.
  static Grid covering(const Bounds& b, double spacing);
};

/// Portrait value at every lattice point, in node-id order.
sal::Field sample_grid(const DenseMatrix& a, const Grid& grid);

struct LevelCurve {
  double level = 0.0;
  std::size_t level_index = 0;
  std::vector<Point2> polyline;
  /// Indices of the polyline points in CurveSet::points.
  std::vector<std::size_t> point_ids;
  bool closed = false;
  std::vector<std::size_t> enclosed_eigenvalues;
};

struct CurveSet {
  std::vector<LevelCurve> curves;
  /// Every interpolated crossing, the point set I that curves are built from.
  std::vector<sal::Crossing> points;
  std::size_t dropped_degenerate = 0;  ///< classes too small to form a curve
  std::size_t dropped_empty = 0;       ///< closed curves enclosing no eigenvalue
};

/// Level curves of a lattice field holding portrait values. A point z is
/// inside level v when sigma_min(a - zI) <= v ||a||_2; crossings are
/// interpolated linearly in that perturbation magnitude. Saddle cells are
/// disambiguated by the mean of their corners.
CurveSet extract_curves(const sal::Field& field, const Grid& grid, std::span<const double> levels,
                        std::span<const Complex> eigenvalues);

/// Curves k, l are adjacent when some point of k and some point of l share
/// an edge of g_i, the triangulation of CurveSet::points.
geometry::NeighborhoodGraph curve_adjacency(const CurveSet& curves,
                                            const geometry::NeighborhoodGraph& g_i);

struct CurveCorrespondence {
  double m_k = 0.0;
  double m_l = 0.0;
  double theta_kl = 0.0;
};

/// Raw sample with its perturbation magnitude (portrait value mapped back).
struct RawSample {
  Point2 location;
  double magnitude = 0.0;
};

/// c_k (inner) against c_l (outer). m_k, m_l are the fractions of each
/// curve's points with a g_i edge to the other; theta_kl is the largest
/// angular gap, about the first shared enclosed eigenvalue, between raw
/// samples lying strictly between the curves. Throws PreconditionError when
/// the curves share no enclosed eigenvalue.
CurveCorrespondence curve_correspondence(const CurveSet& set, std::size_t k, std::size_t l,
                                         const geometry::NeighborhoodGraph& g_i,
                                         std::span<const RawSample> raw,
                                         std::span<const Complex> eigenvalues);

/// min(m_k, m_l) * max(0, 1 - theta_kl / theta_max).
double correspondence_score(const CurveCorrespondence& c, double theta_max);

struct MergeNode {
  std::vector<std::size_t> members;  ///< sorted eigenvalue indices
  std::vector<std::size_t> children;
  std::optional<std::size_t> level_index;  ///< unset for leaves
  double level = 0.0;
  double confidence = 1.0;
  /// Supporting correspondences: merge curve against each child's last
  /// curve below the merge level.
  std::vector<CurveCorrespondence> support;
};

struct MergeTree {
  /// Leaves 0..n-1 are the eigenvalues; internal nodes follow in merge order.
  std::vector<MergeNode> nodes;
  std::vector<std::size_t> roots;
};

struct MergePair {
  std::size_t i = 0;
  std::size_t j = 0;
  double level = 0.0;
  std::size_t level_index = 0;
  double confidence = 0.0;
};

struct MergeReport {
  MergeTree tree;
  std::vector<MergePair> merges;
  std::vector<std::pair<std::size_t, std::size_t>> unresolved;
  /// Bounding boxes of merge events whose correspondence is too weak.
  std::vector<Bounds> weak_regions;
};

/// Walks levels from the smallest perturbation outward and joins eigenvalues
/// enclosed by one outermost closed curve. A pair counts as unresolved when
/// it never merges or when some level below its merge has an open curve
/// (the sublevel set leaves the sampled region there, so an earlier merge
/// outside it cannot be ruled out).
MergeReport track_merges(const CurveSet& curves, const geometry::NeighborhoodGraph& g_i,
                         std::span<const RawSample> raw, std::span<const Complex> eigenvalues,
                         const PortraitConfig& config);

enum class ActionKind { ExpandGrid, Subsample, Done };

struct SamplingAction {
  ActionKind kind = ActionKind::Done;
  /// Subsample region; unset otherwise.
  std::optional<Bounds> region;
  std::string reason;
};

SamplingAction refine(const MergeReport& report, double spacing);

const char* to_string(ActionKind kind);

struct AuditEntry {
  ActionKind action = ActionKind::Done;
  std::string reason;
  Bounds region;
  double spacing = 0.0;        ///< finest lattice spacing after the action
  std::size_t samples = 0;     ///< evaluated samples after the action
};

struct PortraitResult {
  std::vector<Complex> eigenvalues;
  double two_norm = 0.0;
  MergeReport report;
  CurveSet curves;
  Bounds bounds;
  double base_spacing = 0.0;
  double finest_spacing = 0.0;
  std::size_t initial_samples = 0;
  std::size_t samples_used = 0;
  int expansions = 0;
  int subsamples = 0;
  std::vector<AuditEntry> audit;
  /// Refinement finished with ActionKind::Done inside the budget.
  bool confident = false;
};

/// sample -> extract -> correspond -> track -> refine until Done or the
/// refinement budget is spent.
PortraitResult analyze_portrait(const DenseMatrix& a, const PortraitConfig& config);

/// Default base spacing for a spectrum.
double default_resolution(std::span<const Complex> eigenvalues);

}  // namespace qcorr::portrait
