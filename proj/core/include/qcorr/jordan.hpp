#pragma once

// Jordan structure from perturbed eigenvalue clouds. Eigenvalues of a
// rho-block scatter onto the vertices of regular 2rho-gons under random
// normwise perturbation; congruent triangles in a cloud vote for rotations
// about the eigenvalue, and the rotation angle pi / rho gives the block size.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcorr/geometry.hpp"
#include "qcorr/numkernel.hpp"
#include "qcorr/random.hpp"

namespace qcorr::jordan {

using geometry::Point2;
using numkernel::Complex;
using numkernel::DenseMatrix;

enum class Policy {
  SameLevel,               ///< keep sampling the current perturbation
  HigherLevel,             ///< move to the next larger perturbation
  SameUnlessHallucinating  ///< stay unless the number of posited models grew
};

const char* to_string(Policy p);

struct Region {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  bool contains(Point2 p) const {
    return re_min <= p.x && p.x <= re_max && im_min <= p.y && p.y <= im_max;
  }
};

struct JordanConfig {
  /// Perturbation exponents: magnitude 2^(1 - delta) ||A||_inf.
  std::vector<int> delta_exponents;
  Region region;
  int round_size = 7;
  double tolerance = 0.1;
  int rho_max = 8;
  Policy policy = Policy::SameLevel;
  int max_rounds = 12;
  /// New congruent pairs kept per level and round, by seeded sampling.
  int pair_cap = 4000;
  std::uint64_t seed = 0;
  /// Stop at the first confident estimate; otherwise run all max_rounds.
  bool stop_when_confident = true;

  void validate() const;
};

/// Exponents a..b inclusive, in either order of the bounds.
std::vector<int> delta_range(int a, int b);

struct SampleCloud {
  std::size_t delta_index = 0;
  int delta_exp = 0;
  std::vector<Point2> points;
};

/// A with every entry shifted by an independent +-2^(1 - delta) ||A||_inf.
/// Throws DegenerateGeometry for a zero matrix.
DenseMatrix perturb(const DenseMatrix& a, int delta_exp, Rng& rng);

struct RoundLog {
  int trials = 0;
  int failed = 0;
  std::size_t points_added = 0;
};

/// `count` perturb + eigensolve trials. Eigenvalues inside `region` are
/// appended to `cloud`; a trial whose eigensolver fails is skipped and
/// counted. Trial t uses the stream derive_seed(seed, {stream, t}).
RoundLog collect_round(const DenseMatrix& a, int delta_exp, int count, const Region& region,
                       std::uint64_t seed, std::uint64_t stream, SampleCloud& cloud);

struct Triangle {
  /// Cloud point ids, ordered by the length of the opposite side, ascending.
  std::array<std::size_t, 3> v{};
  std::array<double, 3> sides{};  ///< sides[k] is opposite v[k]
};

/// Triples of distinct cloud positions with at least two vertices on the
/// cloud's convex hull boundary. More than `cap` qualifying triples are
/// thinned to `cap` by seeded sampling.
std::vector<Triangle> triangles_for(std::span<const Point2> points, std::size_t cap = 5000,
                                    std::uint64_t seed = 0);

struct TrianglePair {
  std::size_t a = 0;  ///< index into the triangle list
  std::size_t b = 0;
  /// Candidate vertex maps: a.v[k] -> map[k]. Several when sides tie.
  std::vector<std::array<std::size_t, 3>> maps;
};

/// Congruent triangle pairs found by geometric hashing of log side lengths.
/// Sides match when they differ by at most `tolerance` relative to the
/// shorter one; pairs sharing two or more vertices are skipped.
std::vector<TrianglePair> congruent_pairs(std::span<const Triangle> triangles, double tolerance);

/// Nearest-neighbor queries over a fixed point set.
class PointIndex {
public:
  explicit PointIndex(std::span<const Point2> points);

  /// Distance to the nearest indexed point and its id.
  std::pair<double, std::size_t> nearest(Point2 p) const;
  /// Median distance from each point to its nearest point at positive
  /// distance; 0 when all points coincide.
  double median_spacing() const { return spacing_; }
  /// Convex hull vertices, counterclockwise.
  std::span<const Point2> hull() const { return hull_; }
  std::span<const Point2> points() const { return points_; }
  bool empty() const { return points_.empty(); }

private:
  std::vector<Point2> points_;
  std::vector<Point2> hull_;
  double spacing_ = 0.0;
  double cell_ = 1.0;
  double x0_ = 0.0, y0_ = 0.0;
  std::size_t nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

struct RotationModel {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  ///< (0, pi]
  double phi = 0.0;    ///< signed rotation angle in (-pi, pi], theta = |phi|
  double d = 0.0;
  double r = 0.0;
  std::size_t support = 1;
};

/// Least-squares rotation taking triangle a onto triangle b. Among the
/// pair's vertex maps, the best fit with angle above the identity floor and
/// vertex RMSD within tolerance * longest side wins; nullopt when none does.
std::optional<RotationModel> fit_rotation(const TrianglePair& pair,
                                          std::span<const Triangle> triangles,
                                          const PointIndex& cloud, double tolerance);

/// Angle below which a fitted rotation counts as the identity.
inline constexpr double kAngularFloor = 0.05;

/// Integer multiplicity implied by a rotation angle, if within the gate.
std::optional<int> implied_rho(double theta, int rho_max);

/// hull prior * angle prior * exp(-d / s) * exp(-r / s), s the median
/// nearest-neighbor spacing of the cloud. Throws PreconditionError on an
/// empty cloud.
double score_model(const RotationModel& model, const PointIndex& cloud, int rho_max);

struct ScoredModel {
  std::size_t level = 0;  ///< delta index
  RotationModel model;
  double confidence = 0.0;
  double scale = 0.0;  ///< spatial scale of the level's cloud
};

struct Cluster {
  std::vector<std::size_t> members;  ///< indices into the model list
  Point2 center;                     ///< confidence-weighted
  double theta = 0.0;                ///< confidence-weighted mean
  int rho = 0;
  std::vector<std::size_t> levels;   ///< contributing levels
  double joint = 0.0;                ///< product of per-level best confidence
  double score = 0.0;                ///< geometric mean of the same
  /// Share of the confidence-weighted evidence at each contributing level,
  /// geometric mean over those levels; includes folded clusters.
  double weight = 0.0;
  std::size_t support = 0;           ///< includes folded clusters
};

struct JordanEstimate {
  Point2 lambda;
  int rho = 0;
  double confidence = 0.0;
  double joint = 0.0;
  double weight = 0.0;
  std::size_t support = 0;
  int rounds_used = 0;
  double entropy = 0.0;
  bool high_entropy = false;
  /// Stopped on a clear winner rather than on the round budget.
  bool confident = false;
};

struct ClusterResult {
  std::vector<Cluster> clusters;  ///< after folding, best first
  std::optional<JordanEstimate> estimate;
  double entropy = 0.0;
  bool high_entropy = false;
};

inline constexpr double kHighEntropyBits = 0.9;

/// Single-linkage clusters in (x, y, theta) among models with equal implied
/// rho. A cluster whose rho divides a finer cluster's rho at the same center
/// folds into it when the finer one carries at least half its weight. The
/// winner carries the most weight; entropy is taken over normalized weights.
ClusterResult cluster_estimates(std::span<const ScoredModel> models, int rho_max);

/// Every model the cloud supports, scored. Convenience for single clouds.
std::vector<ScoredModel> analyze_cloud(std::span<const Point2> points, std::size_t level,
                                       double tolerance, int rho_max, std::uint64_t seed = 0);

struct RoundHistory {
  std::size_t level = 0;         ///< delta index sampled in the round
  std::size_t clusters = 0;      ///< posited models after the round
};

struct PolicyDecision {
  std::size_t level = 0;
  bool exhausted = false;  ///< wanted to advance but no larger perturbation remains
};

/// Where to sample next. Levels are ordered by increasing perturbation.
PolicyDecision next_action(std::span<const RoundHistory> history, std::size_t level_count,
                           Policy policy);

struct JordanAuditEntry {
  int round = 0;
  int delta_exp = 0;
  int trials = 0;
  int failed_trials = 0;
  std::size_t points_added = 0;
  std::size_t cloud_size = 0;
  std::size_t models = 0;
  std::size_t clusters = 0;
  std::size_t winner_support = 0;  ///< 0 without a winner
  double entropy = 0.0;
  std::string next;
};

struct LevelSummary {
  int delta_exp = 0;
  std::size_t cloud_size = 0;
  std::size_t models = 0;
  double best_confidence = 0.0;
  std::optional<RotationModel> best;
};

struct JordanResult {
  JordanEstimate estimate;
  bool found = false;
  std::vector<SampleCloud> clouds;  ///< one per delta index, possibly empty
  std::vector<LevelSummary> levels;
  std::vector<JordanAuditEntry> audit;
};

JordanResult analyze_jordan(const DenseMatrix& a, const JordanConfig& config);

}  // namespace qcorr::jordan
