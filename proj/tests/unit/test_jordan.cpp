#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles/oracles.hpp"
#include "qcorr/error.hpp"
#include "qcorr/jordan.hpp"

using namespace qcorr;
using namespace qcorr::jordan;
using numkernel::JordanBlockSpec;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Point2> hexagon(Point2 c, double radius = 1.0) { return oracle::rings(c, 3, {radius}, 0.0); }

// Every rotation model the congruent triangle pairs of `pts` admit.
std::vector<RotationModel> all_models(const std::vector<Point2>& pts, double tolerance = 0.1) {
  const auto tris = triangles_for(pts);
  const PointIndex index(pts);
  std::vector<RotationModel> out;
  for (const TrianglePair& p : congruent_pairs(tris, tolerance)) {
    if (auto m = fit_rotation(p, tris, index, tolerance)) out.push_back(*m);
  }
  return out;
}

ScoredModel scored(std::size_t level, double x, double y, double theta, double confidence,
                   double scale = 0.1) {
  ScoredModel s;
  s.level = level;
  s.model.x = x;
  s.model.y = y;
  s.model.theta = theta;
  s.model.phi = theta;
  s.confidence = confidence;
  s.scale = scale;
  return s;
}

JordanConfig brunet_config(std::uint64_t seed) {
  JordanConfig c;
  c.delta_exponents = delta_range(40, 50);
  c.region = {6, 8, -1, 1};
  c.seed = seed;
  c.max_rounds = 4;
  return c;
}

DenseMatrix brunet(std::uint64_t basis_seed = 1001) {
  const std::vector<JordanBlockSpec> blocks{{-1.0, 1}, {-2.0, 1}, {7.0, 3}, {7.0, 3}};
  return numkernel::synth_jordan(blocks, basis_seed, 10.0);
}

}  // namespace

TEST(JordanConfig, Validation) {
  JordanConfig c = brunet_config(1);
  EXPECT_NO_THROW(c.validate());
  c.round_size = 5;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = brunet_config(1);
  c.delta_exponents = {40, 40};
  EXPECT_THROW(c.validate(), PreconditionError);
  c = brunet_config(1);
  c.region = {8, 6, -1, 1};
  EXPECT_THROW(c.validate(), PreconditionError);
  EXPECT_EQ(delta_range(3, 1), (std::vector<int>{1, 2, 3}));
}

TEST(Perturb, EntrywiseSignedShift) {
  const DenseMatrix a = DenseMatrix::from_rows({{1.0, 0.0}, {0.0, 0.5}});
  Rng rng(9);
  const DenseMatrix p = perturb(a, 50, rng);
  const double s = std::ldexp(1.0, -49);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      EXPECT_EQ(std::abs((p(r, c) - a(r, c)).real()), s);
      EXPECT_EQ((p(r, c) - a(r, c)).imag(), 0.0);
    }
  }
  Rng r1(4), r2(4);
  EXPECT_EQ(perturb(a, 45, r1), perturb(a, 45, r2));
  Rng z(1);
  EXPECT_THROW(perturb(DenseMatrix::zeros(2, 2), 40, z), DegenerateGeometry);
}

TEST(Perturb, AlignedRowShiftReachesBound) {
  // Some draw aligns every sign in a row; the row then moves by n * s.
  const std::size_t n = 3;
  const DenseMatrix a = DenseMatrix::identity(n);
  const double s = std::ldexp(1.0, -9) * numkernel::inf_norm(a);
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 64 && !seen; ++seed) {
    Rng rng(seed);
    const DenseMatrix p = perturb(a, 10, rng);
    const DenseMatrix diff(p.values() - a.values());
    const double norm = numkernel::inf_norm(diff);
    EXPECT_LE(norm, n * s * (1 + 1e-15));
    seen = std::abs(norm - n * s) <= 1e-15;
  }
  EXPECT_TRUE(seen);
}

TEST(CollectRound, Examples) {
  const std::vector<JordanBlockSpec> block{{7.0, 3}};
  const DenseMatrix a = numkernel::synth_jordan(block, 3, 10.0);
  SampleCloud cloud;
  cloud.delta_exp = 45;
  const RoundLog log = collect_round(a, 45, 6, {6, 8, -1, 1}, 1, 0, cloud);
  EXPECT_EQ(log.trials, 6);
  EXPECT_EQ(log.failed, 0);
  EXPECT_EQ(log.points_added, 18u);
  EXPECT_EQ(cloud.points.size(), 18u);
  for (const Point2& p : cloud.points) EXPECT_LT(std::hypot(p.x - 7.0, p.y), 1e-3);

  SampleCloud none;
  EXPECT_EQ(collect_round(a, 45, 6, {-3, -1, -1, 1}, 1, 0, none).points_added, 0u);
  EXPECT_TRUE(none.points.empty());
}

TEST(TrianglesFor, Examples) {
  EXPECT_TRUE(triangles_for(std::vector<Point2>{{0, 0}, {1, 0}}).empty());
  EXPECT_EQ(triangles_for(std::vector<Point2>{{0, 0}, {1, 0}, {0, 1}}).size(), 1u);
  const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(triangles_for(sq).size(), 4u);
  std::vector<Point2> sqc = sq;
  sqc.push_back({0.5, 0.5});
  const auto tris = triangles_for(sqc);
  EXPECT_EQ(tris.size(), 10u);
  for (const Triangle& t : tris) {
    EXPECT_LE(t.sides[0], t.sides[1]);
    EXPECT_LE(t.sides[1], t.sides[2]);
    for (int k = 0; k < 3; ++k) {
      const Point2 a = sqc[t.v[(k + 1) % 3]], b = sqc[t.v[(k + 2) % 3]];
      EXPECT_DOUBLE_EQ(t.sides[k], geometry::distance(a, b));
    }
  }
}

TEST(TrianglesFor, CapThinsDeterministically) {
  std::mt19937_64 rng(5);
  const auto pts = oracle::random_points(rng, 60);
  const auto a = triangles_for(pts, 100, 7);
  const auto b = triangles_for(pts, 100, 7);
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].v, b[k].v);
}

TEST(CongruentPairs, Examples) {
  const std::vector<Point2> two{{0, 0}, {2, 0}, {0, 1}, {10, 10}, {12, 10}, {10, 11}};
  const auto a = triangles_for(std::vector<Point2>(two.begin(), two.begin() + 3));
  const auto b = triangles_for(std::vector<Point2>(two.begin() + 3, two.end()));
  std::vector<Triangle> both{a[0], b[0]};
  for (auto& v : both[1].v) v += 3;
  const auto pairs = congruent_pairs(both, 0.1);
  ASSERT_EQ(pairs.size(), 1u);
  ASSERT_FALSE(pairs[0].maps.empty());
  for (int k = 0; k < 3; ++k) EXPECT_EQ(pairs[0].maps[0][k], both[0].v[k] + 3);

  // Side ratio 2.
  const auto big = triangles_for(std::vector<Point2>{{0, 0}, {4, 0}, {0, 2}});
  std::vector<Triangle> scaled{a[0], big[0]};
  for (auto& v : scaled[1].v) v += 3;
  EXPECT_TRUE(congruent_pairs(scaled, 0.5).empty());

  // Equilateral triangle against its copy rotated 10 degrees about (5, 5).
  const double t = 10.0 * kPi / 180.0;
  std::vector<Point2> eq{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  for (int k = 0; k < 3; ++k) {
    const Point2 d = eq[k] - Point2{5, 5};
    eq.push_back({5 + std::cos(t) * d.x - std::sin(t) * d.y, 5 + std::sin(t) * d.x + std::cos(t) * d.y});
  }
  const auto e1 = triangles_for(std::vector<Point2>(eq.begin(), eq.begin() + 3));
  auto e2 = triangles_for(std::vector<Point2>(eq.begin() + 3, eq.end()));
  for (auto& v : e2[0].v) v += 3;
  const std::vector<Triangle> rot{e1[0], e2[0]};
  EXPECT_EQ(congruent_pairs(rot, 0.1).size(), 1u);
}

TEST(CongruentPairs, SkipsPairsSharingTwoVertices) {
  const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto tris = triangles_for(sq);
  for (const TrianglePair& p : congruent_pairs(tris, 0.1)) {
    int shared = 0;
    for (auto x : tris[p.a].v) shared += std::count(tris[p.b].v.begin(), tris[p.b].v.end(), x);
    EXPECT_LT(shared, 2);
  }
}

TEST(FitRotation, SquareVertexShiftIsAQuarterTurn) {
  // Any two triangles on four points share two vertices, so the pair is
  // built by hand rather than found by congruent_pairs.
  const std::vector<Point2> sq{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Triangle t{{0, 1, 2}, {}};
  for (int k = 0; k < 3; ++k) t.sides[k] = geometry::distance(sq[t.v[(k + 1) % 3]], sq[t.v[(k + 2) % 3]]);
  const std::vector<Triangle> tris{t};
  const TrianglePair pair{0, 0, {{1, 2, 3}}};
  const auto m = fit_rotation(pair, tris, PointIndex(sq), 0.1);
  ASSERT_TRUE(m.has_value());
  EXPECT_NEAR(m->x, 0.0, 1e-12);
  EXPECT_NEAR(m->y, 0.0, 1e-12);
  EXPECT_NEAR(m->theta, kPi / 2, 1e-12);
  EXPECT_NEAR(m->d, 0.0, 1e-12);
  EXPECT_NEAR(m->r, 0.0, 1e-12);
}

TEST(FitRotation, HexagonAboutSeven) {
  const auto models = all_models(hexagon({7, 0}));
  bool sixth = false;
  for (const RotationModel& m : models) {
    EXPECT_NEAR(m.x, 7.0, 1e-12);
    EXPECT_NEAR(m.y, 0.0, 1e-12);
    if (std::abs(m.theta - kPi / 3) < 1e-12) {
      sixth = true;
      EXPECT_EQ(implied_rho(m.theta, 8), 3);
    }
  }
  EXPECT_TRUE(sixth);
}

TEST(FitRotation, DisplacedVertexBoundsDefects) {
  const double eps = 1e-3;
  auto pts = hexagon({7, 0});
  pts[4].x += eps;
  bool found = false;
  for (const RotationModel& m : all_models(pts)) {
    if (std::abs(m.theta - kPi / 3) > 1e-9 || std::hypot(m.x - 7.0, m.y) > 1e-9) continue;
    found = true;
    EXPECT_GT(m.d, 0.0);
    EXPECT_LE(m.d, eps);
    EXPECT_LE(m.r, 2 * eps);
  }
  EXPECT_TRUE(found);
}

TEST(FitRotation, IsAProperIsometry) {
  std::mt19937_64 rng(31);
  const auto pts = oracle::random_points(rng, 14);
  const auto tris = triangles_for(pts);
  const PointIndex index(pts);
  const double tau = 0.3;
  for (const TrianglePair& p : congruent_pairs(tris, tau)) {
    const auto m = fit_rotation(p, tris, index, tau);
    if (!m) continue;
    EXPECT_GE(m->theta, kAngularFloor);
    EXPECT_NEAR(std::abs(m->phi), m->theta, 1e-15);
    // Some candidate map is reproduced within the RMSD bound.
    double best = 1e300;
    for (const auto& map : p.maps) {
      double ss = 0.0;
      for (int k = 0; k < 3; ++k) {
        const Point2 d = pts[tris[p.a].v[k]] - Point2{m->x, m->y};
        const Point2 img{m->x + std::cos(m->phi) * d.x - std::sin(m->phi) * d.y,
                         m->y + std::sin(m->phi) * d.x + std::cos(m->phi) * d.y};
        const Point2 e = img - pts[map[k]];
        ss += e.x * e.x + e.y * e.y;
      }
      best = std::min(best, std::sqrt(ss / 3.0));
    }
    EXPECT_LE(best, tau * tris[p.a].sides[2] * (1 + 1e-12));
  }
}

TEST(ImpliedRho, Gate) {
  EXPECT_EQ(implied_rho(kPi, 8), 1);
  EXPECT_EQ(implied_rho(kPi / 3, 8), 3);
  EXPECT_EQ(implied_rho(kPi / 3.1, 8), 3);
  EXPECT_FALSE(implied_rho(kPi / 7.3, 8).has_value());
  EXPECT_FALSE(implied_rho(kPi / 9, 8).has_value());
}

TEST(ScoreModel, Examples) {
  const auto hex = hexagon({7, 0});
  const PointIndex index(hex);
  RotationModel m;
  m.x = 7.0;
  m.theta = m.phi = kPi / 3;
  EXPECT_DOUBLE_EQ(score_model(m, index, 8), 1.0);
  RotationModel out = m;
  out.x = 9.0;
  EXPECT_EQ(score_model(out, index, 8), 0.0);
  RotationModel odd = m;
  odd.theta = odd.phi = kPi / 7.3;
  EXPECT_EQ(score_model(odd, index, 8), 0.0);
  RotationModel noisy = m;
  noisy.d = index.median_spacing();
  EXPECT_NEAR(score_model(noisy, index, 8), std::exp(-1.0), 1e-12);
  EXPECT_THROW(score_model(m, PointIndex(std::vector<Point2>{}), 8), PreconditionError);
}

TEST(NextAction, Policies) {
  const std::vector<RoundHistory> h{{2, 2}, {2, 4}};
  EXPECT_EQ(next_action(h, 5, Policy::SameLevel).level, 2u);
  EXPECT_EQ(next_action(h, 5, Policy::HigherLevel).level, 3u);
  EXPECT_EQ(next_action(h, 5, Policy::SameUnlessHallucinating).level, 3u);
  const std::vector<RoundHistory> calm{{2, 4}, {2, 4}};
  EXPECT_EQ(next_action(calm, 5, Policy::SameUnlessHallucinating).level, 2u);
  const std::vector<RoundHistory> top{{4, 1}};
  const PolicyDecision d = next_action(top, 5, Policy::HigherLevel);
  EXPECT_EQ(d.level, 4u);
  EXPECT_TRUE(d.exhausted);
  EXPECT_THROW(next_action(std::vector<RoundHistory>{}, 5, Policy::SameLevel), PreconditionError);
}

TEST(ClusterEstimates, IdenticalModelsAtTwoLevels) {
  const std::vector<ScoredModel> models{scored(0, 7, 0, kPi / 3, 0.8), scored(1, 7, 0, kPi / 3, 0.5)};
  const ClusterResult r = cluster_estimates(models, 8);
  ASSERT_TRUE(r.estimate.has_value());
  EXPECT_EQ(r.estimate->rho, 3);
  EXPECT_DOUBLE_EQ(r.estimate->lambda.x, 7.0);
  EXPECT_DOUBLE_EQ(r.estimate->joint, 0.8 * 0.5);
  EXPECT_DOUBLE_EQ(r.estimate->confidence, std::sqrt(0.8 * 0.5));
  EXPECT_FALSE(r.high_entropy);
}

TEST(ClusterEstimates, DisagreeingClustersRaiseEntropy) {
  const std::vector<ScoredModel> models{scored(0, 7, 0, kPi / 3, 0.6), scored(0, 7, 5, kPi / 2, 0.6)};
  const ClusterResult r = cluster_estimates(models, 8);
  EXPECT_EQ(r.clusters.size(), 2u);
  EXPECT_NEAR(r.entropy, 1.0, 1e-12);
  EXPECT_TRUE(r.high_entropy);
  EXPECT_THROW(cluster_estimates(std::vector<ScoredModel>{}, 8), DegenerateGeometry);
}

TEST(ClusterEstimates, CoarserSymmetryFoldsIntoFiner) {
  // A 6-gon also carries 2-fold and 3-fold symmetry about the same center.
  std::vector<ScoredModel> models{scored(0, 7, 0, kPi / 3, 0.9), scored(0, 7, 0, kPi / 3, 0.9),
                                  scored(0, 7, 0, kPi, 0.9), scored(0, 7, 0, 2 * kPi / 3, 0.9)};
  const ClusterResult r = cluster_estimates(models, 8);
  ASSERT_TRUE(r.estimate.has_value());
  EXPECT_EQ(r.estimate->rho, 3);
  EXPECT_EQ(r.estimate->support, 3u);
}

TEST(JordanPipeline, ExactPolygonsAreRecovered) {
  const Point2 c{7.25, -0.5};
  for (int rho = 1; rho <= 8; ++rho) {
    const auto pts = rho == 1 ? oracle::rings(c, 1, {1.0, 2.0, 3.0}) : oracle::rings(c, rho, {1.0, 2.0});
    const auto models = analyze_cloud(pts, 0, 0.1, 8);
    ASSERT_FALSE(models.empty()) << "rho " << rho;
    const ClusterResult r = cluster_estimates(models, 8);
    ASSERT_TRUE(r.estimate.has_value()) << "rho " << rho;
    EXPECT_EQ(r.estimate->rho, rho);
    EXPECT_NEAR(r.estimate->lambda.x, c.x, 1e-9);
    EXPECT_NEAR(r.estimate->lambda.y, c.y, 1e-9);
    EXPECT_NEAR(r.estimate->confidence, 1.0, 1e-9);
    const double theta = r.clusters.front().theta;
    EXPECT_LE(std::abs(kPi / theta - r.estimate->rho), 0.15);
  }
}

TEST(JordanPipeline, UniformNoiseHallucinatesMoreAtLooseTolerance) {
  std::vector<std::size_t> tight, loose;
  for (std::uint64_t seed = 0; seed < 21; ++seed) {
    std::mt19937_64 rng(seed);
    const auto pts = oracle::random_points(rng, 18);
    const auto count = [&](double tau) {
      const auto models = analyze_cloud(pts, 0, tau, 8, seed);
      return static_cast<std::size_t>(std::count_if(models.begin(), models.end(),
                                                    [](const ScoredModel& m) { return m.confidence > 0.0; }));
    };
    tight.push_back(count(0.1));
    loose.push_back(count(0.5));
  }
  std::nth_element(tight.begin(), tight.begin() + 10, tight.end());
  std::nth_element(loose.begin(), loose.begin() + 10, loose.end());
  EXPECT_GE(loose[10], tight[10]);
}

TEST(JordanPipeline, MoreRoundsNeverShrinkWinnerSupport) {
  for (std::uint64_t seed : {5u, 6u}) {
    JordanConfig c = brunet_config(seed);
    c.delta_exponents = {45};
    c.max_rounds = 5;
    c.stop_when_confident = false;
    const auto r = analyze_jordan(brunet(), c);
    ASSERT_EQ(r.audit.size(), 5u);
    for (std::size_t k = 1; k < r.audit.size(); ++k) {
      EXPECT_EQ(r.audit[k].delta_exp, 45);
      EXPECT_GE(r.audit[k].winner_support, r.audit[k - 1].winner_support) << "round " << k + 1;
    }
  }
}

TEST(AnalyzeJordan, BrunetTypeMatrix) {
  const auto r = analyze_jordan(brunet(), brunet_config(7));
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.estimate.rho, 3);
  EXPECT_LT(std::hypot(r.estimate.lambda.x - 7.0, r.estimate.lambda.y), 0.1);
  EXPECT_GE(r.estimate.rounds_used, 1);
  EXPECT_EQ(r.levels.size(), 11u);
  EXPECT_EQ(r.clouds.size(), 11u);
}

TEST(AnalyzeJordan, SimpleEigenvalue) {
  const std::vector<JordanBlockSpec> blocks{{-3.0, 1}, {2.0, 1}, {5.0, 2}};
  JordanConfig c = brunet_config(3);
  c.region = {1, 3, -1, 1};
  const auto r = analyze_jordan(numkernel::synth_jordan(blocks, 77, 10.0), c);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.estimate.rho, 1);
  EXPECT_LT(std::hypot(r.estimate.lambda.x - 2.0, r.estimate.lambda.y), 0.1);
}

TEST(AnalyzeJordan, HigherPolicyAdvances) {
  JordanConfig c = brunet_config(11);
  c.policy = Policy::HigherLevel;
  c.max_rounds = 5;
  const auto r = analyze_jordan(brunet(), c);
  for (std::size_t k = 1; k < r.audit.size(); ++k) {
    if (r.audit[k - 1].next == "higher") {
      EXPECT_LT(r.audit[k].delta_exp, r.audit[k - 1].delta_exp);
    }
  }
}

TEST(AnalyzeJordan, Deterministic) {
  const auto a = analyze_jordan(brunet(), brunet_config(21));
  const auto b = analyze_jordan(brunet(), brunet_config(21));
  ASSERT_EQ(a.audit.size(), b.audit.size());
  for (std::size_t k = 0; k < a.audit.size(); ++k) {
    EXPECT_EQ(a.audit[k].cloud_size, b.audit[k].cloud_size);
    EXPECT_EQ(a.audit[k].models, b.audit[k].models);
    EXPECT_EQ(a.audit[k].entropy, b.audit[k].entropy);
    EXPECT_EQ(a.audit[k].next, b.audit[k].next);
  }
  EXPECT_EQ(a.estimate.lambda, b.estimate.lambda);
  EXPECT_EQ(a.estimate.rho, b.estimate.rho);
  EXPECT_EQ(a.estimate.confidence, b.estimate.confidence);
}

TEST(AnalyzeJordan, EmptyRegionFindsNothing) {
  JordanConfig c = brunet_config(1);
  c.region = {20, 21, -1, 1};
  c.max_rounds = 2;
  const auto r = analyze_jordan(brunet(), c);
  EXPECT_FALSE(r.found);
  EXPECT_FALSE(r.estimate.confident);
  EXPECT_EQ(r.estimate.rounds_used, 2);
}
