#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "qcorr/cli/args.hpp"
#include "qcorr/cli/matrix_io.hpp"
#include "qcorr/cli/results.hpp"
#include "qcorr/cli/svg.hpp"
#include "qcorr/error.hpp"

using namespace qcorr;
using namespace qcorr::cli;
using numkernel::Complex;

namespace {

DenseMatrix read(const std::string& text, MatrixFormat f = MatrixFormat::Auto) {
  std::istringstream in(text);
  return read_matrix(in, f);
}

std::size_t error_line(const std::string& text) {
  try {
    read(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return 0;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(MatrixMarket, ArrayIsColumnMajor) {
  const DenseMatrix m = read("%%MatrixMarket matrix array real general\n% comment\n2 2\n1\n3\n2\n4\n");
  EXPECT_EQ(m, DenseMatrix::from_rows({{1, 2}, {3, 4}}));
}

TEST(MatrixMarket, CoordinateFillsZeros) {
  const DenseMatrix m = read("%%MatrixMarket matrix coordinate real general\n3 3 2\n1 1 5\n3 2 -1.5\n");
  EXPECT_EQ(m, DenseMatrix::from_rows({{5, 0, 0}, {0, 0, 0}, {0, -1.5, 0}}));
}

TEST(MatrixMarket, ComplexAndSymmetric) {
  const DenseMatrix c = read("%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 2 1.5 -2\n");
  EXPECT_EQ(c(0, 1), Complex(1.5, -2));
  EXPECT_EQ(c(1, 0), Complex(0, 0));
  const DenseMatrix s = read("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 7\n");
  EXPECT_EQ(s, DenseMatrix::from_rows({{1, 7}, {7, 0}}));
  const DenseMatrix h = read("%%MatrixMarket matrix coordinate complex hermitian\n2 2 1\n2 1 1 2\n");
  EXPECT_EQ(h(0, 1), Complex(1, -2));
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("%%MatrixMarket matrix array real banana\n2 2\n1\n2\n3\n4\n"), 1u);
  EXPECT_EQ(error_line("%%MatrixMarket matrix array real general\n2 2\n1\nx\n3\n4\n"), 4u);
  EXPECT_EQ(error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n"), 3u);
  EXPECT_EQ(error_line("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n"), 5u);
  EXPECT_EQ(error_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n1 1 2\n"), 4u);
}

TEST(Csv, ParsesRowsAndRejectsRagged) {
  EXPECT_EQ(read("1,2\n3,4\n"), DenseMatrix::from_rows({{1, 2}, {3, 4}}));
  EXPECT_EQ(read("1,2\n3,4", MatrixFormat::Csv), DenseMatrix::from_rows({{1, 2}, {3, 4}}));
  EXPECT_EQ(error_line("1,2\n3\n"), 2u);
  EXPECT_EQ(error_line("1,2\n3,four\n"), 2u);
}

TEST(MatrixIo, RoundTrips) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1e3);
  for (int k = 0; k < 20; ++k) {
    const std::size_t n = 1 + k % 6;
    std::vector<Complex> e(n * n);
    for (auto& x : e) x = g(rng) * std::pow(10.0, k % 7 - 3);
    const DenseMatrix m(n, n, e);
    std::ostringstream csv, mm;
    write_csv(csv, m);
    write_matrix_market(mm, m);
    EXPECT_EQ(read(csv.str(), MatrixFormat::Csv), m);
    const DenseMatrix back = read(mm.str());
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        EXPECT_LE(std::abs(back(r, c) - m(r, c)), 1e-15 * std::abs(m(r, c)));
      }
    }
  }
  const DenseMatrix z(1, 1, {Complex(1, 2)});
  std::ostringstream mm;
  write_matrix_market(mm, z);
  EXPECT_EQ(read(mm.str()), z);
  std::ostringstream csv;
  EXPECT_THROW(write_csv(csv, z), PreconditionError);
}

TEST(Args, Levels) {
  const auto d = parse_levels("1e-1..1e-4");
  ASSERT_EQ(d.size(), 4u);
  EXPECT_DOUBLE_EQ(d[0], 0.1);
  EXPECT_DOUBLE_EQ(d[3], 1e-4);
  EXPECT_EQ(parse_levels("0.1,0.01"), (std::vector<double>{0.1, 0.01}));
  EXPECT_THROW(parse_levels("1e-1..x"), ParseError);
  EXPECT_THROW(parse_levels(""), ParseError);
}

TEST(Args, RegionDeltasPolicy) {
  const auto r = parse_region("6,8,-1,1");
  EXPECT_EQ(r.re_min, 6);
  EXPECT_EQ(r.im_max, 1);
  EXPECT_THROW(parse_region("6,8,-1"), ParseError);
  EXPECT_EQ(parse_deltas("40:43"), (std::vector<int>{40, 41, 42, 43}));
  EXPECT_EQ(parse_deltas("40,45"), (std::vector<int>{40, 45}));
  EXPECT_EQ(parse_policy("same"), jordan::Policy::SameLevel);
  EXPECT_EQ(parse_policy("higher"), jordan::Policy::HigherLevel);
  EXPECT_EQ(parse_policy("3"), jordan::Policy::SameUnlessHallucinating);
  EXPECT_THROW(parse_policy("sideways"), ParseError);
}

TEST(Args, ComplexRootsBlocks) {
  EXPECT_EQ(parse_complex("2+3i"), Complex(2, 3));
  EXPECT_EQ(parse_complex("1-2.5i"), Complex(1, -2.5));
  EXPECT_EQ(parse_complex("4i"), Complex(0, 4));
  EXPECT_EQ(parse_complex("-0.5"), Complex(-0.5, 0));
  EXPECT_THROW(parse_complex("2+"), ParseError);
  const auto roots = parse_roots("1:3,2:3,3:3,4");
  ASSERT_EQ(roots.size(), 4u);
  EXPECT_EQ(roots[0].multiplicity, 3);
  EXPECT_EQ(roots[3].multiplicity, 1);
  EXPECT_EQ(roots[3].value, Complex(4, 0));
  const auto blocks = parse_blocks("-1:1,7:3");
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[1].rho, 3);
  EXPECT_THROW(parse_blocks("7"), ParseError);
}

TEST(Results, PortraitJsonAndSvgAreDeterministic) {
  const std::vector<numkernel::Root> roots{{0.0, 1}, {0.6, 1}, {3.0, 1}};
  const DenseMatrix a = numkernel::companion_matrix(roots);
  portrait::PortraitConfig c;
  c.levels = {1e-1, 1e-2, 1e-3};
  c.initial_resolution = 0.25;
  const auto r1 = portrait::analyze_portrait(a, c);
  const auto r2 = portrait::analyze_portrait(a, c);
  EXPECT_EQ(dump(portrait_json(r1, c)), dump(portrait_json(r2, c)));
  const std::string svg = portrait_svg(r1, c);
  EXPECT_EQ(svg, portrait_svg(r2, c));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  // One polyline per level curve, plus one per tree edge.
  std::size_t tree_edges = 0;
  for (std::size_t v = r1.eigenvalues.size(); v < r1.report.tree.nodes.size(); ++v) {
    tree_edges += r1.report.tree.nodes[v].children.size();
  }
  EXPECT_EQ(count(svg, "<polyline"), r1.curves.curves.size() + tree_edges);

  const json j = portrait_json(r1, c);
  for (const char* key : {"eigenvalues", "merges", "unresolved", "refinements", "samples_used"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Results, EmptyMergeListDrawsMarkersOnly) {
  portrait::PortraitResult r;
  r.eigenvalues = {Complex(0, 0), Complex(1, 1)};
  r.bounds = {-1, 2, -1, 2};
  r.report.tree.nodes.resize(2);
  r.report.tree.roots = {0, 1};
  portrait::PortraitConfig c;
  c.levels = {0.1};
  const std::string svg = portrait_svg(r, c);
  EXPECT_EQ(count(svg, "<polyline"), 0u);
  EXPECT_EQ(count(svg, "<path"), 2u);
}

TEST(Results, JordanSvgHasOriginalAndRotatedMarkers) {
  jordan::JordanResult r;
  r.found = true;
  r.estimate.lambda = {7, 0};
  r.estimate.rho = 3;
  jordan::SampleCloud cloud;
  cloud.points = {{8, 0}, {7.5, 0.8}, {6, 0}};
  r.clouds.push_back(cloud);
  const std::string svg = jordan_svg(r);
  EXPECT_EQ(svg, jordan_svg(r));
  const auto orig = svg.find("class=\"original\""), rot = svg.find("class=\"rotated\"");
  ASSERT_NE(orig, std::string::npos);
  ASSERT_NE(rot, std::string::npos);
  EXPECT_EQ(count(svg.substr(orig, rot - orig), "<circle"), 3u);
  EXPECT_EQ(count(svg.substr(rot), "<circle"), 3u);
}

TEST(Results, JordanJsonIsDeterministic) {
  const std::vector<numkernel::JordanBlockSpec> blocks{{-1.0, 1}, {7.0, 2}};
  const DenseMatrix a = numkernel::synth_jordan(blocks, 5, 10.0);
  jordan::JordanConfig c;
  c.delta_exponents = jordan::delta_range(40, 44);
  c.region = {6, 8, -1, 1};
  c.seed = 3;
  c.max_rounds = 2;
  const auto j1 = dump(jordan_json(jordan::analyze_jordan(a, c), c));
  const auto j2 = dump(jordan_json(jordan::analyze_jordan(a, c), c));
  EXPECT_EQ(j1, j2);
  const json j = json::parse(j1);
  for (const char* key : {"lambda", "rho", "confidence", "rounds_used", "per_level_models"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}
