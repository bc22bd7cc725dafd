#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "lattice.hpp"
#include "qcorr/error.hpp"

namespace qcorr::portrait {

namespace {

geometry::NeighborhoodGraph triangulate(const CurveSet& set) {
  std::vector<Point2> pts;
  pts.reserve(set.points.size());
  for (const auto& c : set.points) pts.push_back(c.location);
  try {
    return sal::aggregate(pts, sal::DelaunayRule{});
  } catch (const Error&) {
    // Too few or collinear crossings: no cross-curve neighbors at all.
    return geometry::NeighborhoodGraph::over_range(pts.size(), {});
  }
}

}  // namespace

PortraitResult analyze_portrait(const DenseMatrix& a, const PortraitConfig& config) {
  config.validate();
  if (!a.square()) throw PreconditionError("analyze_portrait: matrix is not square");

  PortraitResult result;
  result.eigenvalues = numkernel::eigenvalues(a).values;
  result.two_norm = numkernel::two_norm(a);
  const double h0 = config.initial_resolution.value_or(default_resolution(result.eigenvalues));
  result.base_spacing = h0;

  Bounds box{result.eigenvalues.front().real(), result.eigenvalues.front().real(),
             result.eigenvalues.front().imag(), result.eigenvalues.front().imag()};
  for (const Complex& z : result.eigenvalues) {
    box.re_min = std::min(box.re_min, z.real());
    box.re_max = std::max(box.re_max, z.real());
    box.im_min = std::min(box.im_min, z.imag());
    box.im_max = std::max(box.im_max, z.imag());
  }
  const auto lo = [&](double v) { return static_cast<std::int64_t>(std::floor((v - config.margin) / h0)); };
  const auto hi = [&](double v) { return static_cast<std::int64_t>(std::ceil((v + config.margin) / h0)); };
  const auto margin_steps = static_cast<std::int64_t>(std::ceil(config.margin / h0 - 1e-9));

  detail::Lattice lattice(a, result.two_norm, h0, lo(box.re_min), hi(box.re_max), lo(box.im_min),
                          hi(box.im_max), config.max_refinements);
  result.initial_samples = lattice.evaluated();

  int used = 0;
  for (;;) {
    const Grid grid = lattice.grid();
    const sal::Field field = lattice.field();
    const std::vector<RawSample> raw = lattice.raw();
    result.curves = extract_curves(field, grid, config.levels, result.eigenvalues);
    detail::polish_crossings(result.curves, field, a, result.two_norm);
    const auto g_i = triangulate(result.curves);
    result.report = track_merges(result.curves, g_i, raw, result.eigenvalues, config);
    result.bounds = grid.bounds();
    result.finest_spacing = grid.spacing;
    result.samples_used = lattice.evaluated();

    const SamplingAction action = refine(result.report, grid.spacing);
    if (action.kind == ActionKind::Done) {
      result.confident = true;
      break;
    }
    if (used >= config.max_refinements) break;
    ++used;
    AuditEntry entry;
    entry.action = action.kind;
    entry.reason = action.reason;
    if (action.kind == ActionKind::ExpandGrid) {
      lattice.expand(margin_steps);
      entry.region = lattice.bounds();
      ++result.expansions;
    } else {
      lattice.subsample(*action.region);
      entry.region = *action.region;
      ++result.subsamples;
    }
    entry.spacing = lattice.grid().spacing;
    entry.samples = lattice.evaluated();
    result.audit.push_back(std::move(entry));
  }
  return result;
}

}  // namespace qcorr::portrait
