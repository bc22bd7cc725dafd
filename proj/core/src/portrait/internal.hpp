#pragma once

#include <span>
#include <vector>

#include "qcorr/portrait.hpp"

namespace qcorr::portrait::detail {

/// Boundary-inclusive containment in a closed curve; false for open or
/// zero-area curves.
bool inside(const LevelCurve& curve, Point2 p);

/// Fraction of `from` points with at least one g_i edge into `to`, computed
/// through sal::analogize over the two point groups.
double matched_fraction(std::span<const std::size_t> from, std::span<const std::size_t> to,
                        const geometry::NeighborhoodGraph& g_i);

/// Largest angular gap about `center` between the given locations; 2 pi when
/// fewer than two locations are available.
double largest_angular_gap(Point2 center, std::span<const Point2> locations);

/// Raw samples strictly between `inner` and `outer`: inside outer, outside
/// inner and every curve in `also_outside`, and magnitude strictly between
/// the two levels.
std::vector<Point2> separating_samples(const LevelCurve& inner, const LevelCurve& outer,
                                       std::span<const LevelCurve* const> also_outside,
                                       std::span<const RawSample> raw);

/// Moves every crossing along its lattice edge onto the true level of
/// sigma_min(a - zI) / ||a||_2 by Illinois false position, starting from the
/// linear estimate. A crossing whose edge does not straddle the true level
/// (filled-in node values) is searched for along the local gradient instead,
/// so it may leave its edge; t is then left as interpolated. Polylines are
/// refreshed from the moved points.
void polish_crossings(CurveSet& set, const sal::Field& field, const DenseMatrix& a,
                      double a_two_norm);

}  // namespace qcorr::portrait::detail
