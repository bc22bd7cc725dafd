#pragma once

#include "qcorr/geometry.hpp"

namespace qcorr::geometry::detail {

/// Sign of the orientation of (a, b, c): +1 counterclockwise, -1 clockwise,
/// 0 collinear. Exact: a floating-point filter falls back to rational
/// arithmetic when the double result is not certified.
int orient2d(Point2 a, Point2 b, Point2 c);

/// +1 when d lies strictly inside the circle through counterclockwise
/// (a, b, c), -1 strictly outside, 0 cocircular. Exact like orient2d.
int incircle(Point2 a, Point2 b, Point2 c, Point2 d);

}  // namespace qcorr::geometry::detail
