#pragma once

#include <array>
#include <optional>

#include "qcorr/jordan.hpp"

namespace qcorr::jordan::detail {

/// Rotation carrying points `from` onto `to` (index-aligned), with d and r
/// measured against `cloud` (left 0 when it is null). nullopt below the
/// angular floor or when the vertex RMSD exceeds `max_residual`.
std::optional<RotationModel> fit_points(const std::array<Point2, 3>& from,
                                        const std::array<Point2, 3>& to, const PointIndex* cloud,
                                        double max_residual, double* residual = nullptr);

}  // namespace qcorr::jordan::detail
