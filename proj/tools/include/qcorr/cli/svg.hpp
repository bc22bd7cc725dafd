#pragma once

// Standalone SVG 1.1 renderings. Output depends only on the result, so the
// same result always gives the same bytes.

#include <string>

#include "qcorr/jordan.hpp"
#include "qcorr/portrait.hpp"

namespace qcorr::cli {

/// Level curves (one polyline per curve, colour and dash by level),
/// eigenvalue markers and the merge tree.
std::string portrait_svg(const portrait::PortraitResult& r, const portrait::PortraitConfig& config);

/// The cloud holding the most points, as red dots, and its image under the
/// winning rotation as green circles.
std::string jordan_svg(const jordan::JordanResult& r);

void write_text(const std::string& path, const std::string& text);

}  // namespace qcorr::cli
