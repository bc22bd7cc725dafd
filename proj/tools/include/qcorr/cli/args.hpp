#pragma once

// Flag value parsers. All throw ParseError (line 0) on malformed text.

#include <string>
#include <vector>

#include "qcorr/jordan.hpp"
#include "qcorr/numkernel.hpp"

namespace qcorr::cli {

/// "1e-1..1e-8" gives the decades 10^-1 .. 10^-8; otherwise a comma list.
std::vector<double> parse_levels(const std::string& text);

/// "re_min,re_max,im_min,im_max".
jordan::Region parse_region(const std::string& text);

/// "40:50" for an inclusive range, otherwise a comma list.
std::vector<int> parse_deltas(const std::string& text);

/// same | higher | adaptive.
jordan::Policy parse_policy(const std::string& text);

/// "3", "-0.5", "2+3i", "1-2.5i", "4i".
numkernel::Complex parse_complex(const std::string& text);

/// "value:multiplicity" items, e.g. "1:3,2:3,3:3,4:1". A bare value means 1.
std::vector<numkernel::Root> parse_roots(const std::string& text);

/// "lambda:rho" items, e.g. "-1:1,-2:1,7:3,7:3".
std::vector<numkernel::JordanBlockSpec> parse_blocks(const std::string& text);

}  // namespace qcorr::cli
