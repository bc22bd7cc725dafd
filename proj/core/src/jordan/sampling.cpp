#include <algorithm>
#include <cmath>

#include "qcorr/error.hpp"
#include "qcorr/jordan.hpp"

namespace qcorr::jordan {

const char* to_string(Policy p) {
  switch (p) {
    case Policy::SameLevel: return "same";
    case Policy::HigherLevel: return "higher";
    case Policy::SameUnlessHallucinating: return "adaptive";
  }
  return "?";
}

void JordanConfig::validate() const {
  if (delta_exponents.empty()) throw PreconditionError("jordan: no perturbation exponents");
  std::vector<int> sorted = delta_exponents;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw PreconditionError("jordan: repeated perturbation exponent");
  }
  if (sorted.front() < 1) throw PreconditionError("jordan: exponents must be positive");
  if (!(region.re_min < region.re_max && region.im_min < region.im_max)) {
    throw PreconditionError("jordan: empty region");
  }
  if (round_size < 6 || round_size > 8) {
    throw PreconditionError("jordan: round_size must lie in [6, 8]");
  }
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw PreconditionError("jordan: tolerance must lie in (0, 1)");
  }
  if (rho_max < 1) throw PreconditionError("jordan: rho_max must be >= 1");
  if (max_rounds < 1) throw PreconditionError("jordan: max_rounds must be >= 1");
  if (pair_cap < 1) throw PreconditionError("jordan: pair_cap must be >= 1");
}

std::vector<int> delta_range(int a, int b) {
  std::vector<int> out;
  for (int d = std::min(a, b); d <= std::max(a, b); ++d) out.push_back(d);
  return out;
}

DenseMatrix perturb(const DenseMatrix& a, int delta_exp, Rng& rng) {
  if (!a.square()) throw PreconditionError("perturb: matrix is not square");
  const double norm = numkernel::inf_norm(a);
  if (norm == 0.0) throw DegenerateGeometry("perturb: zero matrix has no normwise scale");
  const double s = std::ldexp(norm, 1 - delta_exp);
  Eigen::MatrixXcd m = a.values();
  std::uint64_t bits = 0;
  int left = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (left == 0) {
        bits = rng();
        left = 64;
      }
      m(r, c) += (bits & 1u) ? s : -s;
      bits >>= 1;
      --left;
    }
  }
  return DenseMatrix(std::move(m));
}

RoundLog collect_round(const DenseMatrix& a, int delta_exp, int count, const Region& region,
                       std::uint64_t seed, std::uint64_t stream, SampleCloud& cloud) {
  if (count < 1) throw PreconditionError("collect_round: count must be positive");
  RoundLog log;
  for (int t = 0; t < count; ++t) {
    ++log.trials;
    Rng rng(derive_seed(seed, {stream, static_cast<std::uint64_t>(t)}));
    try {
      const auto spectrum = numkernel::eigenvalues(perturb(a, delta_exp, rng));
      for (const Complex& z : spectrum.values) {
        const Point2 p{z.real(), z.imag()};
        if (region.contains(p)) {
          cloud.points.push_back(p);
          ++log.points_added;
        }
      }
    } catch (const NumericalFailure&) {
      ++log.failed;
    }
  }
  return log;
}

PolicyDecision next_action(std::span<const RoundHistory> history, std::size_t level_count,
                           Policy policy) {
  if (history.empty()) throw PreconditionError("next_action: no completed round");
  const std::size_t current = history.back().level;
  const auto advance = [&]() {
    if (current + 1 < level_count) return PolicyDecision{current + 1, false};
    return PolicyDecision{current, true};
  };
  switch (policy) {
    case Policy::SameLevel: return {current, false};
    case Policy::HigherLevel: return advance();
    case Policy::SameUnlessHallucinating:
      if (history.size() >= 2 && history.back().clusters > history[history.size() - 2].clusters) {
        return advance();
      }
      return {current, false};
  }
  return {current, false};
}

}  // namespace qcorr::jordan
