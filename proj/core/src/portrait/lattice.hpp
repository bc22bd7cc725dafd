#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qcorr/portrait.hpp"

namespace qcorr::portrait::detail {

/// Sampled portrait over a nested family of lattices. Depth 0 has the base
/// spacing and covers the current bounds completely; depth d halves it d
/// times and is only evaluated inside subsampled regions. Values at
/// unevaluated fine nodes are filled by bilinear refinement from the next
/// coarser depth, in the perturbation-magnitude domain.
class Lattice {
public:
  Lattice(const DenseMatrix& a, double a_two_norm, double base_spacing, std::int64_t i0,
          std::int64_t i1, std::int64_t j0, std::int64_t j1, int max_depth);

  /// Grow the bounds by `steps` base spacings on every side.
  void expand(std::int64_t steps);
  /// Evaluate every node of the current depth inside `region`; first moves
  /// one depth finer when the region is already fully evaluated there.
  void subsample(const Bounds& region);

  Grid grid() const;
  /// Portrait values on grid() in node-id order.
  sal::Field field() const;
  /// Evaluated samples inside the bounds.
  std::vector<RawSample> raw() const;

  std::size_t evaluated() const { return values_.size(); }
  int depth() const { return depth_; }
  Bounds bounds() const { return grid().bounds(); }

private:
  using Key = std::pair<std::int64_t, std::int64_t>;  // in units of the finest spacing

  std::int64_t unit(int depth) const { return std::int64_t{1} << (max_depth_ - depth); }
  Point2 location(const Key& k) const;
  void evaluate(const Key& k);

  const DenseMatrix* a_;
  double norm_;
  double h0_;
  std::int64_t i0_, i1_, j0_, j1_;  // bounds in base units
  int max_depth_;
  int depth_ = 0;
  std::map<Key, double> values_;  // portrait value P
};

/// Perturbation magnitude sigma_min / ||a|| from a portrait value.
inline double magnitude(double portrait) {
  return std::isinf(portrait) ? 0.0 : std::pow(10.0, -portrait);
}

}  // namespace qcorr::portrait::detail
