#include "lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcorr/error.hpp"

namespace qcorr::portrait {

void PortraitConfig::validate() const {
  if (levels.empty()) throw PreconditionError("portrait: empty level list");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] > 0.0 && levels[k] < 1.0)) {
      throw PreconditionError("portrait: level " + std::to_string(levels[k]) +
                              " outside (0, 1)");
    }
    if (k > 0 && !(levels[k] < levels[k - 1])) {
      throw PreconditionError("portrait: levels must be strictly decreasing");
    }
  }
  if (initial_resolution && !(*initial_resolution > 0.0)) {
    throw PreconditionError("portrait: resolution must be positive");
  }
  if (!(margin > 0.0)) throw PreconditionError("portrait: margin must be positive");
  if (!(theta_max > 0.0 && theta_max < 3.141592653589793)) {
    throw PreconditionError("portrait: theta_max must lie in (0, pi)");
  }
  if (!(match_min > 0.0 && match_min <= 1.0)) {
    throw PreconditionError("portrait: match_min must lie in (0, 1]");
  }
  if (max_refinements < 1) throw PreconditionError("portrait: max_refinements must be >= 1");
}

std::vector<double> decade_levels(int first, int last) {
  if (first < 1 || last < first) {
    throw PreconditionError("decade_levels: need 1 <= first <= last");
  }
  std::vector<double> out;
  for (int k = first; k <= last; ++k) out.push_back(std::pow(10.0, -k));
  return out;
}

Grid Grid::covering(const Bounds& b, double spacing) {
  if (!(spacing > 0.0)) throw PreconditionError("Grid: spacing must be positive");
  const double i0 = std::floor(b.re_min / spacing), i1 = std::ceil(b.re_max / spacing);
  const double j0 = std::floor(b.im_min / spacing), j1 = std::ceil(b.im_max / spacing);
  Grid g;
  g.origin = {i0 * spacing, j0 * spacing};
  g.spacing = spacing;
  g.nx = static_cast<std::size_t>(i1 - i0) + 1;
  g.ny = static_cast<std::size_t>(j1 - j0) + 1;
  return g;
}

sal::Field sample_grid(const DenseMatrix& a, const Grid& grid) {
  if (!(grid.spacing > 0.0)) throw PreconditionError("sample_grid: spacing must be positive");
  const double norm = numkernel::two_norm(a);
  std::vector<sal::Sample> samples;
  samples.reserve(grid.nx * grid.ny);
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const Point2 p = grid.at(i, j);
      try {
        samples.push_back({p, numkernel::portrait_value(a, norm, Complex(p.x, p.y))});
      } catch (const NumericalFailure& e) {
        std::ostringstream os;
        os.precision(17);
        os << "sample_grid: at z = " << p.x << (p.y < 0 ? "" : "+") << p.y << "i: " << e.what();
        throw NumericalFailure(os.str());
      }
    }
  }
  return sal::Field(std::move(samples));
}

double default_resolution(std::span<const Complex> eigenvalues) {
  double scale = 0.0;
  for (const Complex& z : eigenvalues) scale = std::max(scale, std::abs(z));
  const double same = 1e-3 * (1.0 + scale);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    for (std::size_t j = i + 1; j < eigenvalues.size(); ++j) {
      const double d = std::abs(eigenvalues[i] - eigenvalues[j]);
      if (d > same) gap = std::min(gap, d);
    }
  }
  return std::min(0.5, 0.5 * gap);
}

namespace detail {

Lattice::Lattice(const DenseMatrix& a, double a_two_norm, double base_spacing, std::int64_t i0,
                 std::int64_t i1, std::int64_t j0, std::int64_t j1, int max_depth)
    : a_(&a), norm_(a_two_norm), h0_(base_spacing), i0_(i0), i1_(i1), j0_(j0), j1_(j1),
      max_depth_(max_depth) {
  if (max_depth < 0 || max_depth > 30) throw PreconditionError("Lattice: depth out of range");
  const std::int64_t u = unit(0);
  for (std::int64_t j = j0_; j <= j1_; ++j) {
    for (std::int64_t i = i0_; i <= i1_; ++i) evaluate({i * u, j * u});
  }
}

Point2 Lattice::location(const Key& k) const {
  const double h = std::ldexp(h0_, -max_depth_);
  return {static_cast<double>(k.first) * h, static_cast<double>(k.second) * h};
}

void Lattice::evaluate(const Key& k) {
  if (values_.count(k)) return;
  const Point2 p = location(k);
  try {
    values_.emplace(k, numkernel::portrait_value(*a_, norm_, Complex(p.x, p.y)));
  } catch (const NumericalFailure& e) {
    std::ostringstream os;
    os.precision(17);
    os << "portrait sample at z = " << p.x << (p.y < 0 ? "" : "+") << p.y << "i: " << e.what();
    throw NumericalFailure(os.str());
  }
}

void Lattice::expand(std::int64_t steps) {
  const std::int64_t ni0 = i0_ - steps, ni1 = i1_ + steps;
  const std::int64_t nj0 = j0_ - steps, nj1 = j1_ + steps;
  const std::int64_t u = unit(0);
  for (std::int64_t j = nj0; j <= nj1; ++j) {
    for (std::int64_t i = ni0; i <= ni1; ++i) {
      if (i < i0_ || i > i1_ || j < j0_ || j > j1_) evaluate({i * u, j * u});
    }
  }
  i0_ = ni0;
  i1_ = ni1;
  j0_ = nj0;
  j1_ = nj1;
}

void Lattice::subsample(const Bounds& region) {
  const double h = std::ldexp(h0_, -max_depth_);
  const auto lo = [&](double v, std::int64_t step, std::int64_t floor_units) {
    const auto k = static_cast<std::int64_t>(std::ceil(v / h / static_cast<double>(step)));
    return std::max(k * step, floor_units);
  };
  const auto hi = [&](double v, std::int64_t step, std::int64_t ceil_units) {
    const auto k = static_cast<std::int64_t>(std::floor(v / h / static_cast<double>(step)));
    return std::min(k * step, ceil_units);
  };
  const std::int64_t u0 = unit(0);
  const auto nodes = [&](int depth) {
    const std::int64_t s = unit(depth);
    std::vector<Key> out;
    const std::int64_t x0 = lo(region.re_min, s, i0_ * u0), x1 = hi(region.re_max, s, i1_ * u0);
    const std::int64_t y0 = lo(region.im_min, s, j0_ * u0), y1 = hi(region.im_max, s, j1_ * u0);
    for (std::int64_t y = y0; y <= y1; y += s) {
      for (std::int64_t x = x0; x <= x1; x += s) out.push_back({x, y});
    }
    return out;
  };
  const auto complete = [&](int depth) {
    const auto ks = nodes(depth);
    return std::all_of(ks.begin(), ks.end(), [&](const Key& k) { return values_.count(k) > 0; });
  };
  if (complete(depth_) && depth_ < max_depth_) ++depth_;
  for (const Key& k : nodes(depth_)) evaluate(k);
}

Grid Lattice::grid() const {
  Grid g;
  g.spacing = std::ldexp(h0_, -depth_);
  const double h = std::ldexp(h0_, -max_depth_);
  g.origin = {static_cast<double>(i0_ * unit(0)) * h, static_cast<double>(j0_ * unit(0)) * h};
  g.nx = static_cast<std::size_t>((i1_ - i0_) << depth_) + 1;
  g.ny = static_cast<std::size_t>((j1_ - j0_) << depth_) + 1;
  return g;
}

sal::Field Lattice::field() const {
  // Magnitudes depth by depth: evaluated nodes keep their sample, others
  // are refined bilinearly from the coarser depth.
  std::size_t nx = static_cast<std::size_t>(i1_ - i0_) + 1;
  std::size_t ny = static_cast<std::size_t>(j1_ - j0_) + 1;
  const std::int64_t ox = i0_ * unit(0), oy = j0_ * unit(0);
  std::vector<double> mag(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const Key k{ox + static_cast<std::int64_t>(i) * unit(0),
                  oy + static_cast<std::int64_t>(j) * unit(0)};
      mag[j * nx + i] = detail::magnitude(values_.at(k));
    }
  }
  for (int d = 1; d <= depth_; ++d) {
    const std::size_t fx = 2 * (nx - 1) + 1, fy = 2 * (ny - 1) + 1;
    std::vector<double> fine(fx * fy);
    const std::int64_t s = unit(d);
    const auto at = [&](std::size_t i, std::size_t j) -> double& { return fine[j * fx + i]; };
    const auto sampled = [&](std::size_t i, std::size_t j, double& out) {
      const auto it = values_.find({ox + static_cast<std::int64_t>(i) * s,
                                    oy + static_cast<std::int64_t>(j) * s});
      if (it == values_.end()) return false;
      out = detail::magnitude(it->second);
      return true;
    };
    for (std::size_t j = 0; j < fy; j += 2) {
      for (std::size_t i = 0; i < fx; i += 2) at(i, j) = mag[(j / 2) * nx + i / 2];
    }
    for (std::size_t j = 0; j < fy; ++j) {
      for (std::size_t i = 0; i < fx; ++i) {
        if (i % 2 == 0 && j % 2 == 0) continue;
        double v;
        if (sampled(i, j, v)) {
          at(i, j) = v;
        } else if (j % 2 == 0) {
          at(i, j) = 0.5 * (at(i - 1, j) + at(i + 1, j));
        } else if (i % 2 == 0) {
          at(i, j) = 0.5 * (at(i, j - 1) + at(i, j + 1));
        } else {
          at(i, j) = 0.25 * (at(i - 1, j - 1) + at(i + 1, j - 1) + at(i - 1, j + 1) +
                             at(i + 1, j + 1));
        }
      }
    }
    mag = std::move(fine);
    nx = fx;
    ny = fy;
  }
  const std::int64_t s = unit(depth_);
  std::vector<sal::Sample> samples;
  samples.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const Key k{ox + static_cast<std::int64_t>(i) * s, oy + static_cast<std::int64_t>(j) * s};
      const auto it = values_.find(k);
      const double m = mag[j * nx + i];
      const double p = it != values_.end()
                           ? it->second
                           : (m == 0.0 ? numkernel::kPortraitInfinity : -std::log10(m));
      samples.push_back({location(k), p});
    }
  }
  return sal::Field(std::move(samples));
}

std::vector<RawSample> Lattice::raw() const {
  std::vector<RawSample> out;
  out.reserve(values_.size());
  for (const auto& [k, p] : values_) out.push_back({location(k), detail::magnitude(p)});
  return out;
}

}  // namespace detail
}  // namespace qcorr::portrait
