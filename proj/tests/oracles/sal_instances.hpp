#pragma once

// Random higher-level layers for the SAL laws, and the analogy edges a
// full enumeration of constituent pairs gives.

#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "qcorr/sal.hpp"

namespace oracle {

using Object = qcorr::sal::HigherObject<int>;

// n objects with disjoint constituent sets of size 1..max_size, a random g_h
// and a random confidence table.
struct SalInstance {
  std::vector<Object> objects;
  qcorr::geometry::NeighborhoodGraph g_h;
  std::map<std::pair<qcorr::sal::NodeId, qcorr::sal::NodeId>, double> conf;
};

inline SalInstance random_sal_instance(std::mt19937_64& rng, std::size_t max_size) {
  using qcorr::geometry::Edge;
  std::uniform_int_distribution<std::size_t> count(2, 5), size(1, max_size);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SalInstance inst;
  const std::size_t n = count(rng);
  qcorr::sal::NodeId next = 0;
  for (std::size_t h = 0; h < n; ++h) {
    Object o;
    o.id = h;
    for (std::size_t k = size(rng); k > 0; --k) o.constituents.push_back(next++);
    inst.objects.push_back(o);
  }
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (u(rng) < 0.5) edges.push_back({a, b, std::nullopt});
    }
  }
  inst.g_h = qcorr::geometry::NeighborhoodGraph::over_range(n, edges);
  for (qcorr::sal::NodeId a = 0; a < next; ++a) {
    for (qcorr::sal::NodeId b = 0; b < next; ++b) {
      const double x = u(rng);
      inst.conf[{a, b}] = x < 0.3 ? 0.0 : x;  // a third are zero
    }
  }
  return inst;
}

/// Every (l1, l2) across a g_h edge with positive confidence, as sorted pairs.
inline std::set<std::pair<qcorr::sal::NodeId, qcorr::sal::NodeId>> brute_force_analogy(
    const SalInstance& inst) {
  std::set<std::pair<qcorr::sal::NodeId, qcorr::sal::NodeId>> want;
  for (const auto& e : inst.g_h.edges()) {
    for (auto l1 : inst.objects[e.u].constituents) {
      for (auto l2 : inst.objects[e.v].constituents) {
        if (inst.conf.at({l1, l2}) > 0.0) want.insert(std::minmax(l1, l2));
      }
    }
  }
  return want;
}

}  // namespace oracle
