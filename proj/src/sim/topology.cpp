#include "netcage/sim/topology.hpp"

#include <cmath>

#include "netcage/core/angles.hpp"
#include "netcage/core/error.hpp"

namespace netcage::sim {

std::vector<Index> CageTopology::degrees() const {
  std::vector<Index> deg(static_cast<std::size_t>(node_count), 0);
  for (const auto& [i, j] : edges) {
    ++deg[static_cast<std::size_t>(i)];
    ++deg[static_cast<std::size_t>(j)];
  }
  return deg;
}

CageTopology build_topology() {
  CageTopology t;
  auto link = [&](Index a, Index b) { t.edges.emplace_back(std::min(a, b), std::max(a, b)); };
  for (Index l = 1; l <= kLayers; ++l)
    for (Index p = 0; p < kRingNodes; ++p) link(node_index(l, p), node_index(l, (p + 1) % kRingNodes));
  for (Index l = 2; l <= kLayers; ++l)
    for (Index p = 0; p < kRingNodes; ++p) link(node_index(l, p), node_index(l - 1, p));
  for (Index p = 0; p < kRingNodes; ++p) link(node_index(kLayers, p), kApex);

  t.adjacency = Matrix::Zero(kNodeCount, kNodeCount);
  for (const auto& [i, j] : t.edges) t.adjacency(i, j) = t.adjacency(j, i) = 1.0;
  t.rest_positions = rest_geometry();
  return t;
}

CageTopology build_topology(const GeometryParams& g) {
  CageTopology t = build_topology();
  t.rest_positions = rest_geometry(g);
  return t;
}

Matrix rest_geometry(const GeometryParams& g) {
  if (!(g.diameter > 0 && g.cyl_depth > 0 && g.bottom_depth > g.cyl_depth))
    raise(ErrorCode::InvalidGeometry, "need diameter > 0, cylinder depth > 0 and bottom depth > cylinder depth");
  if (g.cylinder_layers < 2 || g.cylinder_layers > kLayers)
    raise(ErrorCode::InvalidGeometry, "cylinder layer count must lie in [2, 10]");

  const double R = 0.5 * g.diameter;
  const Index nc = g.cylinder_layers;
  const Index cone = kLayers - nc;  // rings strictly between cylinder bottom and apex
  Matrix P(kNodeCount, 3);
  for (Index l = 1; l <= kLayers; ++l) {
    double r, z;
    if (l <= nc) {
      r = R;
      z = -g.cyl_depth * static_cast<double>(l - 1) / static_cast<double>(nc - 1);
    } else {
      const double s = static_cast<double>(l - nc) / static_cast<double>(cone + 1);
      r = R * (1.0 - s);
      z = -(g.cyl_depth + s * (g.bottom_depth - g.cyl_depth));
    }
    for (Index p = 0; p < kRingNodes; ++p) {
      const double a = deg2rad(360.0 * static_cast<double>(p) / static_cast<double>(kRingNodes));
      P.row(node_index(l, p)) << r * std::cos(a), r * std::sin(a), z;
    }
  }
  P.row(kApex) << 0.0, 0.0, -g.bottom_depth;
  return P;
}

std::vector<std::array<Index, 4>> net_panels() {
  std::vector<std::array<Index, 4>> panels;
  for (Index l = 1; l < kLayers; ++l)
    for (Index p = 0; p < kRingNodes; ++p) {
      const Index q = (p + 1) % kRingNodes;
      panels.push_back({node_index(l, p), node_index(l, q), node_index(l + 1, q), node_index(l + 1, p)});
    }
  for (Index p = 0; p < kRingNodes; ++p)
    panels.push_back({node_index(kLayers, p), node_index(kLayers, (p + 1) % kRingNodes), kApex, kApex});
  return panels;
}

}  // namespace netcage::sim
