#pragma once

#include <array>
#include <utility>
#include <vector>

#include "netcage/core/types.hpp"

namespace netcage::sim {

inline constexpr Index kRingNodes = 32;
inline constexpr Index kLayers = 10;
inline constexpr Index kNodeCount = kRingNodes * kLayers + 1;  // 321
inline constexpr Index kApex = kNodeCount - 1;                  // node 321, 0-based

/// 0-based node index of ring position `pos` (0..31) in `layer` (1..10).
constexpr Index node_index(Index layer, Index pos) { return (layer - 1) * kRingNodes + pos; }
/// 1..10 for ring nodes, 11 for the apex.
constexpr Index layer_of(Index node) { return node == kApex ? kLayers + 1 : node / kRingNodes + 1; }
constexpr Index position_of(Index node) { return node == kApex ? -1 : node % kRingNodes; }

struct GeometryParams {
  double diameter = 50.0;
  double cyl_depth = 18.0;
  double bottom_depth = 31.0;
  int cylinder_layers = 8;  // layers on the cylinder; the rest taper to the apex
};

struct CageTopology {
  Index node_count = kNodeCount;
  std::vector<std::pair<Index, Index>> edges;  // i < j
  Matrix adjacency;                            // N x N, 0/1
  Matrix rest_positions;                       // N x 3, z up, surface at 0

  std::vector<Index> degrees() const;
};

/// Rings of 32 plus the bottom node; rings are 32-cycles, each ring node
/// links to the node directly above it, and the apex links to all of layer 10.
CageTopology build_topology();

/// Rest coordinates: layers 1..cylinder_layers evenly spaced over the
/// cylinder depth at radius diameter/2, the remaining layers on a cone down
/// to the apex at z = -bottom_depth. Ring position p sits at azimuth p * 11.25 deg.
Matrix rest_geometry(const GeometryParams& g = {});

CageTopology build_topology(const GeometryParams& g);

/// Quadrilateral (and apex triangle) net panels as node index lists; the
/// triangle repeats its last index.
std::vector<std::array<Index, 4>> net_panels();

}  // namespace netcage::sim
