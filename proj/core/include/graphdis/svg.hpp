#pragma once

#include <string>
#include <vector>

#include "graphdis/canonical.hpp"

namespace graphdis {

struct HeatmapCell {
  EncodedSample sample;
  std::string label;
};

// Grid of adjacency heatmaps in canonical slot order. Entry (i, j) is shaded
// by adj[i][j] * mask[i] * mask[j].
std::string adjacency_contact_sheet(const std::vector<std::vector<HeatmapCell>>& grid,
                                    int cell_pixels = 96);

}  // namespace graphdis
