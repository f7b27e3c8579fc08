#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "teamseg/types.hpp"

namespace teamseg {

struct ColorPalette {
  std::vector<std::array<double, 3>> centroids;  // N entries; unused slots hold zeros
  std::vector<std::int32_t> assignment;          // pixel -> centroid index
  int used = 0;                                  // number of nonempty clusters
};

struct QuantizeResult {
  DiscreteImage image;  // palette_size = N
  ColorPalette palette;
};

/// Hierarchical 2-means color quantization. The leaf with the largest
/// within-cluster SSE is split next until `num_colors` leaves exist or no
/// leaf has more than one distinct color.
QuantizeResult quantize_colors(const RgbImage& img, int num_colors, std::uint64_t seed);

/// Total within-cluster squared error of an assignment against its palette.
double within_cluster_sse(const RgbImage& img, const ColorPalette& palette);

/// JSON with keys N, used and centroids (the per-pixel assignment lives in
/// the quantized image).
std::string serialize_palette(const ColorPalette& palette);

}  // namespace teamseg
