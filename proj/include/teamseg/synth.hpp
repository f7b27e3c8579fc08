#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "teamseg/types.hpp"

namespace teamseg {

/// Ground-truth mask families with 2..5 regions of non-uniform size.
enum class MaskKind { two_region, three_region, four_region, five_region };

std::string to_string(MaskKind kind);
MaskKind parse_mask_kind(const std::string& text);
int region_count(MaskKind kind);

struct MaskSpec {
  MaskKind kind = MaskKind::two_region;
  int width = 300;
  int height = 300;
};

/// Builds the mask by painting, in order, with m = min(width, height) and
/// (x, y) the pixel center in pixel units:
///   0 background
///   1 disk of radius 0.30 m centered at (0.40 W, 0.45 H)
///   2 annulus 0.34 m .. 0.42 m around the same center, minus the wedge
///     |dy| < dx / 2 opening to the right (a C-shaped arm)
///   3 serpentine band: pixels within 0.02 m (Euclidean) of the centerline
///     x = 0.86 W + 0.09 W s(y / 0.22 H), where s is a piecewise-parabolic
///     wave with period 1 and amplitude 1
///   4 square of side 0.31 m with its lower-left corner at (0.04 W, 0.96 H),
///     plus three spikes of thickness 0.01 m (at least one pixel) running
///     right from the square to 0.62 W
/// Kinds with fewer regions stop painting early.
Segmentation make_mask(const MaskSpec& spec);

enum class Process { gmm, rand };

std::string to_string(Process process);
Process parse_process(const std::string& text);

struct GeneratedImage {
  DiscreteImage image;
  Eigen::MatrixXd models;  // L x K generating distributions
};

/// Region means placed at round(1 + k (L - 1) / (K - 1)), k = 0..K-1.
std::vector<int> gmm_means(int num_regions, int palette_size);

/// Region k gets means[order[k]]: the outermost means go to the lowest labels,
/// alternating ends (0, K-1, 1, K-2, ...). The background of every mask
/// sits at a truncated end of the palette.
std::vector<int> gmm_mean_order(int num_regions);

/// Distribution of round(X) - 1 for X ~ N(mean, sigma^2) truncated to [1, L].
Eigen::VectorXd truncated_normal_bins(double mean, double sigma, int palette_size);

/// Pixels drawn independently from the truncated normal of their region,
/// with means assigned through gmm_mean_order.
GeneratedImage gen_gmm(const Segmentation& mask, int palette_size, double sigma, std::uint64_t seed);

/// Region models drawn from a flat Dirichlet over L bins; pixels IID within
/// regions.
GeneratedImage gen_rand(const Segmentation& mask, int palette_size, std::uint64_t seed);

/// Like gen_rand, but each region's process is constant on period x period
/// tiles (with a random phase per region), so pixels closer than `period`
/// along an axis are dependent while pixels `period` apart are independent.
/// Per-pixel marginals are unchanged.
GeneratedImage gen_rand_tiled(const Segmentation& mask, int palette_size, int period, std::uint64_t seed);

/// Normalized per-region histograms and region proportions of a labeled
/// image.
ModelSet models_from_gt(const DiscreteImage& img, const Segmentation& mask);

}  // namespace teamseg
