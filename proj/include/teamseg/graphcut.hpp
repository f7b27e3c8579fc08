#pragma once

#include <vector>

#include "teamseg/moments.hpp"
#include "teamseg/team.hpp"
#include "teamseg/types.hpp"

namespace teamseg {

struct EnergyParams {
  double lambda = 1.0;
  double eps_prob = 1e-12;

  void validate() const;
};

/// Per-pixel data costs, stored pixel-major: cost(pixel, k) at
/// costs[pixel * K + k].
struct UnaryCosts {
  int width = 0;
  int height = 0;
  int num_labels = 0;
  std::vector<double> costs;

  std::size_t num_pixels() const { return static_cast<std::size_t>(width) * height; }
  double operator()(std::size_t pixel, int label) const { return costs[pixel * num_labels + label]; }
  double& operator()(std::size_t pixel, int label) { return costs[pixel * num_labels + label]; }

  void validate() const;
};

/// cost(x, k) = -ln(max(theta_k(I(x)), eps_prob)).
UnaryCosts unary_costs(const DiscreteImage& img, const ModelSet& models, double eps_prob = 1e-12);

/// Data term plus lambda times the number of 4-neighbor pairs with
/// different labels.
double energy(const Segmentation& seg, const UnaryCosts& costs, double lambda);

/// Pixel-wise argmin labeling; ties go to the lowest label.
Segmentation argmin_labeling(const UnaryCosts& costs);

/// Global minimizer of the energy for two labels via one s-t cut.
Segmentation min_cut_binary(const UnaryCosts& costs, double lambda);

struct SwapOptions {
  int max_cycles = 20;
  double min_decrease = 1e-9;
};

struct SwapTrace {
  std::vector<double> energies;  // initial energy, then one entry per accepted move
  int cycles = 0;
};

/// Runs one alpha-beta swap move on labels a and b; returns the candidate
/// labeling (not yet accepted).
Segmentation swap_move(const Segmentation& seg, const UnaryCosts& costs, double lambda, int a, int b);

/// Iterated alpha-beta swaps over all label pairs in ascending order.
Segmentation ab_swap(const UnaryCosts& costs, double lambda, const Segmentation& init,
                     const SwapOptions& options = {}, SwapTrace* trace = nullptr);

struct TeamsegParams {
  int num_regions = 2;
  int distance = 1;
  int num_slices = 1;
  BetaMode beta_mode = BetaMode::ring;
  EnergyParams energy{};
  TeamOptions team{};
  SwapOptions swap{};
};

struct TeamsegResult {
  ModelSet models;
  Segmentation segmentation;
  double estimation_seconds = 0.0;
  double segmentation_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Moment estimation, model recovery, then an energy-minimizing labeling.
TeamsegResult run_teamseg(const DiscreteImage& img, const TeamsegParams& params);

}  // namespace teamseg
