#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "teamseg/moments.hpp"
#include "teamseg/synth.hpp"

namespace teamseg {

struct ProcessConfig {
  Process process = Process::gmm;
  double sigma = 30.0;  // ignored for rand
};

struct ExperimentGrid {
  std::vector<MaskKind> masks;
  std::vector<ProcessConfig> processes;
  std::vector<int> sizes;
  std::vector<int> palette_sizes;
  std::vector<int> slice_counts;  // 0 means ceil(L / 3)
  std::vector<int> distances;
  double lambda = 1.0;
  int trials = 10;
  std::uint64_t seed0 = 0;
  BetaMode beta_mode = BetaMode::ring;

  void validate() const;
};

struct CellResult {
  MaskKind mask = MaskKind::two_region;
  ProcessConfig process;
  int palette_size = 0;
  int size = 0;
  int distance = 1;
  int slices = 0;
  double lambda = 1.0;
  int trials = 0;
  double db_theta_mean = 0, db_theta_std = 0;
  double db_w_mean = 0;
  double jac_mean = 0, jac_std = 0;
  double t_est_s = 0, t_seg_s = 0;
  std::string error;
};

/// Header row of the results CSV.
std::string results_csv_header();
std::string results_csv_row(const CellResult& cell);

/// Runs every cell of the grid: trial t of a cell uses seed seed0 + t for
/// image generation, so cells that differ only in estimator settings see
/// the same images. Cells are evaluated in a fixed nested order (mask,
/// process, size, L, slices, r). If `out_dir` is given, results.csv is
/// rewritten after each cell and manifest.json records the grid.
std::vector<CellResult> run_grid(const ExperimentGrid& grid,
                                 const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                                 const std::function<void(const CellResult&)>& on_cell = {});

/// Named grids mirroring the synthetic experiments.
ExperimentGrid preset_grid(const std::string& name, int trials, std::uint64_t seed0);
std::vector<std::string> preset_names();

struct RSweepConfig {
  MaskKind mask = MaskKind::two_region;
  int size = 200;
  int palette_size = 32;
  int period = 6;  // tile period of the correlated generator; 1 gives IID images
  std::vector<int> distances{1, 8, 13, 18};
  double lambda = 1.0;
  int trials = 10;
  std::uint64_t seed0 = 0;
  BetaMode beta_mode = BetaMode::axis;
};

struct RSweepRow {
  int period = 0;
  int distance = 1;
  int trials = 0;
  double jac_mean = 0, jac_std = 0;
  double db_theta_mean = 0;
  std::string error;
};

/// Mean matched Jaccard per distance r on tiled RAND images.
std::vector<RSweepRow> r_sweep(const RSweepConfig& config);
std::string rsweep_csv_header();
std::string rsweep_csv_row(const RSweepRow& row);

std::string grid_manifest(const ExperimentGrid& grid);

}  // namespace teamseg
