#include "teamseg/bench.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "teamseg/graphcut.hpp"
#include "teamseg/imgio.hpp"
#include "teamseg/metrics.hpp"

namespace teamseg {

namespace {

struct Stats {
  double mean = 0, std = 0;
};

Stats stats(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return s;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

GeneratedImage generate(const Segmentation& mask, const ProcessConfig& process, int palette_size,
                        std::uint64_t seed) {
  return process.process == Process::gmm ? gen_gmm(mask, palette_size, process.sigma, seed)
                                         : gen_rand(mask, palette_size, seed);
}

int resolve_slices(int requested, int palette_size) {
  return requested > 0 ? std::min(requested, palette_size) : (palette_size + 2) / 3;
}

std::string csv_escape(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void ExperimentGrid::validate() const {
  require(trials >= 1, "trials must be at least 1");
  require(!masks.empty() && !processes.empty() && !sizes.empty() && !palette_sizes.empty() &&
              !slice_counts.empty() && !distances.empty(),
          "every grid axis needs at least one value");
  require(lambda >= 0, "lambda must be nonnegative");
}

std::string results_csv_header() {
  return "mask,process,sigma,L,size,r,slices,lambda,trials,db_theta_mean,db_theta_std,db_w_mean,"
         "jac_mean,jac_std,t_est_s,t_seg_s,error";
}

std::string results_csv_row(const CellResult& c) {
  const std::string sigma = c.process.process == Process::gmm ? num(c.process.sigma) : "";
  return to_string(c.mask) + "," + to_string(c.process.process) + "," + sigma + "," + std::to_string(c.palette_size) +
         "," + std::to_string(c.size) + "," + std::to_string(c.distance) + "," + std::to_string(c.slices) + "," +
         num(c.lambda) + "," + std::to_string(c.trials) + "," + num(c.db_theta_mean) + "," + num(c.db_theta_std) +
         "," + num(c.db_w_mean) + "," + num(c.jac_mean) + "," + num(c.jac_std) + "," + num(c.t_est_s) + "," +
         num(c.t_seg_s) + "," + (c.error.empty() ? "" : csv_escape(c.error));
}

std::string grid_manifest(const ExperimentGrid& grid) {
  nlohmann::json j;
  std::vector<std::string> masks;
  for (auto m : grid.masks) masks.push_back(to_string(m));
  j["masks"] = masks;
  nlohmann::json processes = nlohmann::json::array();
  for (const auto& p : grid.processes) {
    nlohmann::json e;
    e["process"] = to_string(p.process);
    if (p.process == Process::gmm) e["sigma"] = p.sigma;
    processes.push_back(e);
  }
  j["processes"] = processes;
  j["sizes"] = grid.sizes;
  j["L"] = grid.palette_sizes;
  j["slices"] = grid.slice_counts;
  j["r"] = grid.distances;
  j["lambda"] = grid.lambda;
  j["trials"] = grid.trials;
  j["seed0"] = grid.seed0;
  j["beta_mode"] = to_string(grid.beta_mode);
  return j.dump(1);
}

std::vector<CellResult> run_grid(const ExperimentGrid& grid, const std::optional<std::filesystem::path>& out_dir,
                                 const std::function<void(const CellResult&)>& on_cell) {
  grid.validate();
  std::vector<CellResult> results;
  std::string csv = results_csv_header() + "\n";
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_file(*out_dir / "manifest.json", grid_manifest(grid) + "\n");
  }

  for (auto mask_kind : grid.masks) {
    for (const auto& process : grid.processes) {
      for (int size : grid.sizes) {
        const auto mask = make_mask({mask_kind, size, size});
        for (int L : grid.palette_sizes) {
          for (int requested_slices : grid.slice_counts) {
            for (int r : grid.distances) {
              CellResult cell;
              cell.mask = mask_kind;
              cell.process = process;
              cell.palette_size = L;
              cell.size = size;
              cell.distance = r;
              cell.slices = resolve_slices(requested_slices, L);
              cell.lambda = grid.lambda;
              cell.trials = grid.trials;
              std::vector<double> db, dbw, jac, t_est, t_seg;
              try {
                for (int t = 0; t < grid.trials; ++t) {
                  const auto gen = generate(mask, process, L, grid.seed0 + static_cast<std::uint64_t>(t));
                  TeamsegParams params;
                  params.num_regions = mask.num_regions;
                  params.distance = r;
                  params.num_slices = cell.slices;
                  params.beta_mode = grid.beta_mode;
                  params.energy.lambda = grid.lambda;
                  const auto res = run_teamseg(gen.image, params);
                  const auto report = evaluate(models_from_gt(gen.image, mask), res.models, mask, res.segmentation);
                  db.push_back(report.d_b_models);
                  dbw.push_back(report.d_b_weights);
                  jac.push_back(report.mean_jaccard);
                  t_est.push_back(res.estimation_seconds);
                  t_seg.push_back(res.segmentation_seconds);
                }
                const auto s_db = stats(db), s_jac = stats(jac);
                cell.db_theta_mean = s_db.mean;
                cell.db_theta_std = s_db.std;
                cell.db_w_mean = stats(dbw).mean;
                cell.jac_mean = s_jac.mean;
                cell.jac_std = s_jac.std;
                cell.t_est_s = stats(t_est).mean;
                cell.t_seg_s = stats(t_seg).mean;
              } catch (const std::exception& e) {
                cell.error = e.what();
              }
              results.push_back(cell);
              csv += results_csv_row(cell) + "\n";
              if (out_dir) write_file(*out_dir / "results.csv", csv);
              if (on_cell) on_cell(cell);
            }
          }
        }
      }
    }
  }
  return results;
}

std::vector<std::string> preset_names() { return {"table1", "slices", "noise", "sizecolors", "rsweep"}; }

ExperimentGrid preset_grid(const std::string& name, int trials, std::uint64_t seed0) {
  ExperimentGrid g;
  g.trials = trials;
  g.seed0 = seed0;
  g.lambda = 1.0;
  g.distances = {1};
  g.sizes = {300};
  g.palette_sizes = {256};
  g.slice_counts = {0};
  const std::vector<MaskKind> all_masks = {MaskKind::two_region, MaskKind::three_region, MaskKind::four_region,
                                           MaskKind::five_region};
  if (name == "table1") {
    g.masks = all_masks;
    g.processes = {{Process::gmm, 30.0}, {Process::rand, 0.0}};
  } else if (name == "slices") {
    g.masks = {MaskKind::five_region};
    g.processes = {{Process::gmm, 30.0}};
    g.slice_counts = {8, 16, 32, 64, 86, 128, 160, 200, 256};
  } else if (name == "noise") {
    g.masks = {MaskKind::five_region};
    g.processes = {};
    for (double sigma : {15.0, 30.0, 45.0, 60.0, 75.0, 90.0, 105.0, 120.0}) g.processes.push_back({Process::gmm, sigma});
  } else if (name == "sizecolors") {
    g.masks = {MaskKind::five_region};
    g.processes = {{Process::gmm, 30.0}};
    g.sizes = {50, 100, 200, 300, 400, 500};
    g.palette_sizes = {100, 200, 400, 800, 1200};
  } else {
    throw std::invalid_argument("unknown grid preset '" + name + "'");
  }
  return g;
}

std::vector<RSweepRow> r_sweep(const RSweepConfig& config) {
  require(config.trials >= 1, "trials must be at least 1");
  require(config.period >= 1, "tile period must be positive");
  for (int r : config.distances) {
    require(r >= 1 && 2 * r <= config.size, "r must lie in [1, size / 2]");
  }
  const auto mask = make_mask({config.mask, config.size, config.size});
  std::vector<GeneratedImage> images;
  for (int t = 0; t < config.trials; ++t) {
    images.push_back(gen_rand_tiled(mask, config.palette_size, config.period, config.seed0 + static_cast<std::uint64_t>(t)));
  }
  std::vector<RSweepRow> rows;
  for (int r : config.distances) {
    RSweepRow row;
    row.period = config.period;
    row.distance = r;
    row.trials = config.trials;
    std::vector<double> jac, db;
    try {
      for (const auto& gen : images) {
        TeamsegParams params;
        params.num_regions = mask.num_regions;
        params.distance = r;
        params.num_slices = config.palette_size;
        params.beta_mode = config.beta_mode;
        params.energy.lambda = config.lambda;
        const auto res = run_teamseg(gen.image, params);
        const auto report = evaluate(models_from_gt(gen.image, mask), res.models, mask, res.segmentation);
        jac.push_back(report.mean_jaccard);
        db.push_back(report.d_b_models);
      }
      const auto s = stats(jac);
      row.jac_mean = s.mean;
      row.jac_std = s.std;
      row.db_theta_mean = stats(db).mean;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string rsweep_csv_header() { return "period,r,trials,jac_mean,jac_std,db_theta_mean,error"; }

std::string rsweep_csv_row(const RSweepRow& row) {
  return std::to_string(row.period) + "," + std::to_string(row.distance) + "," + std::to_string(row.trials) + "," +
         num(row.jac_mean) + "," + num(row.jac_std) + "," + num(row.db_theta_mean) + "," +
         (row.error.empty() ? "" : csv_escape(row.error));
}

}  // namespace teamseg
