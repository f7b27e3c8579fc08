#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "teamseg/bench.hpp"
#include "teamseg/graphcut.hpp"
#include "teamseg/imgio.hpp"
#include "teamseg/metrics.hpp"
#include "teamseg/moments.hpp"
#include "teamseg/quantize.hpp"
#include "teamseg/synth.hpp"
#include "teamseg/team.hpp"

namespace fs = std::filesystem;
using namespace teamseg;

namespace {

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int resolve_slices(int requested, int palette_size) {
  if (requested <= 0) return (palette_size + 2) / 3;
  return requested;
}

struct QuantizeArgs {
  int colors = 16;
  std::uint64_t seed = 0;
  std::string in, out, palette;
};

void run_quantize(const QuantizeArgs& a) {
  const auto result = quantize_colors(load_pixmap(a.in), a.colors, a.seed);
  save_graymap(result.image, a.out);
  write_file(a.palette, serialize_palette(result.palette) + "\n");
}

struct MomentArgs {
  int r = 1;
  int slices = 0;
  std::string beta_mode = "ring";
  std::string in, out, gamma;
  std::uint64_t sample_pairs = 0, sample_triples = 0, seed = 0;
};

void run_estimate_moments(const MomentArgs& a) {
  const auto img = load_graymap(a.in);
  const int slices = resolve_slices(a.slices, img.palette_size);
  const auto mode = parse_beta_mode(a.beta_mode);
  MomentEstimates m;
  if (a.sample_pairs > 0 || a.sample_triples > 0) {
    if (a.sample_pairs == 0 || a.sample_triples == 0) {
      throw std::invalid_argument("--sample-pairs and --sample-triples must be given together");
    }
    SamplingOptions opts;
    opts.num_pairs = a.sample_pairs;
    opts.num_triples = a.sample_triples;
    opts.seed = a.seed;
    m = sample_moments(img, a.r, slices, mode, opts);
  } else {
    m = estimate_moments(img, a.r, slices, mode);
  }
  write_file(a.out, serialize_moments(m) + "\n");
  if (!a.gamma.empty()) write_file(a.gamma, encode_gamma_sidecar(m));
}

struct EstimateArgs {
  int k = 2, r = 1, slices = 0;
  std::string beta_mode = "ring";
  std::string in, out;
};

void run_estimate(const EstimateArgs& a) {
  const auto img = load_graymap(a.in);
  const auto m = estimate_moments(img, a.r, resolve_slices(a.slices, img.palette_size), parse_beta_mode(a.beta_mode));
  TeamDiagnostics diag;
  const auto models = team_estimate(m, a.k, {}, &diag);
  warn_all(diag.warnings);
  save_model_set(models, a.out);
}

struct SegmentArgs {
  int k = 2, r = 1, slices = 0;
  double lambda = 1.0;
  std::string beta_mode = "ring";
  std::string in, labels, models;
};

void run_segment(const SegmentArgs& a) {
  const auto img = load_graymap(a.in);
  TeamsegParams params;
  params.num_regions = a.k;
  params.distance = a.r;
  params.num_slices = resolve_slices(a.slices, img.palette_size);
  params.beta_mode = parse_beta_mode(a.beta_mode);
  params.energy.lambda = a.lambda;
  const auto res = run_teamseg(img, params);
  warn_all(res.warnings);
  save_label_map(res.segmentation, a.labels);
  write_file(fs::path(a.labels).replace_extension(".json"), serialize_segmentation(res.segmentation) + "\n");
  save_model_set(res.models, a.models);
}

struct SynthArgs {
  std::string mask = "two_region", process = "gmm";
  double sigma = 30.0;
  int L = 256, size = 300;
  std::uint64_t seed = 0;
  std::string out, gt;
};

void run_synth(const SynthArgs& a) {
  const auto mask = make_mask({parse_mask_kind(a.mask), a.size, a.size});
  const auto gen = parse_process(a.process) == Process::gmm ? gen_gmm(mask, a.L, a.sigma, a.seed)
                                                            : gen_rand(mask, a.L, a.seed);
  save_graymap(gen.image, a.out);
  save_label_map(mask, a.gt);
}

struct EvalArgs {
  std::string gt, gt_image, models, labels, out;
};

void run_eval(const EvalArgs& a) {
  const auto est_models = load_model_set(a.models);
  const int k = est_models.num_regions();
  const auto gt_seg = load_segmentation(a.gt, k);
  const auto est_seg = load_segmentation(a.labels, k);
  const auto img = load_graymap(a.gt_image);
  const auto report = evaluate(models_from_gt(img, gt_seg), est_models, gt_seg, est_seg);
  write_file(a.out, serialize_report(report) + "\n");
}

struct BenchArgs {
  std::string preset;
  int trials = 10;
  bool full = false;
  std::uint64_t seed = 0;
  std::string out;
};

void run_bench(const BenchArgs& a, bool trials_given) {
  const int trials = a.full && !trials_given ? 50 : a.trials;
  const fs::path dir = a.out;
  fs::create_directories(dir);
  if (a.preset == "rsweep") {
    RSweepConfig config;
    config.trials = trials;
    config.seed0 = a.seed;
    nlohmann::json manifest;
    manifest["preset"] = "rsweep";
    manifest["mask"] = to_string(config.mask);
    manifest["size"] = config.size;
    manifest["L"] = config.palette_size;
    manifest["period"] = config.period;
    manifest["r"] = config.distances;
    manifest["lambda"] = config.lambda;
    manifest["trials"] = config.trials;
    manifest["seed0"] = config.seed0;
    manifest["beta_mode"] = to_string(config.beta_mode);
    write_file(dir / "manifest.json", manifest.dump(1) + "\n");
    std::string csv = rsweep_csv_header() + "\n";
    for (const auto& row : r_sweep(config)) csv += rsweep_csv_row(row) + "\n";
    write_file(dir / "rsweep.csv", csv);
    return;
  }
  const auto grid = preset_grid(a.preset, trials, a.seed);
  run_grid(grid, dir, [](const CellResult& c) {
    std::cerr << to_string(c.mask) << " " << to_string(c.process.process) << " L=" << c.palette_size
              << " size=" << c.size << " slices=" << c.slices << " r=" << c.distance << ": D_B=" << c.db_theta_mean
              << " J=" << c.jac_mean << (c.error.empty() ? "" : " error: " + c.error) << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Appearance model estimation from co-occurrence moments and graph-cut segmentation"};
  app.require_subcommand(1);

  QuantizeArgs q;
  auto* qc = app.add_subcommand("quantize", "Hierarchical color quantization of a pixmap");
  qc->add_option("--colors", q.colors, "Palette size N")->required();
  qc->add_option("--seed", q.seed, "Seed for candidate subsampling");
  qc->add_option("in", q.in, "Input pixmap (P3/P6)")->required();
  qc->add_option("out", q.out, "Output graymap of palette indices")->required();
  qc->add_option("palette", q.palette, "Output palette JSON")->required();

  MomentArgs mo;
  auto* mc = app.add_subcommand("estimate-moments", "Estimate alpha, beta and gamma slices");
  mc->add_option("--r", mo.r, "Pixel distance (L1)");
  mc->add_option("--slices", mo.slices, "Number of gamma slices (0: ceil(L/3))");
  mc->add_option("--beta-mode", mo.beta_mode, "ring or axis");
  mc->add_option("--gamma", mo.gamma, "Write gamma slice counts to this binary sidecar");
  mc->add_option("--sample-pairs", mo.sample_pairs, "Sample this many pairs instead of enumerating");
  mc->add_option("--sample-triples", mo.sample_triples, "Sample this many triples instead of enumerating");
  mc->add_option("--seed", mo.seed, "Sampling seed");
  mc->add_option("in", mo.in, "Input graymap")->required();
  mc->add_option("out", mo.out, "Output moments JSON")->required();

  EstimateArgs e;
  auto* ec = app.add_subcommand("estimate", "Estimate K appearance models and proportions");
  ec->add_option("--k", e.k, "Number of regions")->required();
  ec->add_option("--r", e.r, "Pixel distance (L1)");
  ec->add_option("--slices", e.slices, "Number of gamma slices (0: ceil(L/3))");
  ec->add_option("--beta-mode", e.beta_mode, "ring or axis");
  ec->add_option("in", e.in, "Input graymap")->required();
  ec->add_option("out", e.out, "Output models JSON")->required();

  SegmentArgs s;
  auto* sc = app.add_subcommand("segment", "Estimate models, then segment with graph cuts");
  sc->add_option("--k", s.k, "Number of regions")->required();
  sc->add_option("--r", s.r, "Pixel distance (L1)");
  sc->add_option("--slices", s.slices, "Number of gamma slices (0: ceil(L/3))");
  sc->add_option("--lambda", s.lambda, "Boundary weight");
  sc->add_option("--beta-mode", s.beta_mode, "ring or axis");
  sc->add_option("in", s.in, "Input graymap")->required();
  sc->add_option("labels", s.labels, "Output label map (an exact .json copy is written alongside)")->required();
  sc->add_option("models", s.models, "Output models JSON")->required();

  SynthArgs y;
  auto* yc = app.add_subcommand("synth", "Generate a synthetic image and its ground-truth mask");
  yc->add_option("--mask", y.mask, "two_region, three_region, four_region or five_region");
  yc->add_option("--process", y.process, "gmm or rand");
  yc->add_option("--sigma", y.sigma, "GMM standard deviation");
  yc->add_option("--L", y.L, "Palette size");
  yc->add_option("--size", y.size, "Image side in pixels");
  yc->add_option("--seed", y.seed, "Seed");
  yc->add_option("out", y.out, "Output graymap")->required();
  yc->add_option("gt", y.gt, "Output ground-truth label map")->required();

  EvalArgs v;
  auto* vc = app.add_subcommand("eval", "Compare estimated models and labels with ground truth");
  vc->add_option("--gt", v.gt, "Ground-truth label map or segmentation JSON")->required();
  vc->add_option("--gt-image", v.gt_image, "Image the ground-truth models are measured on")->required();
  vc->add_option("--models", v.models, "Estimated models JSON")->required();
  vc->add_option("--labels", v.labels, "Estimated label map or segmentation JSON")->required();
  vc->add_option("report", v.out, "Output report JSON")->required();

  BenchArgs b;
  auto* bc = app.add_subcommand("bench", "Run a synthetic experiment grid");
  bc->add_option("--preset", b.preset, "table1, slices, noise, sizecolors or rsweep")
      ->required()
      ->check(CLI::IsMember({"table1", "slices", "noise", "sizecolors", "rsweep"}));
  auto* trials_opt = bc->add_option("--trials", b.trials, "Trials per cell");
  bc->add_flag("--full", b.full, "Use 50 trials per cell unless --trials is given");
  bc->add_option("--seed", b.seed, "Base seed");
  bc->add_option("--out", b.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*qc) run_quantize(q);
    if (*mc) run_estimate_moments(mo);
    if (*ec) run_estimate(e);
    if (*sc) run_segment(s);
    if (*yc) run_synth(y);
    if (*vc) run_eval(v);
    if (*bc) run_bench(b, trials_opt->count() > 0);
  } catch (const RankDeficientError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
