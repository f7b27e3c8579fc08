#include "teamseg/synth.hpp"

#include <algorithm>
#include <cmath>

#include "teamseg/rng.hpp"

namespace teamseg {

namespace {

constexpr double kBandCenter = 0.86;
constexpr double kBandAmplitude = 0.09;
constexpr double kBandPeriod = 0.22;
constexpr double kSpikeEnd = 0.62;

// Periodic wave with period 1, peak +1 at t = 0.25 and -1 at t = 0.75.
double wave(double t) {
  const double u = t - std::floor(t);
  if (u < 0.5) return 16.0 * u * (0.5 - u);
  const double v = u - 0.5;
  return -16.0 * v * (0.5 - v);
}

int sample_bin(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), cumulative.size() - 1));
}

std::vector<std::vector<double>> cumulative_tables(const Eigen::MatrixXd& models) {
  std::vector<std::vector<double>> out(models.cols());
  for (Eigen::Index k = 0; k < models.cols(); ++k) {
    double acc = 0.0;
    out[k].resize(models.rows());
    for (Eigen::Index i = 0; i < models.rows(); ++i) {
      acc += models(i, k);
      out[k][i] = acc;
    }
  }
  return out;
}

Eigen::MatrixXd dirichlet_models(int palette_size, int k, Rng& rng) {
  Eigen::MatrixXd models(palette_size, k);
  for (int s = 0; s < k; ++s) {
    for (int i = 0; i < palette_size; ++i) models(i, s) = -std::log(rng.uniform_open0());
    models.col(s) /= models.col(s).sum();
  }
  return models;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// P(lo <= Z <= hi) for standard normal Z, evaluated on the tail that keeps
// the subtraction well conditioned.
double normal_mass(double lo, double hi) {
  if (lo > 0) return normal_sf(lo) - normal_sf(hi);
  return normal_cdf(hi) - normal_cdf(lo);
}

void check_mask(const Segmentation& mask) {
  mask.validate();
}

}  // namespace

std::string to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::two_region: return "two_region";
    case MaskKind::three_region: return "three_region";
    case MaskKind::four_region: return "four_region";
    case MaskKind::five_region: return "five_region";
  }
  return "unknown";
}

MaskKind parse_mask_kind(const std::string& text) {
  for (auto kind : {MaskKind::two_region, MaskKind::three_region, MaskKind::four_region, MaskKind::five_region}) {
    if (text == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown mask kind '" + text + "'");
}

int region_count(MaskKind kind) { return static_cast<int>(kind) + 2; }

std::string to_string(Process process) { return process == Process::gmm ? "gmm" : "rand"; }

Process parse_process(const std::string& text) {
  if (text == "gmm") return Process::gmm;
  if (text == "rand") return Process::rand;
  throw std::invalid_argument("process must be 'gmm' or 'rand', got '" + text + "'");
}

Segmentation make_mask(const MaskSpec& spec) {
  require(spec.width >= 50 && spec.height >= 50, "masks need width and height of at least 50 pixels");
  const int k = region_count(spec.kind);
  const double W = spec.width, H = spec.height;
  const double m = std::min(W, H);
  const double cx = 0.40 * W, cy = 0.45 * H;
  const double disk_r2 = (0.30 * m) * (0.30 * m);
  const double ring_in2 = (0.34 * m) * (0.34 * m);
  const double ring_out2 = (0.42 * m) * (0.42 * m);
  const double band_half = 0.02 * m;
  const double spike_half = std::max(0.5, 0.005 * m);
  const double sq_x0 = 0.04 * W, sq_x1 = sq_x0 + 0.31 * m, sq_y1 = 0.96 * H, sq_y0 = sq_y1 - 0.31 * m;
  const double spike_rows[3] = {sq_y0 + 0.2 * (sq_y1 - sq_y0), sq_y0 + 0.5 * (sq_y1 - sq_y0),
                                sq_y0 + 0.8 * (sq_y1 - sq_y0)};

  // Band centerline sampled every 1/8 pixel; a pixel is inside when some
  // sample lies within band_half of its center.
  constexpr int kSteps = 8;
  std::vector<double> curve(static_cast<std::size_t>(spec.height) * kSteps + 1);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double y = static_cast<double>(i) / kSteps;
    curve[i] = kBandCenter * W + kBandAmplitude * W * wave(y / (kBandPeriod * H));
  }
  auto in_band = [&](double x, double y) {
    const auto lo = static_cast<long>(std::ceil((y - band_half) * kSteps));
    const auto hi = static_cast<long>(std::floor((y + band_half) * kSteps));
    for (long i = std::max(lo, 0L); i <= std::min(hi, static_cast<long>(curve.size()) - 1); ++i) {
      const double ddx = x - curve[i], ddy = y - static_cast<double>(i) / kSteps;
      if (ddx * ddx + ddy * ddy <= band_half * band_half) return true;
    }
    return false;
  };

  Segmentation seg(spec.width, spec.height, k);
  for (int row = 0; row < spec.height; ++row) {
    const double y = row + 0.5;
    for (int col = 0; col < spec.width; ++col) {
      const double x = col + 0.5;
      const double dx = x - cx, dy = y - cy;
      const double d2 = dx * dx + dy * dy;
      int label = 0;
      if (d2 <= disk_r2) label = 1;
      if (k >= 3 && d2 >= ring_in2 && d2 <= ring_out2 && !(dx > 0 && std::abs(dy) < 0.5 * dx)) label = 2;
      if (k >= 4 && in_band(x, y)) label = 3;
      if (k >= 5) {
        const bool in_square = x >= sq_x0 && x < sq_x1 && y >= sq_y0 && y < sq_y1;
        bool in_spike = false;
        if (x >= sq_x1 && x < kSpikeEnd * W) {
          for (double sr : spike_rows) in_spike = in_spike || std::abs(y - sr) <= spike_half;
        }
        if (in_square || in_spike) label = 4;
      }
      seg.at(row, col) = label;
    }
  }
  return seg;
}

std::vector<int> gmm_means(int num_regions, int palette_size) {
  require(num_regions >= 1, "need at least one region");
  require(palette_size >= num_regions, "palette size must be at least the region count");
  if (num_regions == 1) return {(1 + palette_size + 1) / 2};
  std::vector<int> means(num_regions);
  const long span = palette_size - 1;
  const long gaps = num_regions - 1;
  for (long k = 0; k < num_regions; ++k) {
    means[k] = static_cast<int>(1 + (2 * k * span + gaps) / (2 * gaps));
  }
  return means;
}

std::vector<int> gmm_mean_order(int num_regions) {
  require(num_regions >= 1, "need at least one region");
  std::vector<int> order;
  for (int lo = 0, hi = num_regions - 1; lo <= hi; ++lo, --hi) {
    order.push_back(lo);
    if (hi != lo) order.push_back(hi);
  }
  return order;
}

Eigen::VectorXd truncated_normal_bins(double mean, double sigma, int palette_size) {
  require(sigma > 0, "sigma must be positive");
  require(palette_size >= 1, "palette size must be positive");
  Eigen::VectorXd bins(palette_size);
  for (int v = 1; v <= palette_size; ++v) {
    const double lo = std::max(v - 0.5, 1.0);
    const double hi = std::min(v + 0.5, static_cast<double>(palette_size));
    bins[v - 1] = hi > lo ? normal_mass((lo - mean) / sigma, (hi - mean) / sigma) : 0.0;
  }
  const double total = bins.sum();
  if (!(total > 0)) {
    // Support lies so far in a tail that every bin underflows: all mass goes
    // to the value closest to the mean.
    bins.setZero();
    const int nearest = static_cast<int>(std::clamp(std::round(mean), 1.0, double(palette_size)));
    bins[nearest - 1] = 1.0;
    return bins;
  }
  return bins / total;
}

GeneratedImage gen_gmm(const Segmentation& mask, int palette_size, double sigma, std::uint64_t seed) {
  check_mask(mask);
  require(sigma > 0, "sigma must be positive");
  const int k = mask.num_regions;
  const auto means = gmm_means(k, palette_size);
  const auto order = gmm_mean_order(k);
  GeneratedImage out;
  out.models.resize(palette_size, k);
  for (int s = 0; s < k; ++s) out.models.col(s) = truncated_normal_bins(means[order[s]], sigma, palette_size);
  const auto tables = cumulative_tables(out.models);
  Rng rng(seed);
  out.image = DiscreteImage(mask.width, mask.height, palette_size);
  for (std::size_t i = 0; i < mask.size(); ++i) out.image.pixels[i] = sample_bin(tables[mask.labels[i]], rng);
  return out;
}

GeneratedImage gen_rand(const Segmentation& mask, int palette_size, std::uint64_t seed) {
  check_mask(mask);
  require(palette_size >= 2, "RAND images need L >= 2");
  Rng rng(seed);
  GeneratedImage out;
  out.models = dirichlet_models(palette_size, mask.num_regions, rng);
  const auto tables = cumulative_tables(out.models);
  out.image = DiscreteImage(mask.width, mask.height, palette_size);
  for (std::size_t i = 0; i < mask.size(); ++i) out.image.pixels[i] = sample_bin(tables[mask.labels[i]], rng);
  return out;
}

GeneratedImage gen_rand_tiled(const Segmentation& mask, int palette_size, int period, std::uint64_t seed) {
  check_mask(mask);
  require(palette_size >= 2, "RAND images need L >= 2");
  require(period >= 1, "tile period must be positive");
  Rng rng(seed);
  GeneratedImage out;
  const int k = mask.num_regions;
  out.models = dirichlet_models(palette_size, k, rng);
  const auto tables = cumulative_tables(out.models);

  const int tiles_x = mask.width / period + 2;
  const int tiles_y = mask.height / period + 2;
  std::vector<int> phase_x(k), phase_y(k);
  std::vector<std::vector<std::int32_t>> tile_value(k);
  for (int s = 0; s < k; ++s) {
    phase_x[s] = static_cast<int>(rng.below(period));
    phase_y[s] = static_cast<int>(rng.below(period));
    tile_value[s].resize(static_cast<std::size_t>(tiles_x) * tiles_y);
    for (auto& v : tile_value[s]) v = sample_bin(tables[s], rng);
  }
  out.image = DiscreteImage(mask.width, mask.height, palette_size);
  for (int row = 0; row < mask.height; ++row) {
    for (int col = 0; col < mask.width; ++col) {
      const int s = mask.at(row, col);
      const int ty = (row + phase_y[s]) / period;
      const int tx = (col + phase_x[s]) / period;
      out.image.at(row, col) = tile_value[s][static_cast<std::size_t>(ty) * tiles_x + tx];
    }
  }
  return out;
}

ModelSet models_from_gt(const DiscreteImage& img, const Segmentation& mask) {
  img.validate();
  mask.validate();
  require(img.width == mask.width && img.height == mask.height, "image and mask differ in size");
  const int k = mask.num_regions;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(img.palette_size, k);
  Eigen::VectorXd sizes = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < img.size(); ++i) {
    counts(img.pixels[i], mask.labels[i]) += 1.0;
    sizes[mask.labels[i]] += 1.0;
  }
  for (int s = 0; s < k; ++s) {
    require(sizes[s] > 0, "region " + std::to_string(s) + " of the mask is empty");
  }
  ModelSet out;
  out.theta = counts * sizes.cwiseInverse().asDiagonal();
  out.w = sizes / static_cast<double>(img.size());
  return out;
}

}  // namespace teamseg
