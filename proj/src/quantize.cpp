#include "teamseg/quantize.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "teamseg/rng.hpp"

namespace teamseg {

namespace {

constexpr std::size_t kMaxInitCandidates = 4096;
constexpr int kMaxLloydIterations = 25;

using Color = std::array<double, 3>;

double dist2(const Color& a, const Color& b) {
  const double dr = a[0] - b[0], dg = a[1] - b[1], db = a[2] - b[2];
  return dr * dr + dg * dg + db * db;
}

struct DistinctColors {
  std::vector<Color> color;
  std::vector<double> weight;
  std::vector<std::int32_t> pixel_to_color;
};

DistinctColors collect_colors(const RgbImage& img) {
  DistinctColors out;
  std::unordered_map<std::uint32_t, std::int32_t> index;
  out.pixel_to_color.resize(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const auto& p = img.pixels[i];
    const std::uint32_t key = (std::uint32_t{p.r} << 16) | (std::uint32_t{p.g} << 8) | p.b;
    auto [it, inserted] = index.try_emplace(key, static_cast<std::int32_t>(out.color.size()));
    if (inserted) {
      out.color.push_back({double(p.r), double(p.g), double(p.b)});
      out.weight.push_back(0.0);
    }
    out.weight[it->second] += 1.0;
    out.pixel_to_color[i] = it->second;
  }
  return out;
}

struct Cluster {
  std::vector<std::int32_t> members;  // distinct-color indices, ascending
  Color centroid{0, 0, 0};
  double sse = 0.0;
};

void refresh(Cluster& c, const DistinctColors& colors) {
  Color sum{0, 0, 0};
  double total = 0.0;
  for (auto m : c.members) {
    for (int ch = 0; ch < 3; ++ch) sum[ch] += colors.weight[m] * colors.color[m][ch];
    total += colors.weight[m];
  }
  for (int ch = 0; ch < 3; ++ch) c.centroid[ch] = sum[ch] / total;
  c.sse = 0.0;
  for (auto m : c.members) c.sse += colors.weight[m] * dist2(colors.color[m], c.centroid);
}

std::pair<Cluster, Cluster> split(const Cluster& parent, const DistinctColors& colors, Rng& rng) {
  std::vector<std::int32_t> candidates = parent.members;
  if (candidates.size() > kMaxInitCandidates) {
    for (std::size_t i = 0; i < kMaxInitCandidates; ++i) {
      const std::size_t j = i + rng.below(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(kMaxInitCandidates);
    std::sort(candidates.begin(), candidates.end());
  }
  std::int32_t a = candidates[0], b = candidates[0];
  double best = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      const double d = dist2(colors.color[candidates[i]], colors.color[candidates[j]]);
      if (d > best) {
        best = d;
        a = candidates[i];
        b = candidates[j];
      }
    }
  }

  Color centers[2] = {colors.color[a], colors.color[b]};
  std::vector<std::uint8_t> side(parent.members.size(), 0);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = iter == 0;
    std::vector<std::uint8_t> next(side.size());
    for (std::size_t i = 0; i < parent.members.size(); ++i) {
      const auto& c = colors.color[parent.members[i]];
      next[i] = dist2(c, centers[1]) < dist2(c, centers[0]) ? 1 : 0;
      changed = changed || next[i] != side[i];
    }
    const auto ones = std::count(next.begin(), next.end(), std::uint8_t{1});
    if (ones == 0 || ones == static_cast<std::ptrdiff_t>(next.size())) break;
    side = std::move(next);
    if (!changed) break;
    double total[2] = {0, 0};
    Color sum[2] = {{0, 0, 0}, {0, 0, 0}};
    for (std::size_t i = 0; i < parent.members.size(); ++i) {
      const auto m = parent.members[i];
      total[side[i]] += colors.weight[m];
      for (int ch = 0; ch < 3; ++ch) sum[side[i]][ch] += colors.weight[m] * colors.color[m][ch];
    }
    for (int s = 0; s < 2; ++s) {
      for (int ch = 0; ch < 3; ++ch) centers[s][ch] = sum[s][ch] / total[s];
    }
  }

  Cluster first, second;
  for (std::size_t i = 0; i < parent.members.size(); ++i) {
    (side[i] ? second : first).members.push_back(parent.members[i]);
  }
  refresh(first, colors);
  refresh(second, colors);
  return {std::move(first), std::move(second)};
}

}  // namespace

QuantizeResult quantize_colors(const RgbImage& img, int num_colors, std::uint64_t seed) {
  require(num_colors >= 1, "number of colors must be at least 1");
  require(num_colors <= 65536, "number of colors must be at most 65536");
  img.validate();

  const auto colors = collect_colors(img);
  std::vector<Cluster> leaves(1);
  leaves[0].members.resize(colors.color.size());
  std::iota(leaves[0].members.begin(), leaves[0].members.end(), 0);
  refresh(leaves[0], colors);

  for (int split_no = 0; static_cast<int>(leaves.size()) < num_colors; ++split_no) {
    int target = -1;
    for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
      if (leaves[i].members.size() < 2) continue;
      if (target < 0 || leaves[i].sse > leaves[target].sse) target = i;
    }
    if (target < 0) break;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(split_no)));
    auto [first, second] = split(leaves[target], colors, rng);
    leaves[target] = std::move(first);
    leaves.push_back(std::move(second));
  }

  std::vector<std::int32_t> color_to_leaf(colors.color.size());
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    for (auto m : leaves[l].members) color_to_leaf[m] = static_cast<std::int32_t>(l);
  }

  QuantizeResult out;
  out.image = DiscreteImage(img.width, img.height, num_colors);
  out.palette.centroids.assign(num_colors, Color{0, 0, 0});
  out.palette.used = static_cast<int>(leaves.size());
  for (std::size_t l = 0; l < leaves.size(); ++l) out.palette.centroids[l] = leaves[l].centroid;
  out.palette.assignment.resize(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const auto leaf = color_to_leaf[colors.pixel_to_color[i]];
    out.palette.assignment[i] = leaf;
    out.image.pixels[i] = leaf;
  }
  return out;
}

double within_cluster_sse(const RgbImage& img, const ColorPalette& palette) {
  double sse = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const auto& p = img.pixels[i];
    sse += dist2({double(p.r), double(p.g), double(p.b)}, palette.centroids[palette.assignment[i]]);
  }
  return sse;
}

std::string serialize_palette(const ColorPalette& palette) {
  nlohmann::json j;
  j["N"] = palette.centroids.size();
  j["used"] = palette.used;
  j["centroids"] = palette.centroids;
  return j.dump(1);
}

}  // namespace teamseg
