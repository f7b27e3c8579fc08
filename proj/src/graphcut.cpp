#include "teamseg/graphcut.hpp"

#include <chrono>
#include <cmath>

#include "teamseg/maxflow.hpp"

namespace teamseg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_match(const Segmentation& seg, const UnaryCosts& costs) {
  require(seg.width == costs.width && seg.height == costs.height, "segmentation and costs differ in size");
  require(seg.num_regions == costs.num_labels, "segmentation and costs differ in label count");
}

}  // namespace

void EnergyParams::validate() const {
  require(lambda >= 0 && std::isfinite(lambda), "lambda must be a nonnegative real");
  require(eps_prob > 0 && eps_prob < 1, "eps_prob must lie in (0, 1)");
}

void UnaryCosts::validate() const {
  require(width > 0 && height > 0 && num_labels > 0, "unary costs need positive dimensions");
  require(costs.size() == num_pixels() * num_labels, "unary cost array has the wrong size");
}

UnaryCosts unary_costs(const DiscreteImage& img, const ModelSet& models, double eps_prob) {
  img.validate();
  require(models.num_colors() == img.palette_size, "model palette size does not match the image");
  require(eps_prob > 0 && eps_prob < 1, "eps_prob must lie in (0, 1)");
  const int k = models.num_regions();
  Eigen::MatrixXd table(img.palette_size, k);
  for (int c = 0; c < img.palette_size; ++c) {
    for (int s = 0; s < k; ++s) table(c, s) = -std::log(std::max(models.theta(c, s), eps_prob));
  }
  UnaryCosts out;
  out.width = img.width;
  out.height = img.height;
  out.num_labels = k;
  out.costs.resize(img.size() * k);
  for (std::size_t i = 0; i < img.size(); ++i) {
    for (int s = 0; s < k; ++s) out(i, s) = table(img.pixels[i], s);
  }
  return out;
}

double energy(const Segmentation& seg, const UnaryCosts& costs, double lambda) {
  check_match(seg, costs);
  double data = 0.0;
  for (std::size_t i = 0; i < seg.size(); ++i) data += costs(i, seg.labels[i]);
  std::size_t boundary = 0;
  for (int row = 0; row < seg.height; ++row) {
    for (int col = 0; col < seg.width; ++col) {
      const int here = seg.at(row, col);
      if (col + 1 < seg.width && seg.at(row, col + 1) != here) ++boundary;
      if (row + 1 < seg.height && seg.at(row + 1, col) != here) ++boundary;
    }
  }
  return data + lambda * static_cast<double>(boundary);
}

Segmentation argmin_labeling(const UnaryCosts& costs) {
  costs.validate();
  Segmentation seg(costs.width, costs.height, costs.num_labels);
  for (std::size_t i = 0; i < costs.num_pixels(); ++i) {
    int best = 0;
    for (int k = 1; k < costs.num_labels; ++k) {
      if (costs(i, k) < costs(i, best)) best = k;
    }
    seg.labels[i] = best;
  }
  return seg;
}

Segmentation min_cut_binary(const UnaryCosts& costs, double lambda) {
  costs.validate();
  require(costs.num_labels == 2, "min_cut_binary needs exactly two labels");
  require(lambda >= 0, "lambda must be nonnegative");
  const int w = costs.width, h = costs.height;
  MaxFlowGraph graph(w * h, lambda > 0 ? 2 * w * h : 0);
  for (int i = 0; i < w * h; ++i) graph.add_terminal_edge(i, costs(i, 1), costs(i, 0));
  if (lambda > 0) {
    for (int row = 0; row < h; ++row) {
      for (int col = 0; col < w; ++col) {
        const int i = row * w + col;
        if (col + 1 < w) graph.add_edge(i, i + 1, lambda, lambda);
        if (row + 1 < h) graph.add_edge(i, i + w, lambda, lambda);
      }
    }
  }
  graph.max_flow();
  Segmentation seg(w, h, 2);
  for (int i = 0; i < w * h; ++i) seg.labels[i] = graph.side(i) == MaxFlowGraph::Side::sink ? 1 : 0;
  return seg;
}

Segmentation swap_move(const Segmentation& seg, const UnaryCosts& costs, double lambda, int a, int b) {
  check_match(seg, costs);
  require(a != b && a >= 0 && b >= 0 && a < seg.num_regions && b < seg.num_regions, "invalid label pair");
  const int w = seg.width, h = seg.height;
  std::vector<int> node(seg.size(), -1);
  int count = 0;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    if (seg.labels[i] == a || seg.labels[i] == b) node[i] = count++;
  }
  if (count == 0) return seg;

  MaxFlowGraph graph(count, 2 * count);
  const int drow[4] = {0, 0, -1, 1};
  const int dcol[4] = {-1, 1, 0, 0};
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const int i = row * w + col;
      if (node[i] < 0) continue;
      double cost_a = costs(i, a), cost_b = costs(i, b);
      for (int n = 0; n < 4; ++n) {
        const int r2 = row + drow[n], c2 = col + dcol[n];
        if (r2 < 0 || r2 >= h || c2 < 0 || c2 >= w) continue;
        const int j = r2 * w + c2;
        if (node[j] >= 0) {
          if (n == 1 || n == 3) graph.add_edge(node[i], node[j], lambda, lambda);
          continue;
        }
        const int other = seg.labels[j];
        if (other != a) cost_a += lambda;
        if (other != b) cost_b += lambda;
      }
      graph.add_terminal_edge(node[i], cost_b, cost_a);
    }
  }
  graph.max_flow();
  Segmentation out = seg;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    if (node[i] >= 0) out.labels[i] = graph.side(node[i]) == MaxFlowGraph::Side::sink ? b : a;
  }
  return out;
}

Segmentation ab_swap(const UnaryCosts& costs, double lambda, const Segmentation& init,
                     const SwapOptions& options, SwapTrace* trace) {
  costs.validate();
  init.validate();
  check_match(init, costs);
  require(lambda >= 0, "lambda must be nonnegative");
  Segmentation current = init;
  double current_energy = energy(current, costs, lambda);
  if (trace) {
    trace->energies.assign(1, current_energy);
    trace->cycles = 0;
  }
  const int k = costs.num_labels;
  for (int cycle = 0; cycle < options.max_cycles; ++cycle) {
    bool improved = false;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        auto candidate = swap_move(current, costs, lambda, a, b);
        const double e = energy(candidate, costs, lambda);
        if (e < current_energy - options.min_decrease) {
          current = std::move(candidate);
          current_energy = e;
          improved = true;
          if (trace) trace->energies.push_back(e);
        }
      }
    }
    if (trace) trace->cycles = cycle + 1;
    if (!improved) break;
  }
  return current;
}

TeamsegResult run_teamseg(const DiscreteImage& img, const TeamsegParams& params) {
  params.energy.validate();
  TeamsegResult out;
  const auto start = std::chrono::steady_clock::now();
  const auto moments = estimate_moments(img, params.distance, params.num_slices, params.beta_mode);
  TeamDiagnostics diag;
  out.models = team_estimate(moments, params.num_regions, params.team, &diag);
  out.warnings = std::move(diag.warnings);
  out.estimation_seconds = seconds_since(start);

  const auto seg_start = std::chrono::steady_clock::now();
  const auto costs = unary_costs(img, out.models, params.energy.eps_prob);
  if (params.num_regions == 1) {
    out.segmentation = Segmentation(img.width, img.height, 1);
  } else if (params.num_regions == 2) {
    out.segmentation = min_cut_binary(costs, params.energy.lambda);
  } else {
    out.segmentation = ab_swap(costs, params.energy.lambda, argmin_labeling(costs), params.swap);
  }
  out.segmentation_seconds = seconds_since(seg_start);
  return out;
}

}  // namespace teamseg
