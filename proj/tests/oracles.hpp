#pragma once

// Slow reference implementations used as test oracles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "teamseg/graphcut.hpp"
#include "teamseg/moments.hpp"
#include "teamseg/types.hpp"

namespace oracle {

using teamseg::DiscreteImage;
using teamseg::ModelSet;
using teamseg::Segmentation;

inline DiscreteImage random_image(std::mt19937_64& gen, int width, int height, int palette_size) {
  DiscreteImage img(width, height, palette_size);
  std::uniform_int_distribution<int> pick(0, palette_size - 1);
  for (auto& p : img.pixels) p = pick(gen);
  return img;
}

inline std::vector<std::int64_t> histogram(const DiscreteImage& img) {
  std::vector<std::int64_t> h(img.palette_size, 0);
  for (int row = 0; row < img.height; ++row)
    for (int col = 0; col < img.width; ++col) ++h[img.at(row, col)];
  return h;
}

// Every ordered pixel pair (x, y), all of Omega x Omega, filtered by the
// offset rule; each accepted pair bumps (I(x), I(y)) and (I(y), I(x)).
inline Eigen::MatrixXd beta_counts(const DiscreteImage& img, int r, teamseg::BetaMode mode) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(img.palette_size, img.palette_size);
  for (int r1 = 0; r1 < img.height; ++r1)
    for (int c1 = 0; c1 < img.width; ++c1)
      for (int r2 = 0; r2 < img.height; ++r2)
        for (int c2 = 0; c2 < img.width; ++c2) {
          const int dr = r2 - r1, dc = c2 - c1;
          bool take;
          if (mode == teamseg::BetaMode::ring) {
            take = std::abs(dr) + std::abs(dc) == r;
          } else {
            take = (dr == 0 && dc == r) || (dr == r && dc == 0);
          }
          if (!take) continue;
          const int a = img.at(r1, c1), b = img.at(r2, c2);
          c(a, b) += 1;
          c(b, a) += 1;
        }
  return c;
}

// Dense symmetrized triple tensor: every valid anchor contributes all six
// orderings of (I(x), I(x + (0, r)), I(x + (r, 0))). Slice s is T(., ., s).
inline std::vector<Eigen::MatrixXd> gamma_slices(const DiscreteImage& img, int r, const std::vector<int>& colors) {
  const int L = img.palette_size;
  std::vector<double> t(static_cast<std::size_t>(L) * L * L, 0.0);
  for (int row = 0; row + r < img.height; ++row)
    for (int col = 0; col + r < img.width; ++col) {
      std::array<int, 3> v = {img.at(row, col), img.at(row, col + r), img.at(row + r, col)};
      std::array<int, 3> idx = {0, 1, 2};
      do {
        t[(static_cast<std::size_t>(v[idx[0]]) * L + v[idx[1]]) * L + v[idx[2]]] += 1;
      } while (std::next_permutation(idx.begin(), idx.end()));
    }
  std::vector<Eigen::MatrixXd> out;
  for (int s : colors) {
    Eigen::MatrixXd m(L, L);
    for (int a = 0; a < L; ++a)
      for (int b = 0; b < L; ++b) m(a, b) = t[(static_cast<std::size_t>(a) * L + b) * L + s];
    out.push_back(m);
  }
  return out;
}

// Exact moments of a model set: beta = Theta W Theta^T and
// gamma(., ., s) = Theta diag(w .* Theta(s, .)) Theta^T.
inline teamseg::MomentEstimates exact_moments(const ModelSet& models, const std::vector<int>& colors) {
  teamseg::MomentEstimates m;
  m.palette_size = models.num_colors();
  m.distance = 1;
  m.alpha = models.theta * models.w;
  m.beta = models.theta * models.w.asDiagonal() * models.theta.transpose();
  m.slice_colors = colors;
  for (int s : colors) {
    const Eigen::VectorXd d = models.w.cwiseProduct(models.theta.row(s).transpose());
    const Eigen::MatrixXd g = models.theta * d.asDiagonal() * models.theta.transpose();
    m.gamma_slices.push_back(g.sparseView());
  }
  return m;
}

inline ModelSet random_models(std::mt19937_64& gen, int L, int K) {
  std::exponential_distribution<double> e(1.0);
  ModelSet m;
  m.theta.resize(L, K);
  m.w.resize(K);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < L; ++i) m.theta(i, k) = e(gen);
    m.theta.col(k) /= m.theta.col(k).sum();
  }
  // Weights bounded away from zero so the exact problem stays well posed.
  for (int k = 0; k < K; ++k) m.w[k] = 0.2 + e(gen);
  m.w /= m.w.sum();
  return m;
}

// Euclidean projection onto the simplex by trying every support set: on a
// fixed support S the constrained optimum is v_S shifted by a constant.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  Eigen::VectorXd best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n); ++mask) {
    double sum = 0;
    int count = 0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) {
        sum += v[i];
        ++count;
      }
    const double shift = (sum - 1.0) / count;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    bool ok = true;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) {
        x[i] = v[i] - shift;
        ok = ok && x[i] >= 0;
      }
    if (!ok) continue;
    const double d = (x - v).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = x;
    }
  }
  return best;
}

// Energy of a labeling given as a flat vector, computed from scratch.
inline double energy(const teamseg::UnaryCosts& costs, const std::vector<int>& labels, double lambda) {
  double e = 0;
  const int w = costs.width, h = costs.height;
  for (int i = 0; i < w * h; ++i) e += costs(i, labels[i]);
  for (int row = 0; row < h; ++row)
    for (int col = 0; col < w; ++col) {
      const int i = row * w + col;
      if (col + 1 < w && labels[i] != labels[i + 1]) e += lambda;
      if (row + 1 < h && labels[i] != labels[i + w]) e += lambda;
    }
  return e;
}

// Minimum energy over all K^n labelings.
inline double min_energy(const teamseg::UnaryCosts& costs, double lambda) {
  const int n = static_cast<int>(costs.num_pixels());
  std::vector<int> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    best = std::min(best, energy(costs, labels, lambda));
    int i = 0;
    while (i < n && ++labels[i] == costs.num_labels) labels[i++] = 0;
    if (i == n) break;
  }
  return best;
}

// Unaries that are multiples of 1/8 so every energy is exact in binary
// floating point and equality comparisons are meaningful.
inline teamseg::UnaryCosts dyadic_costs(std::mt19937_64& gen, int width, int height, int k) {
  teamseg::UnaryCosts c;
  c.width = width;
  c.height = height;
  c.num_labels = k;
  c.costs.resize(static_cast<std::size_t>(width) * height * k);
  std::uniform_int_distribution<int> pick(0, 40);
  for (auto& x : c.costs) x = pick(gen) / 8.0;
  return c;
}

inline std::vector<int> to_vector(const Segmentation& seg) { return {seg.labels.begin(), seg.labels.end()}; }

// Bhattacharyya distance straight from its definition.
inline double bhattacharyya(const std::vector<double>& p, const std::vector<double>& q) {
  double bc = 0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  return bc == 0 ? std::numeric_limits<double>::infinity() : -std::log(bc);
}

}  // namespace oracle
