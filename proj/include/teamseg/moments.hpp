#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "teamseg/types.hpp"

namespace teamseg {

/// Which pixel pairs feed the second-order moment.
///  ring: every in-bounds y with |dy| + |dx| = r (the full L1 ring)
///  axis: only y = x + (0, r) and y = x + (r, 0)
enum class BetaMode { ring, axis };

std::string to_string(BetaMode mode);
BetaMode parse_beta_mode(const std::string& text);

/// Unnormalized, symmetric L x L co-occurrence counts.
using CountMatrix = Eigen::MatrixXd;
/// One retained slice of the third-order moment: integer counts, symmetric
/// in its two indices.
using GammaSlice = Eigen::SparseMatrix<double>;

struct MomentEstimates {
  int palette_size = 0;
  int distance = 1;
  BetaMode beta_mode = BetaMode::ring;
  Eigen::VectorXd alpha;                 // L, sums to 1
  Eigen::MatrixXd beta;                  // L x L, symmetric, sums to 1
  std::vector<int> slice_colors;         // most frequent first
  std::vector<GammaSlice> gamma_slices;  // one per slice color

  int num_slices() const { return static_cast<int>(slice_colors.size()); }
  void validate() const;
};

/// Normalized histogram of the image.
Eigen::VectorXd estimate_alpha(const DiscreteImage& img);

/// Pair counts before normalization. Every visited pair (x, y) increments
/// both (I(x), I(y)) and (I(y), I(x)); in ring mode every ordered pair is
/// visited, in axis mode each unordered axis pair is visited once.
CountMatrix estimate_beta_counts(const DiscreteImage& img, int distance, BetaMode mode);
Eigen::MatrixXd estimate_beta(const DiscreteImage& img, int distance, BetaMode mode);

/// The `count` most frequent colors, ties broken by smaller index.
std::vector<int> most_frequent_colors(const DiscreteImage& img, int count);

struct GammaEstimate {
  std::vector<int> slice_colors;
  std::vector<GammaSlice> slices;
};

/// Sparsified triple counts over (x, x + (0, r), x + (r, 0)) for the
/// `num_slices` most frequent colors.
GammaEstimate estimate_gamma_slices(const DiscreteImage& img, int distance, int num_slices);

/// All three estimators; output equals the individual operations exactly.
MomentEstimates estimate_moments(const DiscreteImage& img, int distance, int num_slices,
                                 BetaMode mode = BetaMode::ring);

struct SamplingOptions {
  std::uint64_t num_pairs = 1;
  std::uint64_t num_triples = 1;
  std::uint64_t seed = 0;
  /// Ignore the counts and enumerate everything (the exhaustive limit).
  bool exhaustive = false;
};

/// Monte Carlo version of estimate_moments: pairs drawn uniformly from the
/// ordered ring pairs (or axis pairs), triples uniformly from the valid
/// axis-triple anchors.
MomentEstimates sample_moments(const DiscreteImage& img, int distance, int num_slices,
                               BetaMode mode, const SamplingOptions& options);

// Structured text form (alpha, beta, slice colors) and the binary sidecar
// holding the gamma slice counts.
std::string serialize_moments(const MomentEstimates& moments);
MomentEstimates deserialize_moments(const std::string& text);
std::string encode_gamma_sidecar(const MomentEstimates& moments);
void decode_gamma_sidecar(const std::string& bytes, MomentEstimates& moments);

}  // namespace teamseg
