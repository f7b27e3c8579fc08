#pragma once

#include <map>
#include <string>
#include <vector>

#include "teamseg/types.hpp"

namespace teamseg {

using Permutation = std::vector<int>;

/// -ln sum_i sqrt(p_i q_i); +inf for disjoint supports. Inputs must lie on
/// the simplex within 1e-6 and are renormalized before use.
double bhattacharyya(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q);

struct MatchedDistance {
  double value = 0.0;
  Permutation permutation;  // ground-truth model k is matched to estimate permutation[k]
};

/// Mean Bhattacharyya distance between ground-truth and estimated models,
/// minimized over all K! matchings.
MatchedDistance model_set_distance(const ModelSet& gt, const ModelSet& est);

/// d_B(w, w_hat) after reordering w_hat by `permutation`.
double proportions_distance(const Eigen::VectorXd& w, const Eigen::VectorXd& w_hat, const Permutation& permutation);

/// |a & b| / |a | b| over pixel masks; 1 when both are empty.
double jaccard(const std::vector<bool>& a, const std::vector<bool>& b);

struct MatchedJaccard {
  double value = 0.0;
  Permutation permutation;  // ground-truth label k is matched to estimated label permutation[k]
};

/// Mean per-region Jaccard index maximized over all K! label matchings.
MatchedJaccard mean_jaccard(const Segmentation& gt, const Segmentation& est);

struct EvalReport {
  double d_b_models = 0.0;
  double d_b_weights = 0.0;
  double mean_jaccard = 0.0;
  Permutation model_permutation;
  Permutation seg_permutation;
  std::map<std::string, double> timings;
};

EvalReport evaluate(const ModelSet& gt_models, const ModelSet& est_models, const Segmentation& gt_seg,
                    const Segmentation& est_seg);

std::string serialize_report(const EvalReport& report);

/// Largest K accepted by the exhaustive permutation searches.
inline constexpr int kMaxMatchedRegions = 8;

}  // namespace teamseg
