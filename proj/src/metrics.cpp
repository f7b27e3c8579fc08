#include "teamseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace teamseg {

namespace {

void check_simplex(const Eigen::Ref<const Eigen::VectorXd>& v, const char* name) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    require(std::isfinite(v[i]) && v[i] >= -1e-6, std::string(name) + " has a negative entry");
  }
  require(std::abs(v.sum() - 1.0) <= 1e-6, std::string(name) + " does not sum to 1");
}

// Sum of the terms in ascending order, so the result depends only on the
// multiset of terms.
double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

template <class Score>
std::pair<double, Permutation> best_permutation(int k, Score score, bool minimize) {
  require(k >= 1 && k <= kMaxMatchedRegions, "exhaustive matching supports 1 <= K <= 8");
  Permutation perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Permutation best = perm;
  double best_value = minimize ? std::numeric_limits<double>::infinity() : -1.0;
  bool first = true;
  do {
    std::vector<double> terms(k);
    for (int i = 0; i < k; ++i) terms[i] = score(i, perm[i]);
    const double value = ordered_sum(std::move(terms)) / k;
    const bool better = minimize ? value < best_value : value > best_value;
    if (first || better) {
      best_value = value;
      best = perm;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best_value, best};
}

}  // namespace

double bhattacharyya(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q) {
  require(p.size() == q.size() && p.size() > 0, "distributions must have the same nonzero length");
  check_simplex(p, "p");
  check_simplex(q, "q");
  double coefficient = 0.0, sum_p = 0.0, sum_q = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = std::max(p[i], 0.0), qi = std::max(q[i], 0.0);
    coefficient += std::sqrt(pi * qi);
    sum_p += pi;
    sum_q += qi;
  }
  if (coefficient <= 0.0) return std::numeric_limits<double>::infinity();
  coefficient /= std::sqrt(sum_p * sum_q);
  return coefficient >= 1.0 ? 0.0 : -std::log(coefficient);
}

MatchedDistance model_set_distance(const ModelSet& gt, const ModelSet& est) {
  require(gt.num_regions() == est.num_regions(), "model sets differ in K");
  require(gt.num_colors() == est.num_colors(), "model sets differ in L");
  const int k = gt.num_regions();
  Eigen::MatrixXd pair(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) pair(i, j) = bhattacharyya(gt.theta.col(i), est.theta.col(j));
  }
  auto [value, perm] = best_permutation(k, [&](int i, int j) { return pair(i, j); }, true);
  return {value, perm};
}

double proportions_distance(const Eigen::VectorXd& w, const Eigen::VectorXd& w_hat, const Permutation& permutation) {
  require(w.size() == w_hat.size(), "proportion vectors differ in length");
  require(static_cast<Eigen::Index>(permutation.size()) == w.size(), "permutation length does not match K");
  Eigen::VectorXd matched(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) matched[k] = w_hat[permutation[k]];
  return bhattacharyya(w, matched);
}

double jaccard(const std::vector<bool>& a, const std::vector<bool>& b) {
  require(a.size() == b.size(), "pixel sets must come from the same domain");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

MatchedJaccard mean_jaccard(const Segmentation& gt, const Segmentation& est) {
  gt.validate();
  est.validate();
  require(gt.width == est.width && gt.height == est.height, "segmentations differ in size");
  require(gt.num_regions == est.num_regions, "segmentations differ in K");
  const int k = gt.num_regions;
  // confusion(i, j) = |gt region i & est region j|
  std::vector<std::size_t> confusion(static_cast<std::size_t>(k) * k, 0);
  std::vector<std::size_t> gt_size(k, 0), est_size(k, 0);
  for (std::size_t p = 0; p < gt.size(); ++p) {
    ++confusion[static_cast<std::size_t>(gt.labels[p]) * k + est.labels[p]];
    ++gt_size[gt.labels[p]];
    ++est_size[est.labels[p]];
  }
  auto score = [&](int i, int j) {
    const std::size_t inter = confusion[static_cast<std::size_t>(i) * k + j];
    const std::size_t uni = gt_size[i] + est_size[j] - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  };
  auto [value, perm] = best_permutation(k, score, false);
  return {value, perm};
}

EvalReport evaluate(const ModelSet& gt_models, const ModelSet& est_models, const Segmentation& gt_seg,
                    const Segmentation& est_seg) {
  EvalReport report;
  const auto models = model_set_distance(gt_models, est_models);
  report.d_b_models = models.value;
  report.model_permutation = models.permutation;
  report.d_b_weights = proportions_distance(gt_models.w, est_models.w, models.permutation);
  const auto seg = mean_jaccard(gt_seg, est_seg);
  report.mean_jaccard = seg.value;
  report.seg_permutation = seg.permutation;
  return report;
}

std::string serialize_report(const EvalReport& report) {
  nlohmann::json j;
  auto finite_or_string = [](double v) -> nlohmann::json {
    if (std::isinf(v)) return "inf";
    return v;
  };
  j["d_b_models"] = finite_or_string(report.d_b_models);
  j["d_b_weights"] = finite_or_string(report.d_b_weights);
  j["mean_jaccard"] = report.mean_jaccard;
  j["model_permutation"] = report.model_permutation;
  j["seg_permutation"] = report.seg_permutation;
  j["timings"] = report.timings;
  return j.dump(1);
}

}  // namespace teamseg
