#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "teamseg/moments.hpp"
#include "teamseg/types.hpp"

namespace teamseg {

/// The second-order moment has fewer than K eigenvalues above the rank
/// threshold.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(int requested, int effective)
      : std::runtime_error("second-order moment has effective rank " + std::to_string(effective) +
                           ", fewer than the requested K=" + std::to_string(requested)),
        requested_rank(requested), effective_rank(effective) {}

  int requested_rank;
  int effective_rank;
};

/// beta ~= M M^T with M = U diag(sqrt(eigvals)) restricted to the K leading
/// eigenpairs.
struct WhiteningFactor {
  Eigen::MatrixXd m;       // L x K
  Eigen::MatrixXd m_pinv;  // K x L
  Eigen::VectorXd eigvals; // K, descending
  Eigen::MatrixXd eigvecs; // L x K, orthonormal columns
};

WhiteningFactor truncated_psd_eig(const Eigen::MatrixXd& beta, int k, double eps_rank = 1e-12);

struct WhitenedSlices {
  std::vector<Eigen::MatrixXd> slices;  // K x K each
  std::vector<int> slice_colors;
};

/// Maps every retained gamma slice S to M^+ S M^+^T.
WhitenedSlices whiten_slices(const MomentEstimates& moments, const WhiteningFactor& wf);

struct JointDiagOptions {
  double tol = 1e-12;   // stop when a sweep removes less than tol of the total mass
  int max_sweeps = 100;
};

/// Orthonormal O such that O^T A O is as diagonal as possible for every A,
/// found by Jacobi sweeps of Givens rotations.
Eigen::MatrixXd joint_diagonalize(const std::vector<Eigen::MatrixXd>& slices,
                                  const JointDiagOptions& options = {});

/// Sum over slices of the squared off-diagonal entries of O^T A O.
double off_diagonal_mass(const std::vector<Eigen::MatrixXd>& slices, const Eigen::MatrixXd& o);

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::Ref<const Eigen::VectorXd>& v);

struct TeamOptions {
  double eps_rank = 1e-12;
  JointDiagOptions joint_diag{};
  /// Reorder the recovered models by descending proportion.
  bool canonical_order = true;
};

struct TeamDiagnostics {
  std::vector<std::string> warnings;
  int sweeps = 0;
};

/// Recovers K appearance models and region proportions from moment
/// estimates.
ModelSet team_estimate(const MomentEstimates& moments, int k, const TeamOptions& options = {},
                       TeamDiagnostics* diagnostics = nullptr);

}  // namespace teamseg
