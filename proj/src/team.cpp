#include "teamseg/team.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace teamseg {

WhiteningFactor truncated_psd_eig(const Eigen::MatrixXd& beta, int k, double eps_rank) {
  require(beta.rows() == beta.cols() && beta.rows() > 0, "beta must be a nonempty square matrix");
  require(k >= 1 && k <= beta.rows(), "K must satisfy 1 <= K <= L");
  const Eigen::MatrixXd sym = 0.5 * (beta + beta.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition of beta failed");

  const auto n = sym.rows();
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  if (values[n - k] <= eps_rank) {
    const auto effective = static_cast<int>((values.array() > eps_rank).count());
    throw RankDeficientError(k, effective);
  }

  WhiteningFactor wf;
  wf.eigvals.resize(k);
  wf.eigvecs.resize(n, k);
  for (int i = 0; i < k; ++i) {
    wf.eigvals[i] = std::max(values[n - 1 - i], 0.0);
    wf.eigvecs.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  const Eigen::ArrayXd root = wf.eigvals.array().sqrt();
  wf.m = wf.eigvecs * root.matrix().asDiagonal();
  wf.m_pinv = root.inverse().matrix().asDiagonal() * wf.eigvecs.transpose();
  return wf;
}

WhitenedSlices whiten_slices(const MomentEstimates& moments, const WhiteningFactor& wf) {
  require(wf.m_pinv.cols() == moments.palette_size, "whitening factor does not match the palette size");
  WhitenedSlices out;
  out.slice_colors = moments.slice_colors;
  out.slices.reserve(moments.gamma_slices.size());
  for (const auto& slice : moments.gamma_slices) {
    require(slice.rows() == moments.palette_size && slice.cols() == moments.palette_size,
            "gamma slice has the wrong shape");
    const Eigen::MatrixXd left = wf.m_pinv * slice;  // K x L
    Eigen::MatrixXd white = left * wf.m_pinv.transpose();
    out.slices.push_back(0.5 * (white + white.transpose()));
  }
  return out;
}

double off_diagonal_mass(const std::vector<Eigen::MatrixXd>& slices, const Eigen::MatrixXd& o) {
  double off = 0.0;
  for (const auto& a : slices) {
    Eigen::MatrixXd d = o.transpose() * a * o;
    d.diagonal().setZero();
    off += d.squaredNorm();
  }
  return off;
}

Eigen::MatrixXd joint_diagonalize(const std::vector<Eigen::MatrixXd>& input, const JointDiagOptions& options) {
  require(!input.empty(), "joint diagonalization needs at least one matrix");
  const auto k = input.front().rows();
  for (const auto& a : input) {
    require(a.rows() == k && a.cols() == k, "all matrices must share one square shape");
    const double scale = std::max(a.norm(), 1e-300);
    require((a - a.transpose()).norm() <= 1e-8 * scale, "joint diagonalization needs symmetric matrices");
  }

  std::vector<Eigen::MatrixXd> slices = input;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(k, k);
  if (k == 1) return v;

  double total = 0.0;
  for (const auto& a : slices) total += a.squaredNorm();
  if (total == 0.0) return v;

  auto off_mass = [&] {
    double off = 0.0;
    for (const auto& a : slices) off += a.squaredNorm() - a.diagonal().squaredNorm();
    return std::max(off, 0.0);
  };

  double off = off_mass();
  for (int sweep = 0; sweep < options.max_sweeps && off > 0.0; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < k; ++p) {
      for (Eigen::Index q = p + 1; q < k; ++q) {
        // Angle maximizing the summed squared diagonals over all slices.
        double g11 = 0.0, g12 = 0.0, g22 = 0.0;
        for (const auto& a : slices) {
          const double h1 = a(p, p) - a(q, q);
          const double h2 = a(p, q) + a(q, p);
          g11 += h1 * h1;
          g12 += h1 * h2;
          g22 += h2 * h2;
        }
        const double ton = g11 - g22;
        const double toff = 2.0 * g12;
        const double theta = 0.5 * std::atan2(toff, ton + std::sqrt(ton * ton + toff * toff));
        if (std::abs(theta) < 1e-15) continue;
        const double c = std::cos(theta), s = std::sin(theta);
        for (auto& a : slices) {
          const Eigen::RowVectorXd rp = a.row(p), rq = a.row(q);
          a.row(p) = c * rp + s * rq;
          a.row(q) = c * rq - s * rp;
          const Eigen::VectorXd cp = a.col(p), cq = a.col(q);
          a.col(p) = c * cp + s * cq;
          a.col(q) = c * cq - s * cp;
        }
        const Eigen::VectorXd vp = v.col(p), vq = v.col(q);
        v.col(p) = c * vp + s * vq;
        v.col(q) = c * vq - s * vp;
      }
    }
    const double next = off_mass();
    const double reduction = off - next;
    off = next;
    if (reduction < options.tol * total) break;
  }
  return v;
}

Eigen::VectorXd project_simplex(const Eigen::Ref<const Eigen::VectorXd>& v) {
  require(v.size() >= 1, "cannot project an empty vector");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) tau = candidate;
  }
  return (v.array() - tau).max(0.0).matrix();
}

ModelSet team_estimate(const MomentEstimates& moments, int k, const TeamOptions& options,
                       TeamDiagnostics* diagnostics) {
  moments.validate();
  require(k >= 1, "K must be at least 1");
  TeamDiagnostics local;
  TeamDiagnostics& diag = diagnostics ? *diagnostics : local;

  const auto wf = truncated_psd_eig(moments.beta, k, options.eps_rank);

  Eigen::MatrixXd o = Eigen::MatrixXd::Identity(k, k);
  if (k > 1) {
    require(moments.num_slices() >= 1, "at least one gamma slice is needed for K > 1");
    if (k > moments.num_slices()) {
      diag.warnings.push_back("K=" + std::to_string(k) + " exceeds the " + std::to_string(moments.num_slices()) +
                              " retained slices; joint diagonalization may be underdetermined");
    }
    const auto white = whiten_slices(moments, wf);
    o = joint_diagonalize(white.slices, options.joint_diag);
  }

  // Columns of M O are sqrt(w_s) theta_s up to sign.
  const Eigen::MatrixXd scaled = wf.m * o;
  ModelSet out;
  out.theta.resize(moments.palette_size, k);
  for (int s = 0; s < k; ++s) {
    Eigen::VectorXd col = scaled.col(s);
    const double mass = col.sum();
    if (mass < 0) col = -col;
    if (std::abs(mass) > 1e-300) col /= std::abs(mass);
    out.theta.col(s) = project_simplex(col);
  }

  Eigen::VectorXd raw_w;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(out.theta);
  if (qr.rank() < k) {
    diag.warnings.push_back("estimated models are linearly dependent; using ridge-damped least squares");
    const Eigen::MatrixXd normal =
        out.theta.transpose() * out.theta + 1e-10 * Eigen::MatrixXd::Identity(k, k);
    raw_w = normal.ldlt().solve(out.theta.transpose() * moments.alpha);
  } else {
    raw_w = qr.solve(moments.alpha);
  }
  out.w = project_simplex(raw_w);

  if (options.canonical_order && k > 1) {
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return out.w[a] > out.w[b]; });
    ModelSet sorted;
    sorted.theta.resize(out.theta.rows(), k);
    sorted.w.resize(k);
    for (int s = 0; s < k; ++s) {
      sorted.theta.col(s) = out.theta.col(order[s]);
      sorted.w[s] = out.w[order[s]];
    }
    out = std::move(sorted);
  }
  return out;
}

}  // namespace teamseg
