#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "teamseg/metrics.hpp"
#include "teamseg/team.hpp"

using namespace teamseg;

namespace {

Eigen::MatrixXd random_rotation(std::mt19937_64& gen, int k) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = n(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ();
}

// Largest |<o_i, r_j>| per column of r must be 1 when o equals r up to
// column permutation and sign.
double match_error(const Eigen::MatrixXd& o, const Eigen::MatrixXd& r) {
  const Eigen::MatrixXd c = (o.transpose() * r).cwiseAbs();
  double worst = 0;
  for (int j = 0; j < r.cols(); ++j) worst = std::max(worst, 1.0 - c.col(j).maxCoeff());
  return worst;
}

std::vector<int> all_colors(int L) {
  std::vector<int> c(L);
  std::iota(c.begin(), c.end(), 0);
  return c;
}

}  // namespace

TEST_SUITE("team") {
  TEST_CASE("rank-one truncated eigendecomposition") {
    Eigen::Vector2d theta(0.8, 0.2);
    const auto wf = truncated_psd_eig(theta * theta.transpose(), 1);
    CHECK(wf.eigvals[0] == doctest::Approx(theta.squaredNorm()).epsilon(1e-14));
    CHECK(std::abs(std::abs(wf.eigvecs.col(0).dot(theta.normalized())) - 1.0) <= 1e-12);
    CHECK((wf.m_pinv * wf.m - Eigen::MatrixXd::Identity(1, 1)).norm() <= 1e-8);
  }

  TEST_CASE("exact beta reconstructs from its K leading pairs") {
    std::mt19937_64 gen(1);
    const auto models = oracle::random_models(gen, 16, 3);
    const Eigen::MatrixXd beta = models.theta * models.w.asDiagonal() * models.theta.transpose();
    const auto wf = truncated_psd_eig(beta, 3);
    const Eigen::MatrixXd rebuilt = wf.eigvecs * wf.eigvals.asDiagonal() * wf.eigvecs.transpose();
    CHECK((rebuilt - beta).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((wf.m - wf.eigvecs * wf.eigvals.cwiseSqrt().asDiagonal()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((wf.m_pinv * wf.m - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
  }

  TEST_CASE("rank deficiency names the effective rank") {
    std::mt19937_64 gen(2);
    const auto models = oracle::random_models(gen, 8, 2);
    const Eigen::MatrixXd beta = models.theta * models.w.asDiagonal() * models.theta.transpose();
    try {
      truncated_psd_eig(beta, 3);
      FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
      CHECK(e.requested_rank == 3);
      CHECK(e.effective_rank == 2);
    }
  }

  TEST_CASE("whitened exact slices are simultaneously diagonal") {
    std::mt19937_64 gen(3);
    const auto models = oracle::random_models(gen, 10, 4);
    const auto m = oracle::exact_moments(models, all_colors(10));
    const auto wf = truncated_psd_eig(m.beta, 4);
    const auto white = whiten_slices(m, wf);
    // O = M^+ Theta W^{1/2} is orthonormal and diagonalizes every slice.
    const Eigen::MatrixXd o = wf.m_pinv * models.theta * models.w.cwiseSqrt().asDiagonal();
    CHECK((o.transpose() * o - Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-8);
    for (std::size_t s = 0; s < white.slices.size(); ++s) {
      const Eigen::MatrixXd d = o.transpose() * white.slices[s] * o;
      const Eigen::MatrixXd off = d - Eigen::MatrixXd(d.diagonal().asDiagonal());
      CHECK(off.norm() <= 1e-8 * std::max(white.slices[s].norm(), 1e-300));
    }
  }

  TEST_CASE("whitening edge cases") {
    std::mt19937_64 gen(4);
    const auto models = oracle::random_models(gen, 6, 1);
    const auto m = oracle::exact_moments(models, {0, 1});
    const auto white = whiten_slices(m, truncated_psd_eig(m.beta, 1));
    for (const auto& s : white.slices) {
      CHECK(s.rows() == 1);
      CHECK(s(0, 0) >= 0.0);
    }
    auto z = oracle::exact_moments(oracle::random_models(gen, 6, 2), {0});
    z.gamma_slices[0].setZero();
    const auto wz = whiten_slices(z, truncated_psd_eig(z.beta, 2));
    CHECK(wz.slices[0].norm() == 0.0);
  }

  TEST_CASE("joint diagonalization: diagonal input is a fixed point") {
    std::vector<Eigen::MatrixXd> slices = {Eigen::Vector3d(1, 2, 3).asDiagonal(), Eigen::Vector3d(3, 1, 2).asDiagonal()};
    const auto o = joint_diagonalize(slices);
    CHECK(match_error(o, Eigen::MatrixXd::Identity(3, 3)) <= 1e-12);
  }

  TEST_CASE("joint diagonalization: 30 degree rotation") {
    const double a = M_PI / 6;
    Eigen::Matrix2d r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    std::vector<Eigen::MatrixXd> slices = {r * Eigen::Vector2d(1, 2).asDiagonal() * r.transpose(),
                                           r * Eigen::Vector2d(3, 1).asDiagonal() * r.transpose()};
    JointDiagOptions one_sweep;
    one_sweep.max_sweeps = 1;
    const auto o = joint_diagonalize(slices, one_sweep);
    CHECK(match_error(o, r) <= 1e-12);
    CHECK(off_diagonal_mass(slices, o) <= 1e-12);
  }

  TEST_CASE("joint diagonalization: random K=4 rotation") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto q = random_rotation(gen, 4);
    std::vector<Eigen::MatrixXd> slices;
    for (int s = 0; s < 12; ++s) {
      Eigen::Vector4d d(u(gen), u(gen), u(gen), u(gen));
      slices.push_back(q * d.asDiagonal() * q.transpose());
    }
    const auto o = joint_diagonalize(slices);
    CHECK((o.transpose() * o - Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-10);
    for (const auto& a : slices) {
      const Eigen::MatrixXd d = o.transpose() * a * o;
      CHECK((d - Eigen::MatrixXd(d.diagonal().asDiagonal())).norm() <= 1e-8 * a.norm());
    }
  }

  TEST_CASE("joint diagonalization rejects asymmetric input") {
    Eigen::Matrix2d a;
    a << 1, 2, 0, 1;
    CHECK_THROWS(joint_diagonalize({a}));
  }

  TEST_CASE("simplex projection examples") {
    Eigen::Vector3d in(0.2, 0.3, 0.5);
    CHECK((project_simplex(in) - in).norm() <= 1e-15);
    const auto p = project_simplex(Eigen::Vector2d(1.2, -0.2));
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));
    const auto z = project_simplex(Eigen::Vector3d::Zero());
    for (int i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("simplex projection matches support enumeration") {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
      const int dim = 1 + t % 6;
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v[i] = n(gen);
      CHECK((project_simplex(v) - oracle::project_simplex(v)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("team recovers the two-model example exactly") {
    ModelSet gt;
    gt.theta.resize(3, 2);
    gt.theta << 0.8, 0.1, 0.2, 0.2, 0.0, 0.7;
    gt.w.resize(2);
    gt.w << 0.6, 0.4;
    const auto est = team_estimate(oracle::exact_moments(gt, {0, 1, 2}), 2);
    const auto d = model_set_distance(gt, est);
    CHECK(d.value <= 1e-6);
    CHECK(proportions_distance(gt.w, est.w, d.permutation) <= 1e-6);
    CHECK(est.w[0] >= est.w[1]);
  }

  TEST_CASE("K = 1 returns alpha") {
    std::mt19937_64 gen(7);
    const auto models = oracle::random_models(gen, 9, 1);
    const auto m = oracle::exact_moments(models, {0, 1, 2});
    const auto est = team_estimate(m, 1);
    CHECK((est.theta.col(0) - m.alpha).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(est.w[0] == 1.0);
  }

  TEST_CASE("gamma scale does not change the estimate") {
    std::mt19937_64 gen(8);
    const auto m = oracle::exact_moments(oracle::random_models(gen, 12, 3), {0, 3, 5, 7});
    auto scaled = m;
    for (auto& s : scaled.gamma_slices) s *= 4.0;
    const auto a = team_estimate(m, 3), b = team_estimate(scaled, 3);
    CHECK(a.theta == b.theta);
    CHECK(a.w == b.w);
  }

  TEST_CASE("K larger than the slice count warns") {
    std::mt19937_64 gen(9);
    const auto m = oracle::exact_moments(oracle::random_models(gen, 8, 3), {0, 1});
    TeamDiagnostics diag;
    const auto est = team_estimate(m, 3, {}, &diag);
    CHECK(!diag.warnings.empty());
    CHECK_NOTHROW(est.validate());
  }

  TEST_CASE("output stays on the simplex under noise") {
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto m = oracle::exact_moments(oracle::random_models(gen, 10, 3), {0, 1, 2, 3});
    for (auto& s : m.gamma_slices) {
      Eigen::MatrixXd d = s;
      for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j <= i; ++j) d(i, j) = d(j, i) = d(i, j) + 0.05 * u(gen);
      s = d.sparseView();
    }
    const auto est = team_estimate(m, 3);
    CHECK_NOTHROW(est.validate());
  }
}
