#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "teamseg/metrics.hpp"

using namespace teamseg;

namespace {

Segmentation seg_of(int w, int h, int k, const std::vector<int>& labels) {
  Segmentation s(w, h, k);
  s.labels.assign(labels.begin(), labels.end());
  return s;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("bhattacharyya examples") {
    const Eigen::Vector2d p(0.5, 0.5), q(0.9, 0.1);
    CHECK(bhattacharyya(p, q) == doctest::Approx(oracle::bhattacharyya({0.5, 0.5}, {0.9, 0.1})).epsilon(1e-14));
    CHECK(bhattacharyya(p, q) == doctest::Approx(0.11157).epsilon(1e-4));
    CHECK(bhattacharyya(p, q) == bhattacharyya(q, p));
    CHECK(bhattacharyya(q, q) == 0.0);
    CHECK(std::isinf(bhattacharyya(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1))));
    CHECK_THROWS(bhattacharyya(Eigen::Vector2d(0.7, 0.7), q));
    CHECK_THROWS(bhattacharyya(Eigen::Vector2d(1.2, -0.2), q));
  }

  TEST_CASE("model set distance is invariant to column order") {
    ModelSet a;
    a.theta.resize(2, 2);
    a.theta << 0.9, 0.2, 0.1, 0.8;
    a.w = Eigen::Vector2d(0.3, 0.7);
    ModelSet b = a;
    b.theta.col(0) = a.theta.col(1);
    b.theta.col(1) = a.theta.col(0);
    b.w = Eigen::Vector2d(0.7, 0.3);
    const auto d = model_set_distance(a, b);
    CHECK(d.value == 0.0);
    CHECK(d.permutation == Permutation{1, 0});
    CHECK(proportions_distance(a.w, b.w, d.permutation) == 0.0);

    ModelSet one;
    one.theta = Eigen::Vector3d(0.2, 0.3, 0.5);
    one.w = Eigen::VectorXd::Ones(1);
    CHECK(model_set_distance(one, one).value == 0.0);
  }

  TEST_CASE("model set distance matches brute force and permutation") {
    std::mt19937_64 gen(12);
    for (int t = 0; t < 20; ++t) {
      const int k = 2 + t % 4;
      const auto a = oracle::random_models(gen, 10, k), b = oracle::random_models(gen, 10, k);
      std::vector<int> perm(k);
      std::iota(perm.begin(), perm.end(), 0);
      double best = std::numeric_limits<double>::infinity();
      do {
        double s = 0;
        for (int i = 0; i < k; ++i) s += bhattacharyya(a.theta.col(i), b.theta.col(perm[i]));
        best = std::min(best, s / k);
      } while (std::next_permutation(perm.begin(), perm.end()));
      const auto d = model_set_distance(a, b);
      CHECK(d.value == doctest::Approx(best).epsilon(1e-12));
      // reversing the estimate's columns leaves the value bit-identical
      ModelSet r = b;
      r.theta = b.theta.rowwise().reverse();
      r.w = b.w.reverse();
      CHECK(model_set_distance(a, r).value == d.value);
    }
  }

  TEST_CASE("proportions distance") {
    const Eigen::Vector2d w(0.5, 0.5), v(0.9, 0.1);
    CHECK(proportions_distance(w, v, {0, 1}) == bhattacharyya(w, v));
    CHECK(proportions_distance(v, Eigen::Vector2d(0.1, 0.9), {1, 0}) == 0.0);
  }

  TEST_CASE("jaccard examples") {
    std::vector<bool> a(200, false), b(200, false);
    CHECK(jaccard(a, b) == 1.0);
    for (int i = 0; i < 100; ++i) a[i] = true;
    CHECK(jaccard(a, a) == 1.0);
    for (int i = 100; i < 200; ++i) b[i] = true;
    CHECK(jaccard(a, b) == 0.0);
    std::vector<bool> c(200, false);
    for (int i = 50; i < 150; ++i) c[i] = true;
    CHECK(jaccard(a, c) == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("mean jaccard examples") {
    const auto gt = seg_of(4, 1, 2, {0, 0, 1, 1});
    const auto est = seg_of(4, 1, 2, {0, 1, 1, 1});
    // region 0: 1/2, region 1: 2/3
    CHECK(mean_jaccard(gt, est).value == doctest::Approx(7.0 / 12));
    CHECK(mean_jaccard(est, gt).value == doctest::Approx(7.0 / 12));

    const auto three = seg_of(3, 2, 3, {0, 1, 2, 2, 1, 0});
    auto renamed = three;
    for (auto& l : renamed.labels) l = (l + 1) % 3;
    const auto m = mean_jaccard(three, renamed);
    CHECK(m.value == 1.0);
    CHECK(m.permutation == Permutation{1, 2, 0});
  }

  TEST_CASE("report writes infinite distances as strings") {
    EvalReport r;
    r.d_b_models = std::numeric_limits<double>::infinity();
    r.mean_jaccard = 0.5;
    const auto text = serialize_report(r);
    CHECK(text.find("\"inf\"") != std::string::npos);
  }
}
