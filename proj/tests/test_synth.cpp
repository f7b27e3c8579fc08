#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "teamseg/metrics.hpp"
#include "teamseg/moments.hpp"
#include "teamseg/synth.hpp"

using namespace teamseg;

namespace {

std::vector<double> fractions(const Segmentation& seg) {
  std::vector<double> f(seg.num_regions, 0.0);
  for (auto l : seg.labels) f[l] += 1.0;
  for (auto& x : f) x /= static_cast<double>(seg.size());
  return f;
}

// Reference bin mass from the normal CDF.
double bin_mass(int v, double mean, double sigma, int L) {
  auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean) / (sigma * std::sqrt(2.0))); };
  const double lo = std::max(1.0, v + 1 - 0.5), hi = std::min(double(L), v + 1 + 0.5);
  return (cdf(hi) - cdf(lo)) / (cdf(L) - cdf(1.0));
}

double tv(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("masks partition the image into exactly K regions") {
    for (auto kind : {MaskKind::two_region, MaskKind::three_region, MaskKind::four_region, MaskKind::five_region}) {
      const auto m = make_mask({kind, 300, 300});
      CHECK(m.num_regions == region_count(kind));
      CHECK_NOTHROW(m.validate());
      for (double f : fractions(m)) CHECK(f > 0.0);
    }
  }

  TEST_CASE("two_region foreground share") {
    const auto f = fractions(make_mask({MaskKind::two_region, 300, 300}));
    CHECK(f[1] == doctest::Approx(0.283).epsilon(0.01));
  }

  TEST_CASE("five_region sizes are non-uniform and not tiny") {
    auto f = fractions(make_mask({MaskKind::five_region, 300, 300}));
    CHECK(*std::min_element(f.begin(), f.end()) >= 0.01);
    std::sort(f.begin(), f.end());
    for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] - f[i - 1] >= 0.02);
    for (double x : fractions(make_mask({MaskKind::five_region, 50, 50}))) CHECK(x > 0.0);
  }

  TEST_CASE("mask arguments and determinism") {
    CHECK_THROWS(make_mask({MaskKind::two_region, 49, 300}));
    CHECK(make_mask({MaskKind::four_region, 120, 90}).labels == make_mask({MaskKind::four_region, 120, 90}).labels);
    CHECK(parse_mask_kind(to_string(MaskKind::three_region)) == MaskKind::three_region);
    CHECK_THROWS(parse_mask_kind("six_region"));
  }

  TEST_CASE("gmm means and their order") {
    CHECK(gmm_means(4, 256) == std::vector<int>{1, 86, 171, 256});
    CHECK(gmm_means(2, 32) == std::vector<int>{1, 32});
    CHECK(gmm_mean_order(5) == std::vector<int>{0, 4, 1, 3, 2});
    CHECK(gmm_mean_order(1) == std::vector<int>{0});
  }

  TEST_CASE("vanishing sigma paints each region with its mean") {
    const auto mask = make_mask({MaskKind::four_region, 80, 80});
    const auto gen = gen_gmm(mask, 64, 0.01, 3);
    const auto means = gmm_means(4, 64);
    const auto order = gmm_mean_order(4);
    for (std::size_t i = 0; i < mask.size(); ++i) CHECK(gen.image.pixels[i] == means[order[mask.labels[i]]] - 1);
  }

  TEST_CASE("truncated normal bins match the erfc reference") {
    for (auto [mean, sigma, L] : {std::tuple{1.0, 30.0, 256}, {128.5, 15.0, 256}, {10.0, 4.0, 32}}) {
      const auto bins = truncated_normal_bins(mean, sigma, L);
      CHECK(bins.sum() == doctest::Approx(1.0).epsilon(1e-12));
      for (int v = 0; v < L; ++v) CHECK(std::abs(bins[v] - bin_mass(v, mean, sigma, L)) <= 1e-12);
    }
  }

  TEST_CASE("gmm region histograms approach their models") {
    const auto mask = make_mask({MaskKind::two_region, 300, 300});
    const auto gen = gen_gmm(mask, 32, 4.0, 11);
    const auto gt = models_from_gt(gen.image, mask);
    for (int k = 0; k < 2; ++k) CHECK(tv(gt.theta.col(k), gen.models.col(k)) <= 0.02);
  }

  TEST_CASE("rand: single region histogram and seeding") {
    Segmentation mask(300, 300, 1);
    const auto a = gen_rand(mask, 16, 5);
    CHECK(tv(estimate_alpha(a.image), a.models.col(0)) <= 0.02);
    CHECK(gen_rand(mask, 16, 5).image.pixels == a.image.pixels);
    Segmentation small(30, 30, 1);
    int far = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Eigen::VectorXd p = gen_rand(small, 16, 100 + 2 * s).models.col(0);
      const Eigen::VectorXd q = gen_rand(small, 16, 101 + 2 * s).models.col(0);
      far += bhattacharyya(p, q) > 0.05;
    }
    CHECK(far == 20);
  }

  TEST_CASE("tiled rand keeps the per-region marginals") {
    const auto mask = make_mask({MaskKind::two_region, 300, 300});
    const auto gen = gen_rand_tiled(mask, 8, 3, 4);
    const auto gt = models_from_gt(gen.image, mask);
    for (int k = 0; k < 2; ++k) CHECK(tv(gt.theta.col(k), gen.models.col(k)) <= 0.05);
    CHECK(gen_rand_tiled(mask, 8, 3, 4).image.pixels == gen.image.pixels);
  }

  TEST_CASE("models from ground truth") {
    DiscreteImage img(4, 1, 3);
    img.pixels = {2, 2, 0, 1};
    Segmentation mask(4, 1, 2);
    mask.labels = {0, 0, 1, 1};
    const auto m = models_from_gt(img, mask);
    CHECK(m.w[0] == 0.5);
    CHECK(m.theta(2, 0) == 1.0);
    CHECK(m.theta(0, 1) == 0.5);
    CHECK(m.theta(1, 1) == 0.5);

    Segmentation whole(4, 1, 1);
    CHECK(models_from_gt(img, whole).theta.col(0) == estimate_alpha(img));

    const auto five = make_mask({MaskKind::five_region, 60, 60});
    const auto f = fractions(five);
    const auto g = models_from_gt(gen_rand(five, 8, 1).image, five);
    for (int k = 0; k < 5; ++k) CHECK(g.w[k] == f[k]);

    Segmentation gap(4, 1, 3);
    gap.labels = {0, 0, 2, 2};
    CHECK_THROWS(models_from_gt(img, gap));
  }
}
