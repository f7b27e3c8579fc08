#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "teamseg/bench.hpp"
#include "teamseg/graphcut.hpp"
#include "teamseg/imgio.hpp"
#include "teamseg/metrics.hpp"
#include "teamseg/moments.hpp"
#include "teamseg/synth.hpp"
#include "teamseg/team.hpp"

namespace py = pybind11;
using namespace teamseg;

namespace {

using IntArray = py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>;

IntArray to_array(int width, int height, const std::vector<std::int32_t>& values) {
  IntArray out({height, width});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<std::int32_t> from_array(const IntArray& a, int& width, int& height) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  height = static_cast<int>(a.shape(0));
  width = static_cast<int>(a.shape(1));
  return {a.data(), a.data() + a.size()};
}

DiscreteImage image_from(const IntArray& a, int palette_size) {
  DiscreteImage img;
  img.pixels = from_array(a, img.width, img.height);
  img.palette_size = palette_size;
  img.validate();
  return img;
}

Segmentation seg_from(const IntArray& a, int num_regions) {
  Segmentation s;
  s.labels = from_array(a, s.width, s.height);
  if (num_regions <= 0) num_regions = a.size() ? *std::max_element(s.labels.begin(), s.labels.end()) + 1 : 1;
  s.num_regions = num_regions;
  s.validate();
  return s;
}

ModelSet models_from(const Eigen::MatrixXd& theta, const Eigen::VectorXd& w) {
  ModelSet m{theta, w};
  m.validate(1e-6);
  return m;
}

py::tuple models_tuple(const ModelSet& m) { return py::make_tuple(m.theta, m.w); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Appearance model estimation from co-occurrence moments and graph-cut segmentation";

  py::register_exception<RankDeficientError>(m, "RankDeficientError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  m.def(
      "make_mask",
      [](const std::string& kind, int width, int height) {
        const auto s = make_mask({parse_mask_kind(kind), width, height});
        return to_array(s.width, s.height, s.labels);
      },
      py::arg("kind"), py::arg("width") = 300, py::arg("height") = 300);

  m.def(
      "generate",
      [](const IntArray& mask, const std::string& process, int palette_size, double sigma, std::uint64_t seed) {
        const auto s = seg_from(mask, 0);
        const auto g = parse_process(process) == Process::gmm ? gen_gmm(s, palette_size, sigma, seed)
                                                              : gen_rand(s, palette_size, seed);
        return py::make_tuple(to_array(g.image.width, g.image.height, g.image.pixels), g.models);
      },
      py::arg("mask"), py::arg("process"), py::arg("palette_size"), py::arg("sigma") = 30.0, py::arg("seed") = 0,
      "Returns (image, generating models L x K).");

  m.def(
      "models_from_gt",
      [](const IntArray& image, int palette_size, const IntArray& mask) {
        return models_tuple(models_from_gt(image_from(image, palette_size), seg_from(mask, 0)));
      },
      py::arg("image"), py::arg("palette_size"), py::arg("mask"));

  m.def(
      "moments",
      [](const IntArray& image, int palette_size, int r, int slices, const std::string& beta_mode) {
        const auto est = estimate_moments(image_from(image, palette_size), r, slices, parse_beta_mode(beta_mode));
        std::vector<Eigen::MatrixXd> dense(est.gamma_slices.begin(), est.gamma_slices.end());
        return py::make_tuple(est.alpha, est.beta, est.slice_colors, dense);
      },
      py::arg("image"), py::arg("palette_size"), py::arg("r") = 1, py::arg("slices") = 1,
      py::arg("beta_mode") = "ring", "Returns (alpha, beta, slice_colors, unnormalized gamma slices).");

  m.def(
      "estimate",
      [](const IntArray& image, int palette_size, int k, int r, int slices, const std::string& beta_mode) {
        if (slices <= 0) slices = (palette_size + 2) / 3;
        const auto est = estimate_moments(image_from(image, palette_size), r, slices, parse_beta_mode(beta_mode));
        return models_tuple(team_estimate(est, k));
      },
      py::arg("image"), py::arg("palette_size"), py::arg("k"), py::arg("r") = 1, py::arg("slices") = 0,
      py::arg("beta_mode") = "ring", "Returns (theta L x K, w).");

  m.def(
      "segment",
      [](const IntArray& image, int palette_size, int k, int r, int slices, double lambda_,
         const std::string& beta_mode) {
        TeamsegParams p;
        p.num_regions = k;
        p.distance = r;
        p.num_slices = slices > 0 ? slices : (palette_size + 2) / 3;
        p.beta_mode = parse_beta_mode(beta_mode);
        p.energy.lambda = lambda_;
        const auto res = run_teamseg(image_from(image, palette_size), p);
        return py::make_tuple(to_array(res.segmentation.width, res.segmentation.height, res.segmentation.labels),
                              res.models.theta, res.models.w);
      },
      py::arg("image"), py::arg("palette_size"), py::arg("k"), py::arg("r") = 1, py::arg("slices") = 0,
      py::arg("lambda_") = 1.0, py::arg("beta_mode") = "ring", "Returns (labels, theta, w).");

  m.def("project_simplex", [](const Eigen::VectorXd& v) { return project_simplex(v); });

  m.def(
      "bhattacharyya", [](const Eigen::VectorXd& p, const Eigen::VectorXd& q) { return bhattacharyya(p, q); },
      py::arg("p"), py::arg("q"));

  m.def(
      "model_set_distance",
      [](const Eigen::MatrixXd& theta, const Eigen::VectorXd& w, const Eigen::MatrixXd& theta_hat,
         const Eigen::VectorXd& w_hat) {
        const auto gt = models_from(theta, w), est = models_from(theta_hat, w_hat);
        const auto d = model_set_distance(gt, est);
        return py::make_tuple(d.value, proportions_distance(gt.w, est.w, d.permutation), d.permutation);
      },
      py::arg("theta"), py::arg("w"), py::arg("theta_hat"), py::arg("w_hat"),
      "Returns (D_B over models, d_B over proportions, matching).");

  m.def(
      "mean_jaccard",
      [](const IntArray& gt, const IntArray& est, int k) {
        const auto r = mean_jaccard(seg_from(gt, k), seg_from(est, k));
        return py::make_tuple(r.value, r.permutation);
      },
      py::arg("gt"), py::arg("est"), py::arg("k"));

  m.def(
      "load_graymap",
      [](const std::string& path) {
        const auto img = load_graymap(path);
        return py::make_tuple(to_array(img.width, img.height, img.pixels), img.palette_size);
      },
      py::arg("path"), "Returns (pixels, palette size).");

  m.def(
      "save_graymap",
      [](const IntArray& image, int palette_size, const std::string& path) {
        save_graymap(image_from(image, palette_size), path);
      },
      py::arg("image"), py::arg("palette_size"), py::arg("path"));
}
