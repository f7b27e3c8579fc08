#include "teamseg/types.hpp"

#include <cmath>

namespace teamseg {

namespace {

bool on_simplex(const Eigen::Ref<const Eigen::VectorXd>& v, double tol) {
  if (v.size() == 0) return false;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < -tol) return false;
  }
  return std::abs(v.sum() - 1.0) <= tol;
}

}  // namespace

void DiscreteImage::validate() const {
  require(width > 0 && height > 0, "image dimensions must be positive");
  require(palette_size > 0, "palette size must be positive");
  require(pixels.size() == static_cast<std::size_t>(width) * height,
          "pixel count does not match image dimensions");
  for (auto v : pixels) {
    require(v >= 0 && v < palette_size, "pixel value outside the palette");
  }
}

void RgbImage::validate() const {
  require(width > 0 && height > 0, "image dimensions must be positive");
  require(pixels.size() == static_cast<std::size_t>(width) * height,
          "pixel count does not match image dimensions");
}

void Segmentation::validate() const {
  require(width > 0 && height > 0, "segmentation dimensions must be positive");
  require(num_regions > 0, "segmentation needs at least one region");
  require(labels.size() == static_cast<std::size_t>(width) * height,
          "label count does not match segmentation dimensions");
  for (auto v : labels) {
    require(v >= 0 && v < num_regions, "label outside [0, K)");
  }
}

void ModelSet::validate(double tol) const {
  require(theta.rows() > 0 && theta.cols() > 0, "model set is empty");
  require(w.size() == theta.cols(), "w length must equal the number of models");
  for (Eigen::Index k = 0; k < theta.cols(); ++k) {
    require(on_simplex(theta.col(k), tol),
            "appearance model " + std::to_string(k) + " is not a distribution");
  }
  require(on_simplex(w, tol), "region proportions are not a distribution");
}

}  // namespace teamseg
