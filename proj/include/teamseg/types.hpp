#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace teamseg {

/// Image whose pixels are indices into a palette of `palette_size` values.
/// Pixels are stored row-major with the origin at the top-left corner.
struct DiscreteImage {
  int width = 0;
  int height = 0;
  int palette_size = 0;
  std::vector<std::int32_t> pixels;

  DiscreteImage() = default;
  DiscreteImage(int w, int h, int levels)
      : width(w), height(h), palette_size(levels),
        pixels(static_cast<std::size_t>(w) * h, 0) {}

  std::size_t size() const { return pixels.size(); }
  std::int32_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  std::int32_t& at(int row, int col) {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }

  /// Throws std::invalid_argument if any invariant is broken.
  void validate() const;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h) {}

  std::size_t size() const { return pixels.size(); }
  void validate() const;
};

/// Per-pixel region labels in [0, num_regions).
struct Segmentation {
  int width = 0;
  int height = 0;
  int num_regions = 0;
  std::vector<std::int32_t> labels;

  Segmentation() = default;
  Segmentation(int w, int h, int k)
      : width(w), height(h), num_regions(k),
        labels(static_cast<std::size_t>(w) * h, 0) {}

  std::size_t size() const { return labels.size(); }
  std::int32_t at(int row, int col) const {
    return labels[static_cast<std::size_t>(row) * width + col];
  }
  std::int32_t& at(int row, int col) {
    return labels[static_cast<std::size_t>(row) * width + col];
  }

  void validate() const;
};

/// K appearance models (columns of `theta`, each a distribution over the
/// L palette values) and the region proportions `w`.
struct ModelSet {
  Eigen::MatrixXd theta;  // L x K
  Eigen::VectorXd w;      // K

  int num_colors() const { return static_cast<int>(theta.rows()); }
  int num_regions() const { return static_cast<int>(theta.cols()); }

  /// Checks shapes and that every column of theta and w lie on the
  /// probability simplex within `tol`.
  void validate(double tol = 1e-9) const;
};

template <class T>
void require(bool cond, const T& message) {
  if (!cond) throw std::invalid_argument(message);
}

}  // namespace teamseg
