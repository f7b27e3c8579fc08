#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "teamseg/types.hpp"

namespace teamseg {

/// Raised for malformed or truncated anymap files and unreadable/unwritable
/// paths.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using AnyImage = std::variant<DiscreteImage, RgbImage>;

/// Reads a P2/P3/P5/P6 file. Graymaps become a DiscreteImage with
/// L = maxval + 1; pixmaps become an RgbImage (maxval must be 255).
AnyImage load_anymap(const std::filesystem::path& path);
AnyImage parse_anymap(const std::string& bytes);

/// Convenience wrappers that reject the other image kind.
DiscreteImage load_graymap(const std::filesystem::path& path);
RgbImage load_pixmap(const std::filesystem::path& path);

/// Writes binary P5 with maxval = max(L - 1, 1). Requires L <= 65536.
void save_graymap(const DiscreteImage& img, const std::filesystem::path& path);
std::string encode_graymap(const DiscreteImage& img);
void save_pixmap(const RgbImage& img, const std::filesystem::path& path);

/// Writes a viewable graymap with value floor(255 * label / (K - 1)),
/// all zeros when K = 1. Requires K <= 256.
void save_label_map(const Segmentation& seg, const std::filesystem::path& path);

/// Inverse of save_label_map. When `num_regions` is not given, K is the
/// number of distinct gray values; every value must sit on the scaling grid.
Segmentation load_label_map(const std::filesystem::path& path,
                            std::optional<int> num_regions = std::nullopt);

// Structured text (JSON) forms.
std::string serialize_model_set(const ModelSet& models);
ModelSet deserialize_model_set(const std::string& text);
void save_model_set(const ModelSet& models, const std::filesystem::path& path);
ModelSet load_model_set(const std::filesystem::path& path);

std::string serialize_segmentation(const Segmentation& seg);
Segmentation deserialize_segmentation(const std::string& text);

/// Loads a segmentation from either its exact JSON form (".json") or a
/// scaled label map.
Segmentation load_segmentation(const std::filesystem::path& path,
                               std::optional<int> num_regions = std::nullopt);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace teamseg
