#include "teamseg/imgio.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace teamseg {

using nlohmann::json;

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_int(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1L << 40)) throw FormatError(std::string("malformed header: ") + what + " too large");
      ++pos_;
    }
    if (pos_ == start) {
      if (pos_ >= bytes_.size()) throw FormatError(std::string("truncated payload while reading ") + what);
      throw FormatError(std::string("malformed header: expected ") + what);
    }
    return value;
  }

  // Exactly one whitespace byte separates the binary header from the payload.
  void end_binary_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("malformed header: missing separator before payload");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::vector<long> read_samples(const std::string& bytes, HeaderReader& in, bool binary,
                               std::size_t count, long maxval) {
  std::vector<long> out(count);
  if (binary) {
    in.end_binary_header();
    const std::size_t width = maxval > 255 ? 2 : 1;
    if (bytes.size() - in.pos() < count * width) {
      throw FormatError("truncated payload: expected " + std::to_string(count * width) +
                        " bytes, found " + std::to_string(bytes.size() - in.pos()));
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + in.pos();
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = width == 2 ? (long{p[2 * i]} << 8) | p[2 * i + 1] : long{p[i]};
    }
    in.advance(count * width);
  } else {
    for (std::size_t i = 0; i < count; ++i) out[i] = in.read_int("sample");
  }
  for (long v : out) {
    if (v > maxval) throw FormatError("sample exceeds maxval");
  }
  return out;
}

std::string graymap_bytes(int width, int height, long maxval, const std::vector<std::int32_t>& values) {
  std::ostringstream header;
  header << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
  std::string out = header.str();
  const bool wide = maxval > 255;
  out.reserve(out.size() + values.size() * (wide ? 2 : 1));
  for (auto v : values) {
    if (wide) out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

int label_to_gray(int label, int k) { return k > 1 ? (255 * label) / (k - 1) : 0; }

json theta_to_json(const ModelSet& models) {
  json theta = json::array();
  for (Eigen::Index k = 0; k < models.theta.cols(); ++k) {
    std::vector<double> col(models.theta.col(k).data(),
                            models.theta.col(k).data() + models.theta.rows());
    theta.push_back(col);
  }
  return theta;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

AnyImage parse_anymap(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("malformed header: missing magic number");
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw FormatError(std::string("malformed header: unsupported magic P") + kind);
  }
  HeaderReader in(bytes);
  in.advance(2);
  const long width = in.read_int("width");
  const long height = in.read_int("height");
  const long maxval = in.read_int("maxval");
  if (width <= 0 || height <= 0) throw FormatError("malformed header: zero dimension");
  if (maxval < 1 || maxval > 65535) throw FormatError("maxval outside [1, 65535]");
  if (width * height > (1L << 31)) throw FormatError("malformed header: image too large");

  const bool binary = kind == '5' || kind == '6';
  const bool color = kind == '3' || kind == '6';
  const std::size_t n = static_cast<std::size_t>(width) * height;
  const auto samples = read_samples(bytes, in, binary, color ? 3 * n : n, maxval);

  if (!color) {
    DiscreteImage img(static_cast<int>(width), static_cast<int>(height), static_cast<int>(maxval + 1));
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = static_cast<std::int32_t>(samples[i]);
    return img;
  }
  if (maxval != 255) throw FormatError("pixmaps must use maxval 255");
  RgbImage img(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t i = 0; i < n; ++i) {
    img.pixels[i] = Rgb{static_cast<std::uint8_t>(samples[3 * i]),
                        static_cast<std::uint8_t>(samples[3 * i + 1]),
                        static_cast<std::uint8_t>(samples[3 * i + 2])};
  }
  return img;
}

AnyImage load_anymap(const std::filesystem::path& path) { return parse_anymap(read_file(path)); }

DiscreteImage load_graymap(const std::filesystem::path& path) {
  auto img = load_anymap(path);
  if (auto* gray = std::get_if<DiscreteImage>(&img)) return std::move(*gray);
  throw FormatError(path.string() + " is a pixmap, expected a graymap");
}

RgbImage load_pixmap(const std::filesystem::path& path) {
  auto img = load_anymap(path);
  if (auto* rgb = std::get_if<RgbImage>(&img)) return std::move(*rgb);
  throw FormatError(path.string() + " is a graymap, expected a pixmap");
}

std::string encode_graymap(const DiscreteImage& img) {
  img.validate();
  require(img.palette_size <= 65536, "graymaps hold at most 65536 levels");
  return graymap_bytes(img.width, img.height, std::max(img.palette_size - 1, 1), img.pixels);
}

void save_graymap(const DiscreteImage& img, const std::filesystem::path& path) {
  write_file(path, encode_graymap(img));
}

void save_pixmap(const RgbImage& img, const std::filesystem::path& path) {
  img.validate();
  std::ostringstream header;
  header << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  std::string out = header.str();
  for (const auto& p : img.pixels) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  write_file(path, out);
}

void save_label_map(const Segmentation& seg, const std::filesystem::path& path) {
  seg.validate();
  require(seg.num_regions <= 256, "label maps support at most 256 regions");
  std::vector<std::int32_t> gray(seg.labels.size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = label_to_gray(seg.labels[i], seg.num_regions);
  write_file(path, graymap_bytes(seg.width, seg.height, 255, gray));
}

Segmentation load_label_map(const std::filesystem::path& path, std::optional<int> num_regions) {
  const auto img = load_graymap(path);
  std::set<int> values(img.pixels.begin(), img.pixels.end());
  const int k = num_regions.value_or(static_cast<int>(values.size()));
  if (k < 1 || k > 256) throw FormatError("label map region count out of range");
  std::map<int, int> gray_to_label;
  for (int label = 0; label < k; ++label) gray_to_label[label_to_gray(label, k)] = label;
  Segmentation seg(img.width, img.height, k);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    auto it = gray_to_label.find(img.pixels[i]);
    if (it == gray_to_label.end()) {
      throw FormatError("gray value " + std::to_string(img.pixels[i]) + " is not a label level for K=" +
                        std::to_string(k));
    }
    seg.labels[i] = it->second;
  }
  return seg;
}

std::string serialize_model_set(const ModelSet& models) {
  models.validate(1e-6);
  json j;
  j["L"] = models.num_colors();
  j["K"] = models.num_regions();
  j["theta"] = theta_to_json(models);
  j["w"] = std::vector<double>(models.w.data(), models.w.data() + models.w.size());
  return j.dump(1);
}

ModelSet deserialize_model_set(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model set is not valid JSON: ") + e.what());
  }
  for (const char* key : {"L", "K", "theta", "w"}) {
    if (!j.contains(key)) throw FormatError(std::string("model set is missing field \"") + key + "\"");
  }
  const int L = j["L"].get<int>();
  const int K = j["K"].get<int>();
  if (L < 1 || K < 1) throw FormatError("model set needs L >= 1 and K >= 1");
  const auto& theta = j["theta"];
  const auto& w = j["w"];
  if (!theta.is_array() || static_cast<int>(theta.size()) != K) throw FormatError("theta must hold K arrays");
  if (!w.is_array() || static_cast<int>(w.size()) != K) throw FormatError("w must have length K");
  ModelSet models;
  models.theta.resize(L, K);
  models.w.resize(K);
  for (int k = 0; k < K; ++k) {
    if (!theta[k].is_array() || static_cast<int>(theta[k].size()) != L) {
      throw FormatError("theta[" + std::to_string(k) + "] must have length L");
    }
    for (int i = 0; i < L; ++i) models.theta(i, k) = theta[k][i].get<double>();
    models.w[k] = w[k].get<double>();
  }
  try {
    models.validate(1e-6);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("simplex violation: ") + e.what());
  }
  return models;
}

void save_model_set(const ModelSet& models, const std::filesystem::path& path) {
  write_file(path, serialize_model_set(models) + "\n");
}

ModelSet load_model_set(const std::filesystem::path& path) { return deserialize_model_set(read_file(path)); }

std::string serialize_segmentation(const Segmentation& seg) {
  seg.validate();
  json j;
  j["width"] = seg.width;
  j["height"] = seg.height;
  j["K"] = seg.num_regions;
  j["labels"] = seg.labels;
  return j.dump();
}

Segmentation deserialize_segmentation(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("segmentation is not valid JSON: ") + e.what());
  }
  for (const char* key : {"width", "height", "K", "labels"}) {
    if (!j.contains(key)) throw FormatError(std::string("segmentation is missing field \"") + key + "\"");
  }
  Segmentation seg;
  seg.width = j["width"].get<int>();
  seg.height = j["height"].get<int>();
  seg.num_regions = j["K"].get<int>();
  seg.labels = j["labels"].get<std::vector<std::int32_t>>();
  try {
    seg.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return seg;
}

Segmentation load_segmentation(const std::filesystem::path& path, std::optional<int> num_regions) {
  if (path.extension() == ".json") {
    auto seg = deserialize_segmentation(read_file(path));
    if (num_regions && *num_regions != seg.num_regions) throw FormatError("segmentation K mismatch");
    return seg;
  }
  return load_label_map(path, num_regions);
}

}  // namespace teamseg
