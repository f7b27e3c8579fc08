#include "teamseg/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <json.hpp>

#include "teamseg/imgio.hpp"
#include "teamseg/rng.hpp"

namespace teamseg {

using nlohmann::json;

namespace {

struct Offset {
  int dy, dx;
};

// Half of the L1 ring: each unordered pair {x, x + o} appears exactly once.
std::vector<Offset> half_ring(int r) {
  std::vector<Offset> out{{0, r}};
  for (int dy = 1; dy <= r; ++dy) {
    const int dx = r - dy;
    out.push_back({dy, dx});
    if (dx != 0) out.push_back({dy, -dx});
  }
  return out;
}

std::vector<Offset> full_ring(int r) {
  std::vector<Offset> out;
  for (auto o : half_ring(r)) {
    out.push_back(o);
    out.push_back({-o.dy, -o.dx});
  }
  return out;
}

std::vector<Offset> pair_offsets(int r, BetaMode mode, bool full) {
  if (mode == BetaMode::axis) return {{0, r}, {r, 0}};
  return full ? full_ring(r) : half_ring(r);
}

void check_distance(const DiscreteImage& img, int r) {
  img.validate();
  require(r >= 1, "distance r must be at least 1");
}

std::vector<int> slot_table(int palette_size, const std::vector<int>& colors) {
  std::vector<int> slot(palette_size, -1);
  for (std::size_t s = 0; s < colors.size(); ++s) slot[colors[s]] = static_cast<int>(s);
  return slot;
}

// Accumulates (slot, i, j) increments as packed keys and turns them into
// one sparse count matrix per slot.
class TripleAccumulator {
 public:
  TripleAccumulator(int palette_size, const std::vector<int>& colors)
      : L_(static_cast<std::uint64_t>(palette_size)), slot_(slot_table(palette_size, colors)),
        num_slices_(colors.size()) {}

  void reserve(std::size_t n) { keys_.reserve(n); }

  void add(int v1, int v2, int v3) {
    if (const int s = slot_[v1]; s >= 0) push_pair(s, v2, v3);
    if (const int s = slot_[v2]; s >= 0) push_pair(s, v1, v3);
    if (const int s = slot_[v3]; s >= 0) push_pair(s, v1, v2);
  }

  std::vector<GammaSlice> finish() {
    std::sort(keys_.begin(), keys_.end());
    std::vector<std::vector<Eigen::Triplet<double>>> triplets(num_slices_);
    for (std::size_t i = 0; i < keys_.size();) {
      std::size_t j = i;
      while (j < keys_.size() && keys_[j] == keys_[i]) ++j;
      const std::uint64_t key = keys_[i];
      const auto col = static_cast<int>(key % L_);
      const auto row = static_cast<int>((key / L_) % L_);
      const auto slot = static_cast<std::size_t>(key / (L_ * L_));
      triplets[slot].emplace_back(row, col, static_cast<double>(j - i));
      i = j;
    }
    std::vector<GammaSlice> out(num_slices_);
    for (std::size_t s = 0; s < num_slices_; ++s) {
      out[s].resize(static_cast<Eigen::Index>(L_), static_cast<Eigen::Index>(L_));
      out[s].setFromTriplets(triplets[s].begin(), triplets[s].end());
    }
    keys_.clear();
    return out;
  }

 private:
  void push_pair(int s, int a, int b) {
    const std::uint64_t base = static_cast<std::uint64_t>(s) * L_;
    keys_.push_back((base + a) * L_ + b);
    keys_.push_back((base + b) * L_ + a);
  }

  std::uint64_t L_;
  std::vector<int> slot_;
  std::size_t num_slices_;
  std::vector<std::uint64_t> keys_;
};

void check_gamma_args(const DiscreteImage& img, int r, int num_slices) {
  check_distance(img, r);
  require(num_slices >= 1, "slice count must be at least 1");
  require(num_slices <= img.palette_size, "slice count exceeds the palette size");
  require(img.width > r && img.height > r, "image must be at least (r+1) x (r+1) for triples");
}

Eigen::MatrixXd normalized(const CountMatrix& counts) {
  const double total = counts.sum();
  require(total > 0, "no valid pixel pair at this distance");
  return counts / total;
}

}  // namespace

std::string to_string(BetaMode mode) { return mode == BetaMode::ring ? "ring" : "axis"; }

BetaMode parse_beta_mode(const std::string& text) {
  if (text == "ring") return BetaMode::ring;
  if (text == "axis") return BetaMode::axis;
  throw std::invalid_argument("beta mode must be 'ring' or 'axis', got '" + text + "'");
}

void MomentEstimates::validate() const {
  require(palette_size >= 1, "moments need L >= 1");
  require(alpha.size() == palette_size, "alpha length must equal L");
  require(beta.rows() == palette_size && beta.cols() == palette_size, "beta must be L x L");
  require(gamma_slices.size() == slice_colors.size(), "one gamma slice per slice color");
  require(static_cast<int>(slice_colors.size()) <= palette_size, "more slices than colors");
  std::vector<bool> seen(palette_size, false);
  for (int c : slice_colors) {
    require(c >= 0 && c < palette_size, "slice color outside the palette");
    require(!seen[c], "slice colors must be distinct");
    seen[c] = true;
  }
  for (const auto& s : gamma_slices) {
    require(s.rows() == palette_size && s.cols() == palette_size, "gamma slices must be L x L");
  }
}

Eigen::VectorXd estimate_alpha(const DiscreteImage& img) {
  img.validate();
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(img.palette_size);
  for (auto v : img.pixels) hist[v] += 1.0;
  return hist / static_cast<double>(img.size());
}

CountMatrix estimate_beta_counts(const DiscreteImage& img, int r, BetaMode mode) {
  check_distance(img, r);
  // Ring offsets cover each unordered pair once, but the ordered enumeration
  // would visit it from both ends.
  const double weight = mode == BetaMode::ring ? 2.0 : 1.0;
  CountMatrix counts = CountMatrix::Zero(img.palette_size, img.palette_size);
  for (const auto o : pair_offsets(r, mode, false)) {
    const int row_end = img.height - o.dy;
    const int col_begin = std::max(0, -o.dx);
    const int col_end = std::min(img.width, img.width - o.dx);
    for (int row = 0; row < row_end; ++row) {
      const auto* here = img.pixels.data() + static_cast<std::size_t>(row) * img.width;
      const auto* there = img.pixels.data() + static_cast<std::size_t>(row + o.dy) * img.width + o.dx;
      for (int col = col_begin; col < col_end; ++col) {
        const int a = here[col];
        const int b = there[col];
        counts(a, b) += weight;
        counts(b, a) += weight;
      }
    }
  }
  return counts;
}

Eigen::MatrixXd estimate_beta(const DiscreteImage& img, int r, BetaMode mode) {
  return normalized(estimate_beta_counts(img, r, mode));
}

std::vector<int> most_frequent_colors(const DiscreteImage& img, int count) {
  img.validate();
  require(count >= 0 && count <= img.palette_size, "slice count exceeds the palette size");
  std::vector<std::size_t> freq(img.palette_size, 0);
  for (auto v : img.pixels) ++freq[v];
  std::vector<int> order(img.palette_size);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return freq[a] > freq[b]; });
  order.resize(count);
  return order;
}

GammaEstimate estimate_gamma_slices(const DiscreteImage& img, int r, int num_slices) {
  check_gamma_args(img, r, num_slices);
  GammaEstimate out;
  out.slice_colors = most_frequent_colors(img, num_slices);
  TripleAccumulator acc(img.palette_size, out.slice_colors);
  acc.reserve(static_cast<std::size_t>(img.height - r) * (img.width - r) * 2);
  for (int row = 0; row + r < img.height; ++row) {
    for (int col = 0; col + r < img.width; ++col) {
      acc.add(img.at(row, col), img.at(row, col + r), img.at(row + r, col));
    }
  }
  out.slices = acc.finish();
  return out;
}

MomentEstimates estimate_moments(const DiscreteImage& img, int r, int num_slices, BetaMode mode) {
  check_gamma_args(img, r, num_slices);
  MomentEstimates m;
  m.palette_size = img.palette_size;
  m.distance = r;
  m.beta_mode = mode;
  m.alpha = estimate_alpha(img);
  m.beta = estimate_beta(img, r, mode);
  auto gamma = estimate_gamma_slices(img, r, num_slices);
  m.slice_colors = std::move(gamma.slice_colors);
  m.gamma_slices = std::move(gamma.slices);
  return m;
}

MomentEstimates sample_moments(const DiscreteImage& img, int r, int num_slices, BetaMode mode,
                               const SamplingOptions& options) {
  if (options.exhaustive) return estimate_moments(img, r, num_slices, mode);
  check_gamma_args(img, r, num_slices);
  require(options.num_pairs >= 1 && options.num_triples >= 1, "sample counts must be at least 1");

  MomentEstimates m;
  m.palette_size = img.palette_size;
  m.distance = r;
  m.beta_mode = mode;
  m.alpha = estimate_alpha(img);

  Rng rng(options.seed);
  const auto offsets = pair_offsets(r, mode, true);
  CountMatrix counts = CountMatrix::Zero(img.palette_size, img.palette_size);
  for (std::uint64_t drawn = 0; drawn < options.num_pairs;) {
    const auto pixel = rng.below(img.size());
    const auto& o = offsets[rng.below(offsets.size())];
    const int row = static_cast<int>(pixel / img.width) + o.dy;
    const int col = static_cast<int>(pixel % img.width) + o.dx;
    if (row < 0 || row >= img.height || col < 0 || col >= img.width) continue;
    const int a = img.pixels[pixel];
    const int b = img.at(row, col);
    counts(a, b) += 1.0;
    counts(b, a) += 1.0;
    ++drawn;
  }
  m.beta = normalized(counts);

  m.slice_colors = most_frequent_colors(img, num_slices);
  TripleAccumulator acc(img.palette_size, m.slice_colors);
  const std::uint64_t anchor_cols = static_cast<std::uint64_t>(img.width - r);
  const std::uint64_t anchors = static_cast<std::uint64_t>(img.height - r) * anchor_cols;
  for (std::uint64_t t = 0; t < options.num_triples; ++t) {
    const auto anchor = rng.below(anchors);
    const int row = static_cast<int>(anchor / anchor_cols);
    const int col = static_cast<int>(anchor % anchor_cols);
    acc.add(img.at(row, col), img.at(row, col + r), img.at(row + r, col));
  }
  m.gamma_slices = acc.finish();
  return m;
}

std::string serialize_moments(const MomentEstimates& m) {
  m.validate();
  json j;
  j["L"] = m.palette_size;
  j["r"] = m.distance;
  j["beta_mode"] = to_string(m.beta_mode);
  j["alpha"] = std::vector<double>(m.alpha.data(), m.alpha.data() + m.alpha.size());
  json beta = json::array();
  for (Eigen::Index i = 0; i < m.beta.rows(); ++i) {
    std::vector<double> row(m.beta.cols());
    for (Eigen::Index k = 0; k < m.beta.cols(); ++k) row[k] = m.beta(i, k);
    beta.push_back(std::move(row));
  }
  j["beta"] = std::move(beta);
  j["slice_colors"] = m.slice_colors;
  return j.dump();
}

MomentEstimates deserialize_moments(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("moments file is not valid JSON: ") + e.what());
  }
  for (const char* key : {"L", "r", "beta_mode", "alpha", "beta", "slice_colors"}) {
    if (!j.contains(key)) throw FormatError(std::string("moments file is missing field \"") + key + "\"");
  }
  MomentEstimates m;
  m.palette_size = j["L"].get<int>();
  m.distance = j["r"].get<int>();
  m.beta_mode = parse_beta_mode(j["beta_mode"].get<std::string>());
  const auto alpha = j["alpha"].get<std::vector<double>>();
  const auto beta = j["beta"].get<std::vector<std::vector<double>>>();
  if (static_cast<int>(alpha.size()) != m.palette_size || static_cast<int>(beta.size()) != m.palette_size) {
    throw FormatError("moment arrays do not match L");
  }
  m.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m.palette_size);
  m.beta.resize(m.palette_size, m.palette_size);
  for (int i = 0; i < m.palette_size; ++i) {
    if (static_cast<int>(beta[i].size()) != m.palette_size) throw FormatError("beta rows must have length L");
    for (int k = 0; k < m.palette_size; ++k) m.beta(i, k) = beta[i][k];
  }
  m.slice_colors = j["slice_colors"].get<std::vector<int>>();
  m.gamma_slices.assign(m.slice_colors.size(), GammaSlice(m.palette_size, m.palette_size));
  return m;
}

namespace {

constexpr char kSidecarMagic[8] = {'T', 'S', 'G', 'A', 'M', 'M', 'A', '1'};

template <class T>
void put_le(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double value) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, sizeof bits);
  put_le(out, bits);
}

class ByteReader {
 public:
  ByteReader(const std::string& bytes, std::size_t start) : bytes_(bytes), pos_(start) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw FormatError("gamma sidecar is truncated");
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  double get_f64() {
    const auto bits = get<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_;
};

}  // namespace

// Layout (little-endian): magic "TSGAMMA1", u32 L, u32 slice count, then per
// slice: i32 color, u64 nonzeros, and nonzeros x (u32 row, u32 col, f64 count)
// in column-major order.
std::string encode_gamma_sidecar(const MomentEstimates& m) {
  m.validate();
  std::string out(kSidecarMagic, sizeof kSidecarMagic);
  put_le(out, static_cast<std::uint32_t>(m.palette_size));
  put_le(out, static_cast<std::uint32_t>(m.slice_colors.size()));
  for (std::size_t s = 0; s < m.slice_colors.size(); ++s) {
    GammaSlice slice = m.gamma_slices[s];
    slice.makeCompressed();
    put_le(out, static_cast<std::int32_t>(m.slice_colors[s]));
    put_le(out, static_cast<std::uint64_t>(slice.nonZeros()));
    for (Eigen::Index col = 0; col < slice.outerSize(); ++col) {
      for (GammaSlice::InnerIterator it(slice, col); it; ++it) {
        put_le(out, static_cast<std::uint32_t>(it.row()));
        put_le(out, static_cast<std::uint32_t>(it.col()));
        put_f64(out, it.value());
      }
    }
  }
  return out;
}

void decode_gamma_sidecar(const std::string& bytes, MomentEstimates& m) {
  if (bytes.size() < sizeof kSidecarMagic || std::memcmp(bytes.data(), kSidecarMagic, sizeof kSidecarMagic) != 0) {
    throw FormatError("not a gamma sidecar file");
  }
  ByteReader in(bytes, sizeof kSidecarMagic);
  const auto L = static_cast<int>(in.get<std::uint32_t>());
  const auto count = in.get<std::uint32_t>();
  if (L != m.palette_size) throw FormatError("gamma sidecar palette size does not match moments");
  std::vector<int> colors;
  std::vector<GammaSlice> slices;
  for (std::uint32_t s = 0; s < count; ++s) {
    colors.push_back(in.get<std::int32_t>());
    const auto nnz = in.get<std::uint64_t>();
    if (nnz > in.remaining() / 16) throw FormatError("gamma sidecar is truncated");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(nnz);
    for (std::uint64_t e = 0; e < nnz; ++e) {
      const auto row = in.get<std::uint32_t>();
      const auto col = in.get<std::uint32_t>();
      const double v = in.get_f64();
      if (static_cast<int>(row) >= L || static_cast<int>(col) >= L) throw FormatError("gamma entry out of range");
      trip.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
    }
    GammaSlice slice(L, L);
    slice.setFromTriplets(trip.begin(), trip.end());
    slices.push_back(std::move(slice));
  }
  if (!m.slice_colors.empty() && colors != m.slice_colors) {
    throw FormatError("gamma sidecar slice colors do not match moments");
  }
  m.slice_colors = std::move(colors);
  m.gamma_slices = std::move(slices);
  m.validate();
}

}  // namespace teamseg
