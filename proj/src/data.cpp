#include "discbench/data.hpp"

#include "discbench/errors.hpp"
#include "discbench/random.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

namespace discbench {

void FeatureDataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1)
    throw DimensionError("dataset must have at least one sample and one feature");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw DimensionError("dataset has " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(features.rows()) + " rows");
  if (num_classes < 1) throw ArgumentError("dataset must declare at least one class");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw CorruptionError("label " + std::to_string(y) + " outside [0, " +
                            std::to_string(num_classes) + ")");
  if (!features.allFinite()) throw NumericError("dataset contains non-finite features");
}

std::vector<Eigen::Index> FeatureDataset::class_counts() const {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

namespace {

class ByteReader {
public:
  explicit ByteReader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32(const char* what) {
    require(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    require(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void require(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n)
      throw LengthError(std::string("feature file truncated while reading ") + what);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_str(std::vector<unsigned char>& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

std::uint32_t checked_u32(Eigen::Index v, const char* what) {
  if (v < 0 || static_cast<std::uint64_t>(v) > std::numeric_limits<std::uint32_t>::max())
    throw ArgumentError(std::string(what) + " does not fit the file header");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

FeatureDataset read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());

  if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, kFeatureMagic))
    throw FormatError(path.string() + ": bad magic, expected FZF1");
  ByteReader r(std::vector<unsigned char>(bytes.begin() + 4, bytes.end()));
  const std::uint32_t version = r.u32("version");
  if (version != kFeatureVersion)
    throw FormatError(path.string() + ": unsupported version " + std::to_string(version));

  FeatureDataset ds;
  ds.backbone_name = r.str("backbone name");
  ds.dataset_name = r.str("dataset name");
  const std::uint64_t n = r.u32("N");
  const std::uint64_t d = r.u32("D");
  const std::uint32_t c = r.u32("C");
  if (n == 0 || d == 0) throw FormatError(path.string() + ": empty dataset header");
  if (c == 0 || c > static_cast<std::uint32_t>(std::numeric_limits<int>::max()))
    throw FormatError(path.string() + ": invalid class count");
  ds.num_classes = static_cast<int>(c);

  r.require(n * d * 4 + n * 4, "payload");
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < d; ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(std::bit_cast<float>(r.u32("features")));
  ds.labels.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t y = r.u32("labels");
    if (y >= c)
      throw CorruptionError(path.string() + ": label " + std::to_string(y) + " at row " +
                            std::to_string(i) + " exceeds class count " + std::to_string(c));
    ds.labels[i] = static_cast<int>(y);
  }
  if (r.remaining() != 0) throw LengthError(path.string() + ": trailing bytes after payload");
  ds.validate();
  return ds;
}

void write_feature_file(const FeatureDataset& dataset, const std::filesystem::path& path) {
  dataset.validate();
  std::vector<unsigned char> out;
  out.reserve(64 + static_cast<std::size_t>(dataset.features.size()) * 4 + dataset.labels.size() * 4);
  out.insert(out.end(), std::begin(kFeatureMagic), std::end(kFeatureMagic));
  put_u32(out, kFeatureVersion);
  put_str(out, dataset.backbone_name);
  put_str(out, dataset.dataset_name);
  put_u32(out, checked_u32(dataset.size(), "N"));
  put_u32(out, checked_u32(dataset.dim(), "D"));
  put_u32(out, checked_u32(dataset.num_classes, "C"));
  for (Eigen::Index i = 0; i < dataset.size(); ++i)
    for (Eigen::Index j = 0; j < dataset.dim(); ++j)
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(dataset.features(i, j))));
  for (int y : dataset.labels) put_u32(out, static_cast<std::uint32_t>(y));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

FeatureDataset select_rows(const FeatureDataset& dataset, const std::vector<Eigen::Index>& indices) {
  FeatureDataset out;
  out.num_classes = dataset.num_classes;
  out.backbone_name = dataset.backbone_name;
  out.dataset_name = dataset.dataset_name;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), dataset.dim());
  out.labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.features.row(static_cast<Eigen::Index>(k)) = dataset.features.row(indices[k]);
    out.labels.push_back(dataset.labels[static_cast<std::size_t>(indices[k])]);
  }
  return out;
}

FeatureDataset stratified_subsample(const FeatureDataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw ArgumentError("subsample fraction must lie in (0, 1], got " + std::to_string(fraction));
  if (fraction == 1.0) return dataset;

  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(dataset.num_classes));
  for (Eigen::Index i = 0; i < dataset.size(); ++i)
    members[static_cast<std::size_t>(dataset.labels[static_cast<std::size_t>(i)])].push_back(i);

  SplitMix64 rng(seed);
  std::vector<Eigen::Index> keep;
  for (auto& idx : members) {
    if (idx.empty()) continue;
    const auto n_c = idx.size();
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n_c))));
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n_c - i));
      std::swap(idx[i], idx[j]);
    }
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
  }
  std::sort(keep.begin(), keep.end());
  return select_rows(dataset, keep);
}

Standardizer Standardizer::fit(const Matrix& features) {
  if (features.rows() < 1) throw ArgumentError("standardizer needs at least one row");
  Standardizer s;
  s.means = features.colwise().mean();
  const Matrix centered = features.rowwise() - s.means;
  s.stds = (centered.colwise().squaredNorm() / static_cast<double>(features.rows())).cwiseSqrt();
  for (Eigen::Index j = 0; j < s.stds.size(); ++j)
    if (!(s.stds(j) >= kMinStd)) s.stds(j) = 1.0;
  return s;
}

Matrix Standardizer::transform(const Matrix& features) const {
  if (features.cols() != means.size())
    throw DimensionError("standardizer fitted on " + std::to_string(means.size()) +
                         " columns, got " + std::to_string(features.cols()));
  return (features.rowwise() - means).array().rowwise() / stds.array();
}

}  // namespace discbench
