#include "discbench/data.hpp"
#include "discbench/errors.hpp"
#include "discbench/random.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

using namespace discbench;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name)
      : path(fs::temp_directory_path() / ("discbench_test_" + std::to_string(::getpid()) + "_" + name)) {}
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

void le32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void lef32(std::vector<unsigned char>& out, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  le32(out, v);
}

// Header and payload assembled byte by byte, independent of the writer.
std::vector<unsigned char> handmade_file(std::uint32_t version = 1, std::uint32_t second_label = 1) {
  std::vector<unsigned char> b = {'F', 'Z', 'F', '1'};
  le32(b, version);
  le32(b, 2);
  b.push_back('r');
  b.push_back('n');
  le32(b, 3);
  b.push_back('c');
  b.push_back('1');
  b.push_back('0');
  le32(b, 2);
  le32(b, 3);
  le32(b, 2);
  for (float f : {1.f, 2.f, 3.f, 4.f, 5.f, 6.f}) lef32(b, f);
  le32(b, 0);
  le32(b, second_label);
  return b;
}

void dump(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream f(p, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// Reference SplitMix64 and the shuffle described for stratified subsampling,
// written out again so the library's RNG is checked against a separate copy.
struct RefRng {
  std::uint64_t s;
  std::uint64_t next() {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t reject_under = (~n + 1) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= reject_under) return r % n;
    }
  }
};

std::set<Eigen::Index> reference_subsample(const std::vector<int>& labels, int c, double f, std::uint64_t seed) {
  RefRng rng{seed};
  std::set<Eigen::Index> out;
  for (int cls = 0; cls < c; ++cls) {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(static_cast<Eigen::Index>(i));
    if (idx.empty()) continue;
    std::size_t m = static_cast<std::size_t>(f * static_cast<double>(idx.size()));
    if (m < 1) m = 1;
    for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
    out.insert(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
  }
  return out;
}

FeatureDataset toy_ten() {
  FeatureDataset ds;
  ds.num_classes = 2;
  ds.labels = {0, 0, 1, 0, 1, 1, 0, 1, 0, 1};
  ds.features.resize(10, 1);
  for (int i = 0; i < 10; ++i) ds.features(i, 0) = i;
  return ds;
}

std::vector<Eigen::Index> row_ids(const FeatureDataset& ds) {
  std::vector<Eigen::Index> ids;
  for (Eigen::Index i = 0; i < ds.size(); ++i) ids.push_back(static_cast<Eigen::Index>(ds.features(i, 0)));
  return ids;
}

}  // namespace

TEST_CASE("SplitMix64 matches the reference stream") {
  SplitMix64 a(1234567);
  RefRng b{1234567};
  for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
  // First output for seed 0 is a widely published constant.
  CHECK(SplitMix64(0).next() == 0xE220A8397B1DCDAFULL);
  SplitMix64 c(9);
  RefRng d{9};
  for (std::uint64_t n : {1ULL, 2ULL, 3ULL, 7ULL, 1000ULL, (1ULL << 63) + 5})
    for (int i = 0; i < 50; ++i) CHECK(c.bounded(n) == d.below(n));
}

TEST_CASE("SplitMix64 uniform and normal draws are sane") {
  SplitMix64 rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
  }
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("read_feature_file decodes a handmade file") {
  TempFile tf("hand.fzf");
  dump(tf.path, handmade_file());
  const FeatureDataset ds = read_feature_file(tf.path);
  CHECK(ds.backbone_name == "rn");
  CHECK(ds.dataset_name == "c10");
  CHECK(ds.num_classes == 2);
  REQUIRE(ds.size() == 2);
  REQUIRE(ds.dim() == 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(ds.features(i, j) == 1.0 + 3 * i + j);
  CHECK(ds.labels == Labels{0, 1});
}

TEST_CASE("writer output is byte-identical to the handmade layout") {
  TempFile tf("write.fzf");
  FeatureDataset ds;
  ds.backbone_name = "rn";
  ds.dataset_name = "c10";
  ds.num_classes = 2;
  ds.features.resize(2, 3);
  ds.features << 1, 2, 3, 4, 5, 6;
  ds.labels = {0, 1};
  write_feature_file(ds, tf.path);
  std::ifstream in(tf.path, std::ios::binary);
  std::vector<unsigned char> got((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(got == handmade_file());
}

TEST_CASE("feature file error paths") {
  TempFile tf("bad.fzf");
  SUBCASE("bad magic") {
    auto b = handmade_file();
    b[3] = '2';
    dump(tf.path, b);
    CHECK_THROWS_AS(read_feature_file(tf.path), FormatError);
  }
  SUBCASE("bad version") {
    dump(tf.path, handmade_file(2));
    CHECK_THROWS_AS(read_feature_file(tf.path), FormatError);
  }
  SUBCASE("label out of range") {
    dump(tf.path, handmade_file(1, 2));
    CHECK_THROWS_AS(read_feature_file(tf.path), CorruptionError);
  }
  SUBCASE("truncated payload") {
    auto b = handmade_file();
    b.resize(b.size() - 3);
    dump(tf.path, b);
    CHECK_THROWS_AS(read_feature_file(tf.path), LengthError);
  }
  SUBCASE("truncated header") {
    auto b = handmade_file();
    b.resize(10);
    dump(tf.path, b);
    CHECK_THROWS_AS(read_feature_file(tf.path), LengthError);
  }
  SUBCASE("trailing bytes") {
    auto b = handmade_file();
    b.push_back(0);
    dump(tf.path, b);
    CHECK_THROWS_AS(read_feature_file(tf.path), LengthError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_feature_file(tf.path.string() + ".missing"), IoError);
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(write_feature_file(toy_ten(), "/nonexistent_dir_discbench/x.fzf"), IoError);
  }
}

TEST_CASE("write then read is the identity on random datasets") {
  std::mt19937_64 rng(21);
  TempFile tf("roundtrip.fzf");
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 40);
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 17);
    const int c = 1 + static_cast<int>(rng() % 5);
    FeatureDataset ds = random_dataset(rng, n, d, c, 0);
    ds.backbone_name = "backbone-" + std::to_string(trial);
    ds.dataset_name = trial % 2 ? "" : "d\xc3\xa9j\xc3\xa0";
    // Storage is float32, so compare against the float-rounded input.
    ds.features = ds.features.cast<float>().cast<double>();
    write_feature_file(ds, tf.path);
    const FeatureDataset back = read_feature_file(tf.path);
    CHECK(back.features == ds.features);
    CHECK(back.labels == ds.labels);
    CHECK(back.num_classes == ds.num_classes);
    CHECK(back.backbone_name == ds.backbone_name);
    CHECK(back.dataset_name == ds.dataset_name);
  }
}

TEST_CASE("stratified_subsample frozen toy results") {
  const FeatureDataset ds = toy_ten();
  CHECK(row_ids(stratified_subsample(ds, 0.5, 42)) == std::vector<Eigen::Index>{4, 6, 7, 8});
  CHECK(row_ids(stratified_subsample(ds, 0.5, 7)) == std::vector<Eigen::Index>{1, 3, 4, 9});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto ids = row_ids(stratified_subsample(ds, 0.5, seed));
    const auto ref = reference_subsample(ds.labels, 2, 0.5, seed);
    CHECK(std::set<Eigen::Index>(ids.begin(), ids.end()) == ref);
    CHECK(std::is_sorted(ids.begin(), ids.end()));
  }
}

TEST_CASE("stratified_subsample edge cases") {
  const FeatureDataset ds = toy_ten();
  const FeatureDataset all = stratified_subsample(ds, 1.0, 3);
  CHECK(all.features == ds.features);
  CHECK(all.labels == ds.labels);
  CHECK_THROWS_AS(stratified_subsample(ds, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(stratified_subsample(ds, -0.5, 1), ArgumentError);
  CHECK_THROWS_AS(stratified_subsample(ds, 1.5, 1), ArgumentError);
  // Tiny fractions still keep one sample per class.
  CHECK(stratified_subsample(ds, 0.01, 1).class_counts() == std::vector<Eigen::Index>{1, 1});
}

TEST_CASE("stratified_subsample at CIFAR-100 scale keeps 50 per class") {
  FeatureDataset ds;
  ds.num_classes = 100;
  ds.features = Matrix::Zero(50000, 1);
  for (int i = 0; i < 50000; ++i) ds.labels.push_back(i % 100);
  const FeatureDataset sub = stratified_subsample(ds, 0.1, 0);
  CHECK(sub.size() == 5000);
  for (auto n : sub.class_counts()) CHECK(n == 50);
}

TEST_CASE("stratified_subsample per-class counts are exact") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int c = 1 + static_cast<int>(rng() % 6);
    const FeatureDataset ds = random_dataset(rng, 10 + static_cast<Eigen::Index>(rng() % 90), 2, c, 1);
    const double f = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    const FeatureDataset sub = stratified_subsample(ds, f, trial);
    const auto before = ds.class_counts(), after = sub.class_counts();
    for (std::size_t k = 0; k < before.size(); ++k) {
      const auto expect = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(f * static_cast<double>(before[k]))));
      CHECK(after[k] == expect);
    }
  }
}

TEST_CASE("Standardizer documented examples") {
  Matrix m(3, 2);
  m << 2, 0, 2, 2, 2, 1;
  const Standardizer s = Standardizer::fit(m);
  CHECK(s.means(0) == 2.0);
  CHECK(s.stds(0) == 1.0);
  const Matrix t = s.transform(m);
  CHECK(t.col(0).isZero());

  Matrix two(2, 1);
  two << 0, 2;
  const Standardizer s2 = Standardizer::fit(two);
  CHECK(s2.means(0) == 1.0);
  CHECK(s2.stds(0) == 1.0);
  const Matrix t2 = s2.transform(two);
  CHECK(t2(0, 0) == -1.0);
  CHECK(t2(1, 0) == 1.0);

  CHECK_THROWS_AS(s.transform(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("Standardizer output has zero mean and unit variance") {
  std::mt19937_64 rng(23);
  const Matrix m = gaussian_matrix(rng, 20, 4, 3.0).array() + 5.0;
  const Matrix t = Standardizer::fit(m).transform(m);
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(std::abs(t.col(j).mean()) < 1e-12);
    CHECK(std::abs(t.col(j).squaredNorm() / 20.0 - 1.0) < 1e-10);
  }
  const Standardizer again = Standardizer::fit(t);
  CHECK(again.means.cwiseAbs().maxCoeff() < 1e-10);
  CHECK((again.stds.array() - 1.0).abs().maxCoeff() < 1e-8);
}

TEST_CASE("FeatureDataset validation") {
  FeatureDataset ds = toy_ten();
  CHECK_NOTHROW(ds.validate());
  ds.labels[0] = 2;
  CHECK_THROWS_AS(ds.validate(), CorruptionError);
  ds = toy_ten();
  ds.labels.pop_back();
  CHECK_THROWS_AS(ds.validate(), DimensionError);
}
