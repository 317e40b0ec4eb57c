#include "discbench/bench.hpp"
#include "discbench/errors.hpp"
#include "discbench/synthetic.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include <unistd.h>

using namespace discbench;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

ReducerConfig method(Method m) {
  ReducerConfig c;
  c.method = m;
  return c;
}

std::map<std::string, std::vector<double>> accuracy_by_method(const std::vector<TrialRecord>& rows) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& r : rows) out[r.method].push_back(r.accuracy);
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("discbench_bench_" + std::to_string(::getpid()) + "_" + name);
}

FeatureDataset separable_four() {
  FeatureDataset ds;
  ds.num_classes = 2;
  ds.features.resize(4, 2);
  ds.features << -2, -1, -1, -2, 2, 1, 1, 2;
  ds.labels = {0, 0, 1, 1};
  return ds;
}

}  // namespace

TEST_CASE("full method on a separable toy set") {
  const FeatureDataset ds = separable_four();
  const TrialRecord r = run_trial(method(Method::full), ds, ds, 0);
  CHECK(r.status == "ok");
  CHECK(r.accuracy == 1.0);
  CHECK(r.out_dim == 2);
  CHECK(r.total_seconds >= r.fit_seconds + r.train_seconds - 1e-6);
}

TEST_CASE("trials are deterministic and timing can be switched off") {
  SyntheticSpec spec;
  spec.num_classes = 4;
  spec.dim = 12;
  spec.informative_dims = 3;
  const SyntheticTask task(spec);
  const FeatureDataset train = task.sample(30, 0), test = task.sample(30, 1);
  TrialOptions quiet;
  quiet.timing = false;
  for (Method m : kAllMethods) {
    const TrialRecord a = run_trial(method(m), train, test, 3, quiet), b = run_trial(method(m), train, test, 3, quiet);
    CHECK(a.status == "ok");
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.out_dim == b.out_dim);
    CHECK(a.total_seconds == 0.0);
    CHECK(format_record(a) == format_record(b));
  }
}

TEST_CASE("trial failures are tagged by stage") {
  const FeatureDataset ds = separable_four();
  FeatureDataset other = ds;
  other.features = Matrix::Zero(4, 3);
  CHECK_THROWS_AS(run_trial(method(Method::lda), ds, other, 0), TrialError);

  ReducerConfig too_big = method(Method::lda);
  too_big.out_dim = 5;
  const auto rows = run_suite({too_big}, ds, ds, {0});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "error:fit");

  FeatureDataset lonely = ds;
  lonely.labels = {0, 1, 1, 1};
  CHECK(run_suite({method(Method::lda)}, lonely, ds, {0})[0].status == "degenerate");
}

TEST_CASE("suite cardinality, ordering and zero variance of deterministic methods") {
  SyntheticSpec spec;
  spec.num_classes = 5;
  spec.dim = 16;
  spec.informative_dims = 4;
  const SyntheticTask task(spec);
  const FeatureDataset train = task.sample(40, 0), test = task.sample(40, 1);
  const std::vector<ReducerConfig> methods = {method(Method::lda), method(Method::pca), method(Method::full)};
  const auto rows = run_suite(methods, train, test, kDefaultSeeds);
  REQUIRE(rows.size() == 15);
  CHECK(rows[0].method == "lda");
  CHECK(rows[5].method == "pca");
  CHECK(rows[14].seed == 4);
  for (const auto& [name, acc] : accuracy_by_method(rows))
    for (double a : acc) CHECK(a == acc.front());

  SuiteOptions parallel;
  parallel.trial.timing = false;
  parallel.threads = 3;
  const auto again = run_suite(methods, train, test, kDefaultSeeds, parallel);
  REQUIRE(again.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].method == rows[i].method);
    CHECK(again[i].seed == rows[i].seed);
    CHECK(again[i].accuracy == rows[i].accuracy);
  }
  CHECK_THROWS_AS(run_suite(methods, train, test, {}), ArgumentError);
}

TEST_CASE("LDA reaches the Bayes rate on shared-covariance Gaussians") {
  SyntheticSpec spec;
  spec.num_classes = 3;
  spec.dim = 20;
  spec.informative_dims = 2;
  spec.separation = 1.2;
  spec.seed = 11;
  const SyntheticTask task(spec);
  const FeatureDataset train = task.sample(500, 0), test = task.sample(4000, 1);

  // Identity covariance and equal priors: the Bayes rule is the nearest true mean.
  const FeatureDataset mc = task.sample(40000, 2);
  int hits = 0;
  for (Eigen::Index i = 0; i < mc.size(); ++i) {
    Eigen::Index best;
    (task.means().rowwise() - mc.features.row(i)).rowwise().squaredNorm().minCoeff(&best);
    hits += static_cast<int>(best) == mc.labels[static_cast<std::size_t>(i)];
  }
  const double bayes = static_cast<double>(hits) / static_cast<double>(mc.size());
  const TrialRecord r = run_trial(method(Method::lda), train, test, 0);
  MESSAGE("bayes " << bayes << " lda " << r.accuracy);
  CHECK(bayes > 0.6);
  CHECK(bayes < 0.95);
  CHECK(std::abs(r.accuracy - bayes) < 0.02);
}

TEST_CASE("fraction sweep bookkeeping") {
  SyntheticSpec spec;
  spec.num_classes = 3;
  spec.dim = 6;
  spec.informative_dims = 2;
  const SyntheticTask task(spec);
  const FeatureDataset train = task.sample(20, 0), test = task.sample(20, 1);
  const std::vector<ReducerConfig> methods = {method(Method::lda), method(Method::full)};

  const auto whole = sweep_fraction(methods, train, test, {1.0}, {0});
  const auto suite = run_suite(methods, train, test, {0});
  REQUIRE(whole.size() == suite.size());
  for (std::size_t i = 0; i < whole.size(); ++i) {
    CHECK(whole[i].method == suite[i].method);
    CHECK(whole[i].accuracy == suite[i].accuracy);
    CHECK(whole[i].fraction == 1.0);
  }

  const auto rows = sweep_fraction(methods, train, test, kDefaultFractions, {0, 1, 2});
  CHECK(rows.size() == 4 * 3 * 2);
  // 10% of 20 per class leaves 2 samples, enough for LDA.
  for (const auto& r : rows) CHECK(r.status == "ok");

  const auto tiny = sweep_fraction(methods, train, test, {0.05}, {0});
  for (const auto& r : tiny) {
    CHECK(r.status == "degenerate");
    CHECK(r.fraction == 0.05);
  }
  CHECK_THROWS_AS(sweep_fraction(methods, train, test, {0.0}, {0}), ArgumentError);
}

TEST_CASE("full features beat LDA on little data and LDA wins with all of it") {
  SyntheticSpec spec;
  spec.num_classes = 10;
  spec.dim = 200;
  spec.informative_dims = 9;
  spec.separation = 0.8;
  spec.seed = 5;
  const SyntheticTask task(spec);
  const FeatureDataset train = task.sample(500, 0), test = task.sample(200, 1);
  SuiteOptions opts;
  opts.trial.timing = false;
  const auto rows = sweep_fraction({method(Method::full), method(Method::lda)}, train, test, {0.1, 1.0}, {0}, opts);
  std::map<std::pair<double, std::string>, double> acc;
  for (const auto& r : rows) acc[{r.fraction, r.method}] = r.accuracy;
  MESSAGE("10%: full " << acc[{0.1, "full"}] << " lda " << acc[{0.1, "lda"}]);
  MESSAGE("100%: full " << acc[{1.0, "full"}] << " lda " << acc[{1.0, "lda"}]);
  CHECK(acc[{0.1, "full"}] > acc[{0.1, "lda"}]);
  CHECK(acc[{1.0, "lda"}] > acc[{1.0, "full"}]);
}

TEST_CASE("dimension sweep is monotone for LDA") {
  SyntheticSpec spec;
  spec.num_classes = 10;
  spec.dim = 32;
  spec.informative_dims = 9;
  spec.separation = 0.9;
  spec.seed = 3;
  const SyntheticTask task(spec);
  const FeatureDataset train = task.sample(200, 0), test = task.sample(300, 1);
  SuiteOptions opts;
  opts.trial.timing = false;
  const std::vector<int> dims = {1, 2, 3, 5, 7, 9};
  const auto rows = sweep_dims({method(Method::lda)}, train, test, dims, {0}, opts);
  REQUIRE(rows.size() == dims.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].out_dim == dims[i]);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].accuracy >= rows[i - 1].accuracy - 0.005);

  const auto over = sweep_dims({method(Method::lda)}, train, test, {9, 12}, {0}, opts);
  CHECK(over[0].status == "ok");
  CHECK(over[1].status == "error:fit");
  CHECK(over[1].out_dim == 12);
  CHECK(kDefaultSweepDims == std::vector<int>{5, 10, 20, 40, 60, 80, 99});
}

TEST_CASE("results CSV round trip and header handling") {
  const fs::path path = temp_path("results.csv");
  fs::remove(path);
  TrialRecord a;
  a.method = "lda";
  a.backbone = "resnet,18";
  a.dataset = "say \"hi\"";
  a.seed = 4;
  a.fraction = 0.25;
  a.out_dim = 99;
  a.accuracy = 0.6697;
  a.fit_seconds = 1.5;
  a.train_seconds = 2.25;
  a.total_seconds = 3.75;
  TrialRecord b = a;
  b.status = "error:fit";
  append_results(path, {a});
  append_results(path, {b});
  {
    std::ifstream in(path);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == kResultsHeader);
    CHECK(first == "lda,\"resnet,18\",\"say \"\"hi\"\"\",4,0.250000,99,0.669700,1.500000,2.250000,3.750000,ok");
  }
  const auto back = read_results(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].backbone == "resnet,18");
  CHECK(back[0].dataset == "say \"hi\"");
  CHECK(back[0].accuracy == 0.6697);
  CHECK(back[1].status == "error:fit");
  fs::remove(path);

  {
    std::ofstream bad(path);
    bad << "not,a,header\n";
  }
  CHECK_THROWS_AS(append_results(path, {a}), FormatError);
  CHECK_THROWS_AS(read_results(path), FormatError);
  fs::remove(path);
  CHECK_THROWS_AS(read_results(path), IoError);
}
