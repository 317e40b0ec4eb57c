#include "discbench/bench.hpp"

#include "discbench/errors.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <thread>

namespace discbench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const DegenerateClassError& e) {
    throw TrialError(name, e.what(), true);
  } catch (const std::exception& e) {
    throw TrialError(name, e.what(), false);
  }
}

TrialRecord failed_record(const ReducerConfig& method, const FeatureDataset& train, std::uint64_t seed,
                          std::string status) {
  TrialRecord r;
  r.method = std::string(method_name(method.method));
  r.backbone = train.backbone_name;
  r.dataset = train.dataset_name;
  r.seed = seed;
  r.status = std::move(status);
  return r;
}

// Runs jobs[i]() into results[i]; parallel only when timing is off.
void execute(std::vector<std::function<TrialRecord()>>& jobs, std::vector<TrialRecord>& results,
             const SuiteOptions& options) {
  results.resize(jobs.size());
  unsigned workers = options.threads ? options.threads : configured_threads();
  if (options.trial.timing || workers <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i]();
    return;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = jobs[i]();
    });
}

TrialRecord guarded_trial(const ReducerConfig& method, const FeatureDataset& train, const FeatureDataset& test,
                          std::uint64_t seed, const TrialOptions& options) {
  try {
    return run_trial(method, train, test, seed, options);
  } catch (const TrialError& e) {
    return failed_record(method, train, seed, e.degenerate() ? "degenerate" : "error:" + e.stage());
  } catch (const std::exception&) {
    return failed_record(method, train, seed, "error:setup");
  }
}

}  // namespace

unsigned configured_threads() {
  if (const char* env = std::getenv("DISCBENCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

TrialRecord run_trial(const ReducerConfig& method, const FeatureDataset& train, const FeatureDataset& test,
                      std::uint64_t seed, const TrialOptions& options) {
  if (train.dim() != test.dim())
    throw TrialError("setup", "train has D=" + std::to_string(train.dim()) + ", test has D=" +
                                  std::to_string(test.dim()), false);
  if (train.num_classes != test.num_classes) throw TrialError("setup", "train and test disagree on C", false);

  ReducerConfig config = method;
  config.seed = seed;
  TrainOptions head = options.classifier;
  head.seed = seed;

  const auto t0 = Clock::now();
  const Projection projection = stage("fit", [&] { return fit(config, train); });
  const Matrix train_z = stage("transform", [&] { return transform(projection, train.features); });
  const Matrix test_z = stage("transform", [&] { return transform(projection, test.features); });
  const double fit_seconds = seconds_since(t0);

  const auto [train_s, test_s] = stage("standardize", [&] {
    const Standardizer s = Standardizer::fit(train_z);
    return std::pair{s.transform(train_z), s.transform(test_z)};
  });

  const auto t1 = Clock::now();
  const ClassifierModel model =
      stage("train", [&] { return train_classifier(train_s, train.labels, train.num_classes, head); });
  const double train_seconds = seconds_since(t1);

  const double acc = stage("evaluate", [&] { return accuracy(predict(model, test_s), test.labels); });
  const double total_seconds = seconds_since(t0);

  TrialRecord r;
  r.method = std::string(method_name(method.method));
  r.backbone = train.backbone_name;
  r.dataset = train.dataset_name;
  r.seed = seed;
  r.out_dim = static_cast<int>(projection.out_dim());
  r.accuracy = acc;
  if (options.timing) {
    r.fit_seconds = fit_seconds;
    r.train_seconds = train_seconds;
    r.total_seconds = total_seconds;
  }
  return r;
}

std::vector<TrialRecord> run_suite(const std::vector<ReducerConfig>& methods, const FeatureDataset& train,
                                   const FeatureDataset& test, const std::vector<std::uint64_t>& seeds,
                                   const SuiteOptions& options) {
  if (seeds.empty()) throw ArgumentError("run_suite: seed list is empty");
  if (methods.empty()) throw ArgumentError("run_suite: method list is empty");
  std::vector<std::function<TrialRecord()>> jobs;
  for (const auto& m : methods)
    for (auto seed : seeds)
      jobs.emplace_back([&, m, seed] { return guarded_trial(m, train, test, seed, options.trial); });
  std::vector<TrialRecord> out;
  execute(jobs, out, options);
  return out;
}

std::vector<TrialRecord> sweep_fraction(const std::vector<ReducerConfig>& methods, const FeatureDataset& train,
                                        const FeatureDataset& test, const std::vector<double>& fractions,
                                        const std::vector<std::uint64_t>& seeds, const SuiteOptions& options) {
  if (fractions.empty()) throw ArgumentError("sweep_fraction: fraction list is empty");
  if (seeds.empty()) throw ArgumentError("sweep_fraction: seed list is empty");
  if (methods.empty()) throw ArgumentError("sweep_fraction: method list is empty");
  for (double f : fractions)
    if (!(f > 0.0) || f > 1.0) throw ArgumentError("sweep_fraction: fractions must lie in (0, 1]");

  // Subsamples are built up front so parallel jobs only read shared data.
  std::vector<FeatureDataset> subsets;
  std::vector<std::pair<double, std::uint64_t>> keys;
  for (double f : fractions)
    for (auto seed : seeds) {
      subsets.push_back(stratified_subsample(train, f, seed));
      keys.emplace_back(f, seed);
    }

  std::vector<std::function<TrialRecord()>> jobs;
  for (std::size_t s = 0; s < subsets.size(); ++s)
    for (const auto& m : methods)
      jobs.emplace_back([&, s, m] {
        const auto [fraction, seed] = keys[s];
        const FeatureDataset& sub = subsets[s];
        TrialRecord r;
        bool too_small = false;
        for (auto count : sub.class_counts()) too_small |= count < 2;
        if (too_small) r = failed_record(m, sub, seed, "degenerate");
        else r = guarded_trial(m, sub, test, seed, options.trial);
        r.fraction = fraction;
        return r;
      });
  std::vector<TrialRecord> out;
  execute(jobs, out, options);
  return out;
}

std::vector<TrialRecord> sweep_dims(const std::vector<ReducerConfig>& methods, const FeatureDataset& train,
                                    const FeatureDataset& test, const std::vector<int>& dims,
                                    const std::vector<std::uint64_t>& seeds, const SuiteOptions& options) {
  if (dims.empty()) throw ArgumentError("sweep_dims: dimension list is empty");
  if (seeds.empty()) throw ArgumentError("sweep_dims: seed list is empty");
  if (methods.empty()) throw ArgumentError("sweep_dims: method list is empty");
  std::vector<std::function<TrialRecord()>> jobs;
  for (int d : dims)
    for (const auto& m : methods)
      for (auto seed : seeds)
        jobs.emplace_back([&, d, m, seed] {
          ReducerConfig cfg = m;
          cfg.out_dim = d;
          TrialRecord r = guarded_trial(cfg, train, test, seed, options.trial);
          if (r.status != "ok") r.out_dim = d;
          return r;
        });
  std::vector<TrialRecord> out;
  execute(jobs, out, options);
  return out;
}

}  // namespace discbench
