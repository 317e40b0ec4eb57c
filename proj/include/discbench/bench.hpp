#pragma once

#include "discbench/classifier.hpp"
#include "discbench/errors.hpp"
#include "discbench/data.hpp"
#include "discbench/reducers.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace discbench {

/// One (method, seed) outcome. Status is "ok", "degenerate" or "error:<stage>".
struct TrialRecord {
  std::string method;
  std::string backbone;
  std::string dataset;
  std::uint64_t seed = 0;
  double fraction = 1.0;
  int out_dim = 0;
  double accuracy = 0.0;
  double fit_seconds = 0.0;
  double train_seconds = 0.0;
  double total_seconds = 0.0;
  std::string status = "ok";
};

/// Failure inside a trial, tagged with the pipeline stage
/// (fit, transform, standardize, train, evaluate).
class TrialError : public Error {
public:
  TrialError(std::string stage, std::string message, bool degenerate)
      : Error(stage + ": " + message), stage_(std::move(stage)), degenerate_(degenerate) {}
  const std::string& stage() const { return stage_; }
  bool degenerate() const { return degenerate_; }

private:
  std::string stage_;
  bool degenerate_;
};

struct TrialOptions {
  TrainOptions classifier;
  bool timing = true;
};

/// fit -> transform train/test -> standardize on train -> train head -> test accuracy.
TrialRecord run_trial(const ReducerConfig& method, const FeatureDataset& train, const FeatureDataset& test,
                      std::uint64_t seed, const TrialOptions& options = {});

struct SuiteOptions {
  TrialOptions trial;
  /// Worker threads when timing is off; 0 means DISCBENCH_THREADS or all cores.
  /// Timing runs are always sequential.
  unsigned threads = 0;
};

/// Number of threads allowed by DISCBENCH_THREADS (all cores when unset).
unsigned configured_threads();

/// One record per (method, seed), ordered method-major. Failures become
/// tagged rows and the suite continues.
std::vector<TrialRecord> run_suite(const std::vector<ReducerConfig>& methods, const FeatureDataset& train,
                                   const FeatureDataset& test, const std::vector<std::uint64_t>& seeds,
                                   const SuiteOptions& options = {});

inline const std::vector<double> kDefaultFractions = {0.1, 0.25, 0.5, 1.0};
inline const std::vector<int> kDefaultSweepDims = {5, 10, 20, 40, 60, 80, 99};
inline const std::vector<std::uint64_t> kDefaultSeeds = {0, 1, 2, 3, 4};

/// Each seed is one repeat: it draws the stratified subsample and seeds the trial.
std::vector<TrialRecord> sweep_fraction(const std::vector<ReducerConfig>& methods, const FeatureDataset& train,
                                        const FeatureDataset& test, const std::vector<double>& fractions,
                                        const std::vector<std::uint64_t>& seeds, const SuiteOptions& options = {});

std::vector<TrialRecord> sweep_dims(const std::vector<ReducerConfig>& methods, const FeatureDataset& train,
                                    const FeatureDataset& test, const std::vector<int>& dims,
                                    const std::vector<std::uint64_t>& seeds, const SuiteOptions& options = {});

// Results CSV. Header (exact):
// method,backbone,dataset,seed,fraction,out_dim,accuracy,fit_seconds,train_seconds,total_seconds,status
inline constexpr const char* kResultsHeader =
    "method,backbone,dataset,seed,fraction,out_dim,accuracy,fit_seconds,train_seconds,total_seconds,status";

std::string format_record(const TrialRecord& r);
/// Appends rows, writing the header first when the file is new or empty.
void append_results(const std::filesystem::path& path, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_results(const std::filesystem::path& path);

}  // namespace discbench
