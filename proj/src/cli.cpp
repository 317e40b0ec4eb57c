#include "discbench/cli.hpp"

#include "discbench/bench.hpp"
#include "discbench/errors.hpp"
#include "discbench/stats.hpp"
#include "discbench/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace discbench::cli {

namespace {

std::string normalize_key(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  return key;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Every option value is captured as text so a config file can fill whatever
// the command line left unset, then converted once.
struct Field {
  std::string key;
  std::string* value;
  CLI::Option* option;
};

struct Shared {
  std::string train, test, methods, seeds, out, config;
  bool no_timing = false;
  std::string rda_k = "auto", dsb_rounds = "2", lfda_k = "7", nca_max_iter = "50";
  std::string reg_c = "1.0", max_iter = "5000", out_dim = "max";
  std::string timing_text;  // config-only: "timing = false"
  std::vector<Field> fields;
  CLI::Option* no_timing_opt = nullptr;

  void add(CLI::App* app, const std::string& flag, std::string& target, const std::string& help) {
    auto* opt = app->add_option("--" + flag, target, help)->capture_default_str();
    fields.push_back({normalize_key(flag), &target, opt});
  }

  void register_common(CLI::App* app, const std::string& default_methods, const std::string& default_seeds) {
    methods = default_methods;
    seeds = default_seeds;
    out = "results.csv";
    add(app, "train", train, "Training feature file (FZF1)");
    add(app, "test", test, "Test feature file (FZF1)");
    add(app, "methods", methods, "Comma-separated methods: " + valid_method_names());
    add(app, "seeds", seeds, "Comma-separated integer seeds");
    add(app, "out", out, "Results CSV (rows are appended)");
    app->add_option("--config", config, "key = value config file; command-line flags take precedence");
    no_timing_opt = app->add_flag("--no-timing", no_timing, "Skip wall-clock timing and allow parallel trials");
    add(app, "rda-k", rda_k, "RDA residual components (auto: 20 if D <= 1024 else 30)");
    add(app, "dsb-rounds", dsb_rounds, "DSB boosting rounds");
    add(app, "lfda-k", lfda_k, "LFDA nearest neighbours");
    add(app, "nca-max-iter", nca_max_iter, "NCA gradient ascent iterations");
    add(app, "reg-c", reg_c, "Inverse L2 strength of the logistic head");
    add(app, "max-iter", max_iter, "Logistic head L-BFGS iteration cap");
    add(app, "out-dim", out_dim, "Projected dimension (max: C-1 for LDA-family methods)");
  }

  void apply_config() {
    if (config.empty()) return;
    const auto cfg = read_config_file(config);
    std::set<std::string> known;
    for (auto& f : fields) {
      known.insert(f.key);
      auto it = cfg.find(f.key);
      if (it != cfg.end() && f.option->count() == 0) *f.value = it->second;
    }
    known.insert("timing");
    known.insert("no_timing");
    for (const auto& [k, v] : cfg) {
      if (!known.count(k)) throw ArgumentError("config file " + config + ": unknown key '" + k + "'");
      if (no_timing_opt->count() == 0) {
        if (k == "timing") no_timing = (v == "false" || v == "0" || v == "off" || v == "no");
        if (k == "no_timing") no_timing = (v == "true" || v == "1" || v == "on" || v == "yes");
      }
    }
  }
};

template <typename T>
T parse_number(const std::string& text, const char* what) {
  std::istringstream is(trim(text));
  T v{};
  is >> v;
  if (!is || !is.eof()) throw ArgumentError(std::string("invalid ") + what + " '" + text + "'");
  return v;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& s : split_list(text)) {
    if (s.find('-') != std::string::npos) throw ArgumentError("seeds must be non-negative integers");
    out.push_back(parse_number<std::uint64_t>(s, "seed"));
  }
  if (out.empty()) throw ArgumentError("seed list is empty");
  return out;
}

std::vector<ReducerConfig> build_methods(const Shared& s) {
  ReducerConfig base;
  if (s.out_dim != "max") base.out_dim = parse_number<int>(s.out_dim, "out-dim");
  base.lfda_neighbors = parse_number<int>(s.lfda_k, "lfda-k");
  base.nca_max_iter = parse_number<int>(s.nca_max_iter, "nca-max-iter");
  base.dsb.rounds = parse_number<int>(s.dsb_rounds, "dsb-rounds");
  if (s.rda_k != "auto") base.rda.residual_components = parse_number<int>(s.rda_k, "rda-k");

  std::vector<ReducerConfig> out;
  for (const auto& name : split_list(s.methods)) {
    ReducerConfig c = base;
    c.method = parse_method(name);
    c.validate();
    out.push_back(c);
  }
  if (out.empty()) throw ArgumentError("method list is empty; valid methods: " + valid_method_names());
  return out;
}

SuiteOptions build_suite_options(const Shared& s) {
  SuiteOptions o;
  o.trial.timing = !s.no_timing;
  o.trial.classifier.reg_c = parse_number<double>(s.reg_c, "reg-c");
  o.trial.classifier.max_iter = parse_number<int>(s.max_iter, "max-iter");
  if (!(o.trial.classifier.reg_c > 0.0)) throw ArgumentError("reg-c must be positive");
  return o;
}

std::pair<FeatureDataset, FeatureDataset> load_pair(const Shared& s) {
  if (s.train.empty() || s.test.empty()) throw ArgumentError("--train and --test are required");
  FeatureDataset train = read_feature_file(s.train);
  FeatureDataset test = read_feature_file(s.test);
  if (train.dim() != test.dim()) throw ArgumentError("train and test feature dimensions differ");
  if (train.num_classes != test.num_classes) throw ArgumentError("train and test class counts differ");
  return {std::move(train), std::move(test)};
}

struct Summary {
  double mean = 0.0, sd = 0.0, seconds = 0.0;
  std::size_t ok = 0, total = 0;
};

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

// Accuracy summaries per (group label, method) in first-seen order.
void print_summary(std::ostream& out, const std::vector<TrialRecord>& records,
                   const std::function<std::string(const TrialRecord&)>& group) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<const TrialRecord*>> rows;
  for (const auto& r : records) {
    auto key = std::pair{group(r), r.method};
    if (!rows.count(key)) order.push_back(key);
    rows[key].push_back(&r);
  }
  out << std::left << std::setw(18) << "group" << std::setw(10) << "method" << std::setw(18) << "accuracy (%)"
      << std::setw(12) << "time (s)" << "ok/runs\n";
  for (const auto& key : order) {
    Summary s;
    std::vector<double> acc;
    for (const auto* r : rows[key]) {
      ++s.total;
      if (r->status != "ok") continue;
      ++s.ok;
      acc.push_back(r->accuracy);
      s.seconds += r->total_seconds;
    }
    std::string acc_text = "-";
    std::string time_text = "-";
    if (!acc.empty()) {
      for (double a : acc) s.mean += a;
      s.mean /= static_cast<double>(acc.size());
      for (double a : acc) s.sd += (a - s.mean) * (a - s.mean);
      s.sd = std::sqrt(s.sd / static_cast<double>(acc.size()));
      acc_text = percent(s.mean) + " +/- " + percent(s.sd);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", s.seconds / static_cast<double>(acc.size()));
      time_text = buf;
    }
    out << std::left << std::setw(18) << key.first << std::setw(10) << key.second << std::setw(18) << acc_text
        << std::setw(12) << time_text << s.ok << "/" << s.total << "\n";
  }
}

int finish(const std::vector<TrialRecord>& records, const Shared& s, std::ostream& out, bool degenerate_is_error) {
  append_results(s.out, records);
  out << "wrote " << records.size() << " rows to " << s.out << "\n";
  for (const auto& r : records)
    if (r.status.rfind("error:", 0) == 0 || (degenerate_is_error && r.status != "ok")) return 2;
  return 0;
}

std::string dataset_group(const TrialRecord& r) { return r.backbone + "/" + r.dataset; }

int cmd_run(Shared& s, std::ostream& out) {
  s.apply_config();
  const auto methods = build_methods(s);
  const auto seeds = parse_seeds(s.seeds);
  const auto options = build_suite_options(s);
  const auto [train, test] = load_pair(s);
  const auto records = run_suite(methods, train, test, seeds, options);
  print_summary(out, records, [](const TrialRecord& r) { return r.backbone.empty() ? std::string("-") : r.backbone; });
  return finish(records, s, out, true);
}

int cmd_sweep_dims(Shared& s, const std::string& dims_text, std::ostream& out) {
  s.apply_config();
  std::vector<int> dims;
  for (const auto& d : split_list(dims_text)) dims.push_back(parse_number<int>(d, "dimension"));
  if (dims.empty()) throw ArgumentError("dimension list is empty");
  const auto methods = build_methods(s);
  const auto seeds = parse_seeds(s.seeds);
  const auto options = build_suite_options(s);
  const auto [train, test] = load_pair(s);
  const auto records = sweep_dims(methods, train, test, dims, seeds, options);
  print_summary(out, records, [](const TrialRecord& r) { return "d=" + std::to_string(r.out_dim); });
  return finish(records, s, out, false);
}

int cmd_sweep_fraction(Shared& s, const std::string& fractions_text, int repeats, CLI::Option* seeds_opt,
                       std::ostream& out) {
  std::vector<double> fractions;
  for (const auto& f : split_list(fractions_text)) fractions.push_back(parse_number<double>(f, "fraction"));
  if (fractions.empty()) throw ArgumentError("fraction list is empty");
  if (repeats < 1) throw ArgumentError("repeats must be >= 1");
  std::vector<std::uint64_t> seeds;
  if (seeds_opt->count() > 0 || s.seeds != "0,1,2") {
    seeds = parse_seeds(s.seeds);
    if (seeds.size() < static_cast<std::size_t>(repeats))
      throw ArgumentError("need at least " + std::to_string(repeats) + " seeds for " + std::to_string(repeats) +
                          " repeats");
    seeds.resize(static_cast<std::size_t>(repeats));
  } else {
    for (int r = 0; r < repeats; ++r) seeds.push_back(static_cast<std::uint64_t>(r));
  }
  const auto methods = build_methods(s);
  const auto options = build_suite_options(s);
  const auto [train, test] = load_pair(s);
  const auto records = sweep_fraction(methods, train, test, fractions, seeds, options);
  print_summary(out, records, [](const TrialRecord& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frac=%.2f", r.fraction);
    return std::string(buf);
  });
  return finish(records, s, out, false);
}

std::string format_p(double p) {
  char buf[32];
  if (p < 0.001) return "<.001";
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

int cmd_significance(const std::string& path, const std::string& baseline, const std::string& out_csv,
                     std::ostream& out, std::ostream& err) {
  const auto records = read_results(path);
  // group -> method -> seed -> accuracy
  using SeedMap = std::map<std::uint64_t, double>;
  std::map<std::string, std::map<std::string, SeedMap>> groups;
  std::map<std::string, std::tuple<std::string, std::string, double>> group_keys;
  for (const auto& r : records) {
    if (r.status != "ok") continue;
    char frac[32];
    std::snprintf(frac, sizeof frac, "%.6f", r.fraction);
    const std::string g = r.backbone + "\x1f" + r.dataset + "\x1f" + frac + "\x1f" + std::to_string(r.out_dim);
    group_keys[g] = {r.backbone, r.dataset, r.fraction};
    groups[g][r.method][r.seed] = r.accuracy;
  }

  // Baselines and compared methods may carry different out_dim (e.g. full vs lda), so
  // collapse the out_dim component when matching against the baseline.
  std::map<std::string, std::map<std::string, SeedMap>> merged;
  for (auto& [g, methods] : groups) {
    const std::string key = g.substr(0, g.rfind('\x1f'));
    for (auto& [m, seeds] : methods)
      for (auto& [seed, acc] : seeds) merged[key][m][seed] = acc;
    group_keys[key] = group_keys[g];
  }

  bool found = false;
  std::ostringstream csv;
  csv << "backbone,dataset,fraction,method,baseline,n_seeds,mean_delta,t_stat,t_p_value,wilcoxon_p_value\n";
  out << std::left << std::setw(28) << "group" << std::setw(10) << "method" << std::setw(10) << "delta(%)"
      << std::setw(10) << "t p" << std::setw(12) << "wilcoxon p" << "n\n";
  for (auto& [key, methods] : merged) {
    auto base_it = methods.find(baseline);
    if (base_it == methods.end()) continue;
    found = true;
    const auto& [backbone, dataset, fraction] = group_keys[key];
    for (auto& [m, seeds] : methods) {
      if (m == baseline) continue;
      // Deltas in whole micro-units (the CSV precision) so equal deltas compare exactly.
      std::vector<double> a, b;
      for (auto& [seed, acc] : seeds) {
        auto it = base_it->second.find(seed);
        if (it == base_it->second.end()) continue;
        const long long micro = std::llround(acc * 1e6) - std::llround(it->second * 1e6);
        a.push_back(static_cast<double>(micro) / 1e4);
        b.push_back(0.0);
      }
      if (a.size() < 2) {
        err << "skipping " << m << " in " << backbone << "/" << dataset << ": fewer than 2 paired seeds\n";
        continue;
      }
      const TTestResult t = paired_t_test(a, b);
      const double w = wilcoxon_signed_rank(a, b);
      double delta = 0.0;
      for (double x : a) delta += x;
      delta /= static_cast<double>(a.size());
      char dbuf[32];
      std::snprintf(dbuf, sizeof dbuf, "%+.2f", delta);
      out << std::left << std::setw(28) << (backbone + "/" + dataset) << std::setw(10) << m << std::setw(10) << dbuf
          << std::setw(10) << format_p(t.p_value) << std::setw(12) << format_p(w) << a.size() << "\n";
      char row[512];
      std::snprintf(row, sizeof row, "%s,%s,%.6f,%s,%s,%zu,%.6f,%.6f,%.6g,%.6g\n", backbone.c_str(), dataset.c_str(),
                    fraction, m.c_str(), baseline.c_str(), a.size(), delta, t.t_stat, t.p_value, w);
      csv << row;
    }
  }
  if (!found) {
    err << "baseline method '" << baseline << "' not present in " << path << "\n";
    return 1;
  }
  if (!out_csv.empty()) {
    std::ofstream f(out_csv, std::ios::trunc);
    if (!f) throw IoError("cannot write " + out_csv);
    f << csv.str();
  }
  return 0;
}

std::vector<ParetoEntry> averaged_entries(const std::vector<const TrialRecord*>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::tuple<double, double, std::size_t>> sums;
  for (const auto* r : rows) {
    if (!sums.count(r->method)) order.push_back(r->method);
    auto& [acc, sec, n] = sums[r->method];
    acc += r->accuracy;
    sec += r->total_seconds;
    ++n;
  }
  std::vector<ParetoEntry> entries;
  for (const auto& m : order) {
    const auto& [acc, sec, n] = sums[m];
    entries.push_back({m, acc / static_cast<double>(n), sec / static_cast<double>(n), false});
  }
  return entries;
}

int cmd_pareto(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto records = read_results(path);
  std::vector<const TrialRecord*> ok;
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    if (r.status != "ok") continue;
    ok.push_back(&r);
    const std::string g = dataset_group(r);
    if (!groups.count(g)) group_order.push_back(g);
    groups[g].push_back(&r);
  }
  if (ok.empty()) {
    err << path << ": no successful trials to analyse\n";
    return 1;
  }

  std::map<std::string, int> counts;
  if (groups.size() > 1)
    for (const auto& g : group_order)
      for (const auto& e : pareto_frontier(averaged_entries(groups[g])))
        counts[e.method] += e.dominated ? 0 : 1;

  const auto overall = pareto_frontier(averaged_entries(ok));
  out << std::left << std::setw(10) << "method" << std::setw(14) << "accuracy (%)" << std::setw(12) << "time (s)"
      << std::setw(8) << "pareto";
  if (groups.size() > 1) out << "pareto (/" << groups.size() << ")";
  out << "\n";
  for (const auto& e : overall) {
    char tbuf[32];
    std::snprintf(tbuf, sizeof tbuf, "%.3f", e.seconds);
    out << std::left << std::setw(10) << e.method << std::setw(14) << percent(e.accuracy) << std::setw(12) << tbuf
        << std::setw(8) << (e.dominated ? "no" : "yes");
    if (groups.size() > 1) out << counts[e.method];
    out << "\n";
  }
  return 0;
}

int cmd_synth(const SyntheticSpec& spec, int train_per_class, int test_per_class, const std::string& train_path,
              const std::string& test_path, std::ostream& out) {
  const SyntheticTask task(spec);
  write_feature_file(task.sample(train_per_class, 0), train_path);
  write_feature_file(task.sample(test_per_class, 1), test_path);
  out << "wrote " << train_path << " and " << test_path << "\n";
  return 0;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::map<std::string, std::string> cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ArgumentError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    cfg[normalize_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supervised dimensionality reduction benchmark for frozen features"};
  app.require_subcommand(1);

  const std::string roster = "full,pca,lda,pca_lda,rlda,lfda,nca,rda,dsb";
  Shared run_args, dims_args, frac_args;
  auto* run_cmd = app.add_subcommand("run", "Run every method over every seed and append results");
  run_args.register_common(run_cmd, roster, "0,1,2,3,4");

  auto* dims_cmd = app.add_subcommand("sweep-dims", "Sweep the projected dimension d");
  dims_args.register_common(dims_cmd, "lda,pca", "0,1,2");
  std::string dims_text = "5,10,20,40,60,80,99";
  auto* dims_opt = dims_cmd->add_option("--dims", dims_text, "Comma-separated dimensions")->capture_default_str();
  dims_args.fields.push_back({"dims", &dims_text, dims_opt});

  auto* frac_cmd = app.add_subcommand("sweep-fraction", "Sweep stratified training-set fractions");
  frac_args.register_common(frac_cmd, "full,pca,lda,dsb", "0,1,2");
  std::string fractions_text = "0.1,0.25,0.5,1.0";
  std::string repeats_text = "3";
  auto* frac_opt = frac_cmd->add_option("--fractions", fractions_text, "Comma-separated fractions in (0, 1]")
                       ->capture_default_str();
  auto* rep_opt = frac_cmd->add_option("--repeats", repeats_text, "Subsample repeats per fraction")->capture_default_str();
  frac_args.fields.push_back({"fractions", &fractions_text, frac_opt});
  frac_args.fields.push_back({"repeats", &repeats_text, rep_opt});
  CLI::Option* frac_seeds_opt = nullptr;
  for (auto& f : frac_args.fields)
    if (f.key == "seeds") frac_seeds_opt = f.option;

  auto* sig_cmd = app.add_subcommand("significance", "Paired t-test and Wilcoxon tests against a baseline");
  std::string sig_path, baseline = "lda", sig_out;
  sig_cmd->add_option("results", sig_path, "Results CSV")->required();
  sig_cmd->add_option("--baseline", baseline, "Baseline method")->capture_default_str();
  sig_cmd->add_option("--out", sig_out, "Write comparisons as CSV");

  auto* pareto_cmd = app.add_subcommand("pareto", "Accuracy/time Pareto analysis of a results CSV");
  std::string pareto_path;
  pareto_cmd->add_option("results", pareto_path, "Results CSV")->required();

  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic shared-covariance Gaussian train/test files");
  SyntheticSpec spec;
  int train_pc = 200, test_pc = 100;
  std::string synth_train = "synthetic_train.fzf", synth_test = "synthetic_test.fzf";
  synth_cmd->add_option("--classes", spec.num_classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--dim", spec.dim, "Feature dimension")->capture_default_str();
  synth_cmd->add_option("--informative", spec.informative_dims, "Dimension of the class-mean subspace")->capture_default_str();
  synth_cmd->add_option("--separation", spec.separation, "Class-mean spread")->capture_default_str();
  synth_cmd->add_option("--nuisance-rank", spec.nuisance_rank, "High-variance nuisance directions")->capture_default_str();
  synth_cmd->add_option("--nuisance-scale", spec.nuisance_scale, "Nuisance standard deviation")->capture_default_str();
  synth_cmd->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--train-per-class", train_pc, "Training samples per class")->capture_default_str();
  synth_cmd->add_option("--test-per-class", test_pc, "Test samples per class")->capture_default_str();
  synth_cmd->add_option("--train-out", synth_train, "Training file")->capture_default_str();
  synth_cmd->add_option("--test-out", synth_test, "Test file")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run_cmd) return cmd_run(run_args, out);
    if (*dims_cmd) return cmd_sweep_dims(dims_args, dims_text, out);
    if (*frac_cmd) {
      frac_args.apply_config();
      return cmd_sweep_fraction(frac_args, fractions_text, parse_number<int>(repeats_text, "repeats"), frac_seeds_opt,
                                out);
    }
    if (*sig_cmd) return cmd_significance(sig_path, baseline, sig_out, out, err);
    if (*pareto_cmd) return cmd_pareto(pareto_path, out, err);
    if (*synth_cmd) return cmd_synth(spec, train_pc, test_pc, synth_train, synth_test, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace discbench::cli
