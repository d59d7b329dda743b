#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semfuzz/fuzzer.h"
#include "semfuzz/scenario_io.h"

namespace semfuzz {

struct ExperimentEntry {
  std::string seed_file;  // resolved path
  std::string subject;
  std::string pi;  // empty: the subject's bundled invariant
};

struct ExperimentSpec {
  std::vector<ExperimentEntry> entries;
  std::vector<Mode> modes{Mode::Full, Mode::NoGuide, Mode::NoPI, Mode::Unconstrained};
  int runs = 10;
  long long budget = 50000;
  uint64_t base_seed = 1;
  double weight_c = kDefaultWeightC;
  int threads = 0;  // 0: hardware concurrency
};

// Seed paths are resolved against base_dir. Throws ConfigError with the offending field.
ExperimentSpec parse_experiment_spec(const Json& j, const std::string& base_dir);
ExperimentSpec load_experiment_spec(const std::string& path);
void validate(const ExperimentSpec& spec);

// RNG seed of one campaign; depends only on the base seed and the run's coordinates.
uint64_t run_seed(uint64_t base_seed, size_t entry, Mode mode, int run);

struct RunRecord {
  size_t entry = 0;
  Mode mode = Mode::Full;
  int run = 0;
  CampaignResult result;
};

struct ModeSummary {
  Mode mode = Mode::Full;
  int runs = 0;
  int found = 0;
  std::optional<double> mean_evaluations;  // over found runs
  std::optional<double> mean_wall_seconds;  // over found runs
  double median_evaluations = 0.0;          // not-found runs count as budget + 1
  std::optional<double> slowdown;           // mean_evaluations relative to Full
  std::optional<double> a12_vs_full;        // Â12(mode, Full) on censored evaluations
  std::optional<double> p_value;            // Mann-Whitney U against Full
  bool significant = false;                 // p < 0.05
};

struct ComparisonRow {
  std::string subject;
  std::string pi;
  std::string seed_file;
  std::vector<ModeSummary> modes;
};

struct ExperimentReport {
  std::vector<ComparisonRow> rows;
  std::vector<RunRecord> records;
  bool insufficient_runs = false;  // fewer than 3 runs per mode: no p-values
  bool full_failed = false;        // some Full-mode run did not find its violation
  double wall_seconds = 0.0;
};

// Evaluation count used for rank statistics: the spent count when found, budget + 1 otherwise.
double censored_evaluations(const CampaignResult& r, long long budget);

ExperimentReport run_experiment(const ExperimentSpec& spec,
                                const std::function<void(const RunRecord&)>& on_run = nullptr);

Json report_to_json(const ExperimentSpec& spec, const ExperimentReport& report);
std::string report_to_text(const ExperimentSpec& spec, const ExperimentReport& report);

// Writes report.json, report.txt, results.jsonl and one violation file per found run into out_dir.
void write_report(const ExperimentSpec& spec, const ExperimentReport& report, const std::string& out_dir);

}  // namespace semfuzz
