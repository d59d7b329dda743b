// Command-line front end: single campaigns, multi-run experiments, replay and listings.
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "semfuzz/experiment.h"
#include "semfuzz/replay.h"

using namespace semfuzz;

namespace {

constexpr int kExitFullFailed = 2;
constexpr int kExitError = 3;

std::string default_seed(const std::string& subject_id) {
  return (std::filesystem::path(SEMFUZZ_DATA_DIR) / "seeds" / make_subject(subject_id)->info().seed).string();
}

// Optional campaign tunables: {"population", "crossover_rate", "stagnation_limit", "max_objects", "sigma"}.
void apply_config_file(CampaignConfig& cfg, const std::string& path) {
  const Json j = read_json_file(path);
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "population") cfg.population = value.get<int>();
      else if (key == "crossover_rate") cfg.crossover_rate = value.get<double>();
      else if (key == "stagnation_limit") cfg.stagnation_limit = value.get<int>();
      else if (key == "max_objects") cfg.generation.max_objects = value.get<int>();
      else if (key == "sigma") cfg.generation.sigma = value.get<double>();
      else throw ConfigError(path + ": unknown field '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic denial-of-service fuzzer for behavioral planners"};
  app.require_subcommand(1);

  std::string subject_id, pi_id, mode_name = "full", seed_file, out, config_file;
  long long budget = -1;
  uint64_t rng_seed = 0;
  double weight_c = kDefaultWeightC;
  int runs = -1, threads = 0;

  auto* run = app.add_subcommand("run", "Run a single fuzzing campaign");
  run->add_option("--subject", subject_id, "Subject id (v1..v9)")->required();
  run->add_option("--pi", pi_id, "Planning invariant (default: the subject's)");
  run->add_option("--mode", mode_name, "full | no-guide | no-pi | unconstrained");
  run->add_option("--seed-file", seed_file, "Seed scenario (default: the subject's bundled seed)");
  run->add_option("--budget", budget, "Evaluation budget");
  run->add_option("--rng-seed", rng_seed, "RNG seed");
  run->add_option("--weight-c", weight_c, "Weight of non-critical predicates");
  run->add_option("--out", out, "Write the violation here when found");
  run->add_option("--config", config_file, "JSON file with campaign tunables");

  std::string spec_file;
  auto* exp = app.add_subcommand("experiment", "Compare modes over repeated runs");
  exp->add_option("spec", spec_file, "Experiment spec JSON")->required();
  exp->add_option("--runs", runs, "Runs per mode (overrides the spec)");
  exp->add_option("--budget", budget, "Evaluation budget per run (overrides the spec)");
  auto* seed_opt = exp->add_option("--rng-seed", rng_seed, "Base RNG seed (overrides the spec)");
  exp->add_option("--weight-c", weight_c, "Weight of non-critical predicates (overrides the spec)");
  exp->add_option("--out", out, "Output directory")->default_val("experiment_out");
  exp->add_option("--threads", threads, "Worker threads (0: all cores)");

  std::string violation_file;
  auto* rep = app.add_subcommand("replay", "Re-check a stored violation");
  rep->add_option("violation", violation_file, "Violation JSON")->required();

  auto* list_pis = app.add_subcommand("list-pis", "List planning invariants");
  auto* list_subjects = app.add_subcommand("list-subjects", "List subjects");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto mode = mode_from_string(mode_name);
      if (!mode) throw ConfigError("unknown mode '" + mode_name + "'");
      CampaignConfig cfg;
      if (!config_file.empty()) apply_config_file(cfg, config_file);
      cfg.subject = subject_id;
      cfg.pi = pi_id;
      cfg.mode = *mode;
      if (budget >= 0) cfg.budget = budget;
      cfg.rng_seed = rng_seed;
      cfg.weight_c = weight_c;
      const Seed seed = load_seed(seed_file.empty() ? default_seed(subject_id) : seed_file);
      const CampaignResult r = run_campaign(cfg, seed);
      Json summary{{"subject", r.subject},       {"pi", r.pi},
                   {"mode", to_string(r.mode)},   {"found", r.found},
                   {"stop_reason", r.stop_reason}, {"evaluations", r.evaluations},
                   {"wall_seconds", r.wall_seconds}, {"rng_seed", r.rng_seed}};
      if (r.found) {
        summary["decision"] = to_string(r.violation->decision);
        summary["target"] = r.violation->target;
        if (!out.empty()) write_file_atomic(out, violation_to_json(r).dump(2) + "\n");
      }
      std::cout << summary.dump(2) << "\n";
      return 0;
    }
    if (*exp) {
      ExperimentSpec spec = load_experiment_spec(spec_file);
      if (runs >= 0) spec.runs = runs;
      if (budget >= 0) spec.budget = budget;
      if (*seed_opt) spec.base_seed = rng_seed;
      if (exp->count("--weight-c")) spec.weight_c = weight_c;
      spec.threads = threads;
      validate(spec);
      const auto report = run_experiment(spec, [](const RunRecord& rec) {
        const auto& r = rec.result;
        std::fprintf(stderr, "%s %s run %d: %s after %lld evaluations\n", r.subject.c_str(), to_string(rec.mode),
                     rec.run, r.found ? "found" : r.stop_reason.c_str(), r.evaluations);
      });
      write_report(spec, report, out);
      std::cout << report_to_text(spec, report);
      return report.full_failed ? kExitFullFailed : 0;
    }
    if (*rep) {
      const ReplayResult r = replay_file(violation_file);
      std::cout << r.message << "\n";
      return r.pass ? 0 : 1;
    }
    if (*list_pis) {
      for (const auto& pi : planning_invariants()) {
        std::cout << pi.id << "  " << to_string(pi.kind) << "  " << to_string(pi.desired) << "  " << pi.description
                  << "\n";
      }
      return 0;
    }
    if (*list_subjects) {
      for (const auto& id : subject_ids()) {
        const auto& info = subject(id).info();
        std::cout << info.id << "  " << info.pi << "  " << info.seed << "  " << info.description << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
