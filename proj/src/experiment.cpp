#include "semfuzz/experiment.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "semfuzz/replay.h"
#include "semfuzz/stats.h"

namespace semfuzz {

namespace fs = std::filesystem;

namespace {

constexpr double kSignificance = 0.05;
constexpr int kMinRunsForTest = 3;

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j.at(key);
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string fmt_opt(const std::optional<double>& v, const char* f) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, *v);
  return buf;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const Json& j, const std::string& base_dir) {
  try {
    check_keys(j, {"entries", "modes", "runs", "budget", "base_seed", "weight_c", "threads"}, "experiment");
    ExperimentSpec spec;
    const Json& entries = field(j, "entries", "experiment");
    if (!entries.is_array()) throw ConfigError("experiment.entries: expected an array");
    for (size_t i = 0; i < entries.size(); ++i) {
      const std::string where = "experiment.entries[" + std::to_string(i) + "]";
      check_keys(entries[i], {"seed", "subject", "pi"}, where);
      ExperimentEntry e;
      fs::path p(field(entries[i], "seed", where).get<std::string>());
      e.seed_file = p.is_absolute() ? p.string() : (fs::path(base_dir) / p).lexically_normal().string();
      e.subject = field(entries[i], "subject", where).get<std::string>();
      if (entries[i].contains("pi")) e.pi = entries[i].at("pi").get<std::string>();
      spec.entries.push_back(std::move(e));
    }
    if (j.contains("modes")) {
      spec.modes.clear();
      for (const auto& m : j.at("modes")) {
        const auto mode = mode_from_string(m.get<std::string>());
        if (!mode) throw ConfigError("experiment.modes: unknown mode '" + m.get<std::string>() + "'");
        spec.modes.push_back(*mode);
      }
    }
    if (j.contains("runs")) spec.runs = j.at("runs").get<int>();
    if (j.contains("budget")) spec.budget = j.at("budget").get<long long>();
    if (j.contains("base_seed")) spec.base_seed = j.at("base_seed").get<uint64_t>();
    if (j.contains("weight_c")) spec.weight_c = j.at("weight_c").get<double>();
    if (j.contains("threads")) spec.threads = j.at("threads").get<int>();
    validate(spec);
    return spec;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("experiment: ") + e.what());
  }
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return parse_experiment_spec(j, fs::path(path).parent_path().string());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void validate(const ExperimentSpec& spec) {
  if (spec.entries.empty()) throw ConfigError("experiment.entries: at least one entry required");
  if (spec.modes.empty()) throw ConfigError("experiment.modes: at least one mode required");
  if (spec.runs < 1) throw ConfigError("experiment.runs: must be >= 1");
  if (spec.budget < 1) throw ConfigError("experiment.budget: must be >= 1");
  if (!(spec.weight_c > 0.0)) throw ConfigError("experiment.weight_c: must be > 0");
  if (spec.threads < 0) throw ConfigError("experiment.threads: must be >= 0");
}

uint64_t run_seed(uint64_t base_seed, size_t entry, Mode mode, int run) {
  std::seed_seq seq{static_cast<uint32_t>(base_seed), static_cast<uint32_t>(base_seed >> 32),
                    static_cast<uint32_t>(entry), static_cast<uint32_t>(mode), static_cast<uint32_t>(run)};
  std::array<uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<uint64_t>(out[0]) << 32) | out[1];
}

double censored_evaluations(const CampaignResult& r, long long budget) {
  return r.found ? static_cast<double>(r.evaluations) : static_cast<double>(budget + 1);
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const std::function<void(const RunRecord&)>& on_run) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();

  std::vector<Seed> seeds;
  for (const auto& e : spec.entries) {
    seeds.push_back(load_seed(e.seed_file));
    make_subject(e.subject);  // reject unknown ids before spawning work
  }

  ExperimentReport report;
  for (size_t e = 0; e < spec.entries.size(); ++e) {
    for (Mode m : spec.modes) {
      for (int r = 0; r < spec.runs; ++r) report.records.push_back({e, m, r, {}});
    }
  }

  std::atomic<size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (size_t i = next++; i < report.records.size(); i = next++) {
      RunRecord& rec = report.records[i];
      const ExperimentEntry& entry = spec.entries[rec.entry];
      CampaignConfig cfg;
      cfg.subject = entry.subject;
      cfg.pi = entry.pi;
      cfg.mode = rec.mode;
      cfg.budget = spec.budget;
      cfg.weight_c = spec.weight_c;
      cfg.rng_seed = run_seed(spec.base_seed, rec.entry, rec.mode, rec.run);
      try {
        rec.result = run_campaign(cfg, seeds[rec.entry]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = report.records.size();
        return;
      }
      if (on_run) {
        std::lock_guard lock(mu);
        on_run(rec);
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const size_t n_threads = std::min<size_t>(spec.threads > 0 ? static_cast<size_t>(spec.threads) : hw,
                                            report.records.size());
  std::vector<std::thread> pool;
  for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  report.insufficient_runs = spec.runs < kMinRunsForTest;
  for (size_t e = 0; e < spec.entries.size(); ++e) {
    ComparisonRow row;
    row.subject = spec.entries[e].subject;
    row.seed_file = spec.entries[e].seed_file;
    auto samples = [&](Mode m) {
      std::vector<const CampaignResult*> out;
      for (const auto& rec : report.records) {
        if (rec.entry == e && rec.mode == m) out.push_back(&rec.result);
      }
      return out;
    };
    auto censored = [&](const std::vector<const CampaignResult*>& rs) {
      std::vector<double> out;
      for (const auto* r : rs) out.push_back(censored_evaluations(*r, spec.budget));
      return out;
    };
    std::optional<std::vector<double>> full_sample;
    std::optional<double> full_mean;
    const bool has_full = std::find(spec.modes.begin(), spec.modes.end(), Mode::Full) != spec.modes.end();
    if (has_full) full_sample = censored(samples(Mode::Full));

    for (Mode m : spec.modes) {
      const auto rs = samples(m);
      if (row.pi.empty() && !rs.empty()) row.pi = rs.front()->pi;
      ModeSummary s;
      s.mode = m;
      s.runs = static_cast<int>(rs.size());
      std::vector<double> evals, secs;
      for (const auto* r : rs) {
        if (!r->found) continue;
        ++s.found;
        evals.push_back(static_cast<double>(r->evaluations));
        secs.push_back(r->wall_seconds);
      }
      if (!evals.empty()) {
        s.mean_evaluations = mean(evals);
        s.mean_wall_seconds = mean(secs);
      }
      const auto cens = censored(rs);
      s.median_evaluations = median(cens);
      if (m == Mode::Full) {
        full_mean = s.mean_evaluations;
        if (s.found < s.runs) report.full_failed = true;
      } else if (full_sample) {
        s.a12_vs_full = vargha_delaney_a12(cens, *full_sample);
        if (!report.insufficient_runs) {
          s.p_value = mann_whitney_u(cens, *full_sample).p;
          s.significant = *s.p_value < kSignificance;
        }
      }
      row.modes.push_back(s);
    }
    for (auto& s : row.modes) {
      if (full_mean && s.mean_evaluations && *full_mean > 0.0) s.slowdown = *s.mean_evaluations / *full_mean;
    }
    report.rows.push_back(std::move(row));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Json report_to_json(const ExperimentSpec& spec, const ExperimentReport& report) {
  Json modes = Json::array();
  for (Mode m : spec.modes) modes.push_back(to_string(m));
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json ms = Json::object();
    for (const auto& s : row.modes) {
      ms[to_string(s.mode)] = {{"runs", s.runs},
                               {"found", s.found},
                               {"mean_evaluations", optional_number(s.mean_evaluations)},
                               {"median_evaluations", s.median_evaluations},
                               {"slowdown", optional_number(s.slowdown)},
                               {"a12_vs_full", optional_number(s.a12_vs_full)},
                               {"mann_whitney_p", optional_number(s.p_value)},
                               {"significant", s.significant},
                               {"mean_wall_seconds", optional_number(s.mean_wall_seconds)}};
    }
    rows.push_back({{"subject", row.subject}, {"pi", row.pi}, {"seed", row.seed_file}, {"modes", ms}});
  }
  return Json{{"runs", spec.runs},
              {"budget", spec.budget},
              {"base_seed", spec.base_seed},
              {"weight_c", spec.weight_c},
              {"modes", modes},
              {"insufficient_runs", report.insufficient_runs},
              {"full_failed", report.full_failed},
              {"rows", rows},
              {"wall_seconds", report.wall_seconds}};
}

std::string report_to_text(const ExperimentSpec& spec, const ExperimentReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %-5s %-14s %9s %12s %12s %9s %6s %9s %s\n", "subject", "pi", "mode",
                "found/NF", "mean evals", "median", "slowdown", "A12", "p", "sig");
  out << line;
  for (const auto& row : report.rows) {
    for (const auto& s : row.modes) {
      const std::string found = std::to_string(s.found) + "/" + std::to_string(s.runs - s.found);
      std::snprintf(line, sizeof line, "%-8s %-5s %-14s %9s %12s %12.0f %9s %6s %9s %s\n", row.subject.c_str(),
                    row.pi.c_str(), to_string(s.mode), found.c_str(), fmt_opt(s.mean_evaluations, "%.1f").c_str(),
                    s.median_evaluations, fmt_opt(s.slowdown, "%.2fx").c_str(),
                    fmt_opt(s.a12_vs_full, "%.2f").c_str(), fmt_opt(s.p_value, "%.2e").c_str(),
                    s.significant ? "yes" : "");
      out << line;
    }
  }
  out << "runs per mode: " << spec.runs << ", budget: " << spec.budget << " evaluations";
  if (report.insufficient_runs) out << ", insufficient runs for significance tests";
  out << "\n";
  return out.str();
}

void write_report(const ExperimentSpec& spec, const ExperimentReport& report, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "violations", ec);
  if (ec) throw ConfigError(out_dir + ": cannot create directory: " + ec.message());

  std::string jsonl;
  for (const auto& rec : report.records) {
    const auto& r = rec.result;
    Json line{{"subject", r.subject},
              {"pi", r.pi},
              {"mode", to_string(rec.mode)},
              {"run", rec.run},
              {"rng_seed", r.rng_seed},
              {"found", r.found},
              {"stop_reason", r.stop_reason},
              {"evaluations", r.evaluations},
              {"wall_seconds", r.wall_seconds}};
    jsonl += line.dump() + "\n";
    if (r.found) {
      const std::string name = r.subject + "_" + to_string(rec.mode) + "_e" + std::to_string(rec.entry) + "_r" +
                               std::to_string(rec.run) + ".json";
      write_file_atomic((fs::path(out_dir) / "violations" / name).string(), violation_to_json(r).dump(2) + "\n");
    }
  }
  write_file_atomic((fs::path(out_dir) / "results.jsonl").string(), jsonl);
  write_file_atomic((fs::path(out_dir) / "report.json").string(), report_to_json(spec, report).dump(2) + "\n");
  write_file_atomic((fs::path(out_dir) / "report.txt").string(), report_to_text(spec, report));
}

}  // namespace semfuzz
