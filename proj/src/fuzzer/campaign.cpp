#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>

#include "semfuzz/fuzzer.h"

namespace semfuzz {

namespace {

using Clock = std::chrono::steady_clock;

bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

size_t pick(Rng& rng, size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

// Runs the subject, scores the trace and records the first sound violation.
class Evaluator {
 public:
  Evaluator(const Subject& subject, const PlanningInvariant& pi, double c, long long budget)
      : subject_(subject), pi_(pi), c_(c), budget_(budget), history_(subject.profile().entries.size()) {}

  bool done() const { return violation_.has_value() || count_ >= budget_; }
  long long count() const { return count_; }

  double evaluate(const PlanningScenario& sc) {
    ++count_;
    StatsSink sink(subject_.profile());
    const PlanningDecision decision = subject_.decide(sc, sink);
    pending_.push_back(sink.stats());
    if (!violation_) {
      if (auto v = sound_violation(pi_, sc, decision)) {
        violation_ = std::move(v);
        scenario_ = sc;
        found_at_ = count_;
      }
    }
    return bpvd_with_snapshot(subject_.profile(), sink.stats(), history_, c_);
  }

  // Branch statistics of the latest evaluation.
  const std::vector<BranchStats>& last_stats() const { return pending_.back(); }

  // Distance of stats already merged into the history, under the current history.
  double rescore(const std::vector<BranchStats>& stats) const { return bpvd(subject_.profile(), stats, history_, c_); }

  // A candidate that could not be run still consumes budget.
  void skip() { ++count_; }

  // History snapshots only change between generations.
  void end_generation() {
    for (const auto& s : pending_) history_.update(s);
    pending_.clear();
  }

  void fill(CampaignResult& r) const {
    r.found = violation_.has_value();
    r.evaluations = r.found ? found_at_ : count_;
    r.violation = violation_;
    r.scenario = scenario_;
  }

 private:
  const Subject& subject_;
  const PlanningInvariant& pi_;
  double c_;
  long long budget_;
  long long count_ = 0;
  long long found_at_ = 0;
  History history_;
  std::vector<std::vector<BranchStats>> pending_;
  std::optional<Violation> violation_;
  std::optional<PlanningScenario> scenario_;
};

// Fitness is relative to the campaign history, so the population is re-scored from its stored branch
// statistics whenever the history grows. Stagnation counts generations in which no offspring beats the elite.
std::string run_guided(const CampaignConfig& cfg, const Generator& gen, const Seed& seed, Evaluator& ev, Rng& rng,
                       std::vector<double>& series) {
  std::vector<Genome> pop;
  std::vector<std::vector<BranchStats>> stats;
  const auto add = [&](std::vector<Genome>& to, std::vector<std::vector<BranchStats>>& to_stats, Genome g) {
    ev.evaluate(gen.assemble(g));
    to.push_back(std::move(g));
    to_stats.push_back(ev.last_stats());
  };
  const auto rescore = [&] {
    std::vector<double> fit;
    for (const auto& s : stats) fit.push_back(ev.rescore(s));
    return fit;
  };
  // Objects already present in the seed form the first individual.
  if (!seed.genome.empty()) add(pop, stats, gen.seed_genome(seed.genome));
  while (static_cast<int>(pop.size()) < cfg.population && !ev.done()) add(pop, stats, gen.init_genome(rng));
  ev.end_generation();
  if (pop.empty()) return "budget";

  std::vector<double> fit = rescore();
  series.push_back(*std::min_element(fit.begin(), fit.end()));
  int stagnant = 0;
  while (!ev.done()) {
    const size_t elite = static_cast<size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
    std::vector<Genome> next{pop[elite]};
    std::vector<std::vector<BranchStats>> next_stats{stats[elite]};
    while (static_cast<int>(next.size()) < cfg.population && !ev.done()) {
      Genome a = pop[tournament_select(fit, rng)];
      Genome b = pop[tournament_select(fit, rng)];
      if (chance(rng, cfg.crossover_rate)) std::tie(a, b) = gen.crossover(a, b, rng);
      for (Genome* child : {&a, &b}) {
        if (static_cast<int>(next.size()) >= cfg.population || ev.done()) break;
        gen.mutate_genome(*child, rng);
        add(next, next_stats, std::move(*child));
      }
    }
    ev.end_generation();
    pop = std::move(next);
    stats = std::move(next_stats);
    fit = rescore();

    const auto best = std::min_element(fit.begin(), fit.end());
    if (*best < fit.front()) {
      stagnant = 0;
    } else {
      ++stagnant;
    }
    series.push_back(*best);
    if (!ev.done() && stagnant >= cfg.stagnation_limit) return "stagnation";
  }
  return "";
}

std::string run_random(const CampaignConfig& cfg, const Generator& gen, Evaluator& ev, Rng& rng) {
  int in_generation = 0;
  while (!ev.done()) {
    ev.evaluate(gen.assemble(gen.init_genome(rng)));
    if (++in_generation == cfg.population) {
      ev.end_generation();
      in_generation = 0;
    }
  }
  return "";
}

// Semantics-blind mutation of raw object fields.
class BlindMutator {
 public:
  static constexpr size_t kMaxObjects = 8;

  explicit BlindMutator(Rng& rng) : rng_(rng) {}

  void mutate(std::vector<PhysicalObject>& objs) {
    const int ops = std::uniform_int_distribution<int>(1, 4)(rng_);
    for (int i = 0; i < ops; ++i) apply(objs);
  }

 private:
  void apply(std::vector<PhysicalObject>& objs) {
    const int op = objs.empty() ? 0 : std::uniform_int_distribution<int>(0, 5)(rng_);
    if (op == 0) {
      if (objs.size() >= kMaxObjects) return;
      PhysicalObject o;
      o.id = next_id();
      o.type = ObjectType::Pedestrian;
      o.center = {0.0, 0.0};
      o.length = o.width = o.height = 0.0;
      objs.push_back(o);
    } else if (op == 1) {
      objs.erase(objs.begin() + pick(rng_, objs.size()));
    } else if (op == 2) {
      if (objs.size() >= kMaxObjects) return;
      PhysicalObject o = objs[pick(rng_, objs.size())];
      o.id = next_id();
      objs.push_back(o);
    } else {
      mutate_field(objs[pick(rng_, objs.size())]);
    }
  }

  void mutate_field(PhysicalObject& o) {
    switch (pick(rng_, 8)) {
      case 0: o.center.x = mutate_double(o.center.x); break;
      case 1: o.center.y = mutate_double(o.center.y); break;
      case 2: o.length = mutate_double(o.length); break;
      case 3: o.width = mutate_double(o.width); break;
      case 4: o.height = mutate_double(o.height); break;
      case 5: o.heading = mutate_double(o.heading); break;
      case 6: o.speed = mutate_double(o.speed); break;
      default: o.type = static_cast<ObjectType>(pick(rng_, 4)); break;
    }
  }

  double mutate_double(double v) {
    static constexpr double kInteresting[] = {0.0, -1.0, 1.0, 0.5, 2.0, 10.0, 80.0, -80.0, 1e-6, 1e6};
    switch (pick(rng_, 4)) {
      case 0: {
        const uint64_t bits = std::bit_cast<uint64_t>(v) ^ (uint64_t{1} << pick(rng_, 64));
        return std::bit_cast<double>(bits);
      }
      case 1: {
        const double delta = static_cast<double>(std::uniform_int_distribution<int>(1, 35)(rng_));
        return chance(rng_, 0.5) ? v + delta : v - delta;
      }
      case 2: return v * (1.0 + std::normal_distribution<double>(0.0, 0.1)(rng_));
      default: return kInteresting[pick(rng_, std::size(kInteresting))];
    }
  }

  std::string next_id() { return "u" + std::to_string(counter_++); }

  Rng& rng_;
  int counter_ = 0;
};

// Objects the subject can be run on: finite fields, positive dimensions, synthesizable motion.
bool well_formed(std::vector<PhysicalObject>& objs, const LaneMap& map) {
  for (auto& o : objs) {
    if (!is_finite(o.center) || !std::isfinite(o.heading) || !std::isfinite(o.speed)) return false;
    if (!(o.length > 0.0) || !(o.width > 0.0) || !(o.height > 0.0) || !std::isfinite(o.length) ||
        !std::isfinite(o.width) || !std::isfinite(o.height) || o.speed < 0.0) {
      return false;
    }
    try {
      o.trajectory = synthesize_trajectory(o, map);
    } catch (const SynthesisError&) {
      return false;
    }
  }
  return true;
}

std::string run_unconstrained(const CampaignConfig& cfg, const Seed& seed, Evaluator& ev, Rng& rng) {
  std::vector<std::vector<PhysicalObject>> corpus(static_cast<size_t>(cfg.population), seed.genome);
  BlindMutator mutator(rng);
  while (!ev.done()) {
    std::vector<PhysicalObject> child = corpus[pick(rng, corpus.size())];
    mutator.mutate(child);
    if (!well_formed(child, seed.base.map)) {
      ev.skip();
      continue;
    }
    PlanningScenario sc = seed.base;
    for (auto& o : child) sc.objects.push_back(o);
    ev.evaluate(sc);
    corpus[pick(rng, corpus.size())] = std::move(child);
    if (ev.count() % cfg.population == 0) ev.end_generation();
  }
  return "";
}

}  // namespace

void validate(const CampaignConfig& c) {
  if (c.population < 1) throw ConfigError("population must be at least 1");
  if (c.budget < 0) throw ConfigError("budget must be non-negative");
  if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0)) throw ConfigError("crossover rate must be in [0, 1]");
  if (c.stagnation_limit < 1) throw ConfigError("stagnation limit must be at least 1");
  if (!(c.weight_c > 0.0)) throw ConfigError("weight c must be positive");
  const GenerationConfig& g = c.generation;
  if (g.max_objects < 1) throw ConfigError("max_objects must be at least 1");
  if (!(g.sigma >= 0.0)) throw ConfigError("mutation sigma must be non-negative");
  for (double p : {g.p_resize, g.p_reheading, g.p_add, g.p_remove, g.p_duplicate}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("mutation probabilities must be in [0, 1]");
  }
  if (g.enforce_iterations < 1 || g.max_retries < 1) throw ConfigError("retry bounds must be at least 1");
  const SubjectConfig& s = c.subject_config;
  if (s.v8_rollouts < 1 || s.v9_rollouts < 1) throw ConfigError("rollout counts must be at least 1");
  if (!(s.v3_threshold >= 0.0) || !(s.v7_max_stop_distance >= 0.0)) throw ConfigError("thresholds must be >= 0");
}

std::optional<Violation> sound_violation(const PlanningInvariant& pi, const PlanningScenario& sc,
                                         const PlanningDecision& decision) {
  if (!conflicts(pi.desired, decision.verdict)) return std::nullopt;
  for (const auto& o : sc.objects) {
    if (!is_context_object(o, sc) && !validate_ranges(o, sc.ego).empty()) return std::nullopt;
  }
  return check_violation(pi, sc, decision);
}

CampaignResult run_campaign(const CampaignConfig& cfg, const Seed& seed) {
  validate(cfg);
  const auto subj = make_subject(cfg.subject, cfg.subject_config);
  const PlanningInvariant& pi = planning_invariant(cfg.pi.empty() ? subj->info().pi : cfg.pi);
  if (!subj->accepts(seed.base.kind)) {
    throw ConfigError("subject " + cfg.subject + " does not handle " + to_string(seed.base.kind) + " seeds");
  }
  if (pi.kind != seed.base.kind) {
    throw ConfigError(pi.id + " applies to " + to_string(pi.kind) + " scenarios, seed is " + to_string(seed.base.kind));
  }

  CampaignResult result;
  result.rng_seed = cfg.rng_seed;
  result.mode = cfg.mode;
  result.subject = cfg.subject;
  result.pi = pi.id;

  const auto start = Clock::now();
  Rng rng(cfg.rng_seed);
  Evaluator ev(*subj, pi, cfg.weight_c, cfg.budget);
  std::string reason;
  if (!ev.done()) {
    switch (cfg.mode) {
      case Mode::Full:
      case Mode::NoPI: {
        const Generator gen(seed.base, pi, cfg.generation, cfg.mode == Mode::Full);
        reason = run_guided(cfg, gen, seed, ev, rng, result.best_fitness);
        break;
      }
      case Mode::NoGuide: {
        const Generator gen(seed.base, pi, cfg.generation, true);
        reason = run_random(cfg, gen, ev, rng);
        break;
      }
      case Mode::Unconstrained:
        reason = run_unconstrained(cfg, seed, ev, rng);
        break;
    }
  }
  ev.fill(result);
  result.stop_reason = result.found ? "found" : (reason.empty() ? "budget" : reason);
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace semfuzz
