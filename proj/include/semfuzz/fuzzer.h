#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "semfuzz/invariants.h"
#include "semfuzz/subjects.h"

namespace semfuzz {

using Rng = std::mt19937_64;

enum class Mode { Full, NoGuide, NoPI, Unconstrained };

const char* to_string(Mode m);
std::optional<Mode> mode_from_string(const std::string& s);

// How a walking pedestrian moves relative to the nearest planned lane.
enum class HeadingMode { ParallelForward, ParallelBackward, PerpendicularAway, Any };

struct Gene {
  PhysicalObject object;
  std::optional<ConstraintKind> constraint;  // absent for unconstrained genes
  HeadingMode heading_mode = HeadingMode::Any;
  bool operator==(const Gene&) const = default;
};

using Genome = std::vector<Gene>;

struct GenerationConfig {
  int max_objects = 4;
  double sigma = 1.0;            // m, per-axis position mutation
  double p_resize = 0.1;         // re-draw size of static obstacles
  double p_reheading = 0.1;      // re-draw heading or walking mode
  double p_add = 0.05;           // add an object to a genome
  double p_remove = 0.05;        // remove an object from a genome
  double p_duplicate = 0.05;     // add a mutated copy of an existing object
  int enforce_iterations = 8;    // lanes fixed per enforcement before giving up
  int max_retries = 20;          // draws per gene before demotion
};

// Small margin placing enforced objects strictly outside (or inside) a band edge.
inline constexpr double kEnforceMargin = 1e-6;

PhysicalObject random_static_object(ObjectType type, const EgoState& ego, Rng& rng);

// Gaussian position perturbation plus occasional size/heading re-draw; constraints are not enforced.
PhysicalObject mutate_static(const PhysicalObject& obj, Rng& rng, double sigma, double p_resize = 0.1,
                             double p_reheading = 0.1);

// Moves obj out of the lanes' forbidden bands. With a pre-mutation pose the object is pushed through the
// band in the mutation direction, otherwise it snaps to the nearest feasible side.
// Returns nullopt when no feasible placement is found within max_iterations lane fixes.
std::optional<PhysicalObject> enforce_off_road(const PhysicalObject& obj, const LaneMap& map,
                                               const std::vector<int>& lanes,
                                               const std::optional<PhysicalObject>& pre = std::nullopt,
                                               int max_iterations = 8);

// Places a vehicle on one of the allowed lanes (the previous lane when still allowed, else the nearest),
// wrapping its lateral offset into the lane and s into [s_min, s_max]; heading follows the lane.
std::optional<PhysicalObject> enforce_on_lane(const PhysicalObject& vehicle, const LaneMap& map,
                                              const std::vector<int>& allowed_lanes,
                                              const std::optional<PhysicalObject>& pre, double s_min,
                                              double s_max);

// Keeps an obstacle on the blocker's lane, strictly ahead of the blocker.
std::optional<PhysicalObject> enforce_ahead_of_blocker(const PhysicalObject& obj, const PlanningScenario& sc);

// Applies the enforcer for constraint k; nullopt when the constraint cannot be met.
std::optional<PhysicalObject> enforce(ConstraintKind k, const PhysicalObject& obj, const PlanningScenario& sc,
                                      const std::optional<PhysicalObject>& pre, int max_iterations = 8);

// Adds speed and trajectory for the constraint (walking pedestrians, driving vehicles).
// Returns nullopt when synthesis fails or the result does not satisfy k.
std::optional<PhysicalObject> generate_dynamic(const PhysicalObject& obj, ConstraintKind k, HeadingMode mode,
                                               const PlanningScenario& sc, Rng& rng);

class Generator {
 public:
  // enforce = false gives the unguarded generators used by the NoPI baseline.
  Generator(const PlanningScenario& base, const PlanningInvariant& pi, GenerationConfig config, bool enforce = true);

  Gene init_gene(Rng& rng) const;
  Genome init_genome(Rng& rng) const;
  // Genes for the attacker objects stored in a seed; throws ConfigError when guarded generation is on and an
  // object satisfies none of the invariant's constraints.
  Genome seed_genome(const std::vector<PhysicalObject>& objects) const;
  Gene mutate_gene(const Gene& g, Rng& rng) const;
  void mutate_genome(Genome& genome, Rng& rng) const;
  std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, Rng& rng) const;

  PlanningScenario assemble(const Genome& genome) const;
  bool gene_ok(const Gene& g) const;

  const PlanningScenario& base() const { return base_; }
  const GenerationConfig& config() const { return config_; }

 private:
  std::optional<Gene> finish(Gene g, const std::optional<PhysicalObject>& pre, Rng& rng) const;
  Gene demoted(Rng& rng) const;
  std::string fresh_id(Rng& rng) const;

  PlanningScenario base_;
  const PlanningInvariant* pi_;
  GenerationConfig config_;
  bool enforce_;
  std::vector<ObjectType> types_;
};

// Size-2 tournament preferring smaller fitness; ties broken uniformly.
size_t tournament_select(const std::vector<double>& fitness, Rng& rng);

struct CampaignConfig {
  std::string subject = "v1";
  std::string pi;  // empty: the subject's bundled invariant
  Mode mode = Mode::Full;
  int population = 24;
  double crossover_rate = 0.7;
  int stagnation_limit = 100;  // generations without improvement (guided modes)
  long long budget = 50000;    // evaluations
  uint64_t rng_seed = 0;
  double weight_c = kDefaultWeightC;
  GenerationConfig generation;
  SubjectConfig subject_config;
};

// Throws ConfigError on invalid values.
void validate(const CampaignConfig& c);

struct CampaignResult {
  bool found = false;
  std::string stop_reason;  // "found", "budget" or "stagnation"
  long long evaluations = 0;  // evaluations to exposure when found, otherwise evaluations spent
  double wall_seconds = 0.0;
  std::optional<Violation> violation;
  std::optional<PlanningScenario> scenario;  // violating scenario
  std::vector<double> best_fitness;          // per generation (guided modes)
  uint64_t rng_seed = 0;
  Mode mode = Mode::Full;
  std::string subject;
  std::string pi;
};

// A violation counts only when the decision conflicts with the invariant, every object satisfies the
// invariant, and every object is within the legal ranges.
std::optional<Violation> sound_violation(const PlanningInvariant& pi, const PlanningScenario& sc,
                                         const PlanningDecision& decision);

CampaignResult run_campaign(const CampaignConfig& config, const Seed& seed);

}  // namespace semfuzz
