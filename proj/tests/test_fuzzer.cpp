#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semfuzz/fuzzer.h"
#include "support.h"

using namespace semfuzz;
using namespace semfuzz::test;

namespace {

constexpr double kPi = std::numbers::pi;

struct SeedCase {
  const char* file;
  const char* pi;
};

const SeedCase kSeedCases[] = {{"v1_narrow_lane.json", "PI1"},      {"autoware_lane_follow.json", "PI1"},
                               {"lane_follow_multi.json", "PI2"},   {"lane_change.json", "PI3"},
                               {"lane_borrow.json", "PI4"},         {"stop_sign.json", "PI5"},
                               {"signal_intersection.json", "PI6"}, {"bare_intersection.json", "PI7"}};

double lateral(const PhysicalObject& o, const PlanningScenario& sc) { return project(o.center, sc.map.lane(1)).l; }

bool same_pose(const PhysicalObject& a, const PhysicalObject& b) {
  return distance(a.center, b.center) < 1e-9 && std::abs(normalize_angle(a.heading - b.heading)) < 1e-12;
}

CampaignResult campaign(const std::string& subject_id, Mode mode, long long budget, uint64_t seed) {
  CampaignConfig cfg;
  cfg.subject = subject_id;
  cfg.mode = mode;
  cfg.budget = budget;
  cfg.rng_seed = seed;
  return run_campaign(cfg, load_seed(seed_path(subject(subject_id).info().seed)));
}

}  // namespace

TEST_CASE("tournament selection") {
  Rng rng(1);
  CHECK(tournament_select({3.0}, rng) == 0);
  CHECK_THROWS_AS(tournament_select({}, rng), ConfigError);

  int best = 0;
  for (int i = 0; i < 10000; ++i) best += tournament_select({0.1, 9.9}, rng) == 0;
  CHECK(std::abs(best / 10000.0 - 0.75) < 0.02);

  std::vector<int> counts(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[tournament_select({1.0, 1.0, 1.0, 1.0}, rng)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 4.0) * (c - n / 4.0) / (n / 4.0);
  CHECK(chi2 < 16.27);  // 3 degrees of freedom, p = 0.001
}

TEST_CASE("static mutation") {
  Rng rng(2);
  const auto obj = box("b", 10.0, -4.0, 1.2, 0.8, 0.3);
  CHECK(mutate_static(obj, rng, 0.0, 0.0, 0.0) == obj);

  const double sigma = 1.3;
  const int n = 100000;
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto m = mutate_static(obj, rng, sigma, 0.0, 0.0);
    const double dx = m.center.x - obj.center.x, dy = m.center.y - obj.center.y;
    sx += dx, sy += dy, sxx += dx * dx, syy += dy * dy;
  }
  const double std_x = std::sqrt(sxx / n - (sx / n) * (sx / n));
  const double std_y = std::sqrt(syy / n - (sy / n) * (sy / n));
  CHECK(std::abs(std_x / sigma - 1.0) < 0.05);
  CHECK(std::abs(std_y / sigma - 1.0) < 0.05);
  CHECK(std::abs(sx / n) < 0.02);
  CHECK(std::abs(sy / n) < 0.02);

  const auto car = typed("v", ObjectType::Vehicle, 10.0, 0.0);
  for (int i = 0; i < 1000; ++i) {
    const auto m = mutate_static(car, rng, 1.0, 1.0, 1.0);
    REQUIRE(m.length == car.length);
    REQUIRE(m.width == car.width);
    REQUIRE(m.height == car.height);
  }
}

TEST_CASE("off-road enforcement") {
  const PlanningScenario sc = narrow_lane();
  // A 0.5 m wide box: band half-width 1.35 + 0.25 = 1.6.
  const auto pre = box("b", 80.0, -2.0, 1.0, 0.5);
  auto mutated = pre;
  mutated.center.y = -1.0;
  const auto pushed = enforce_off_road(mutated, sc.map, {1}, pre);
  REQUIRE(pushed);
  CHECK(lateral(*pushed, sc) == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(pushed->center.x == doctest::Approx(80.0));

  auto feasible = pre;
  feasible.center.y = -2.5;
  CHECK(*enforce_off_road(feasible, sc.map, {1}, pre) == feasible);

  const auto at_centre = enforce_off_road(box("b", 80.0, 0.0, 1.0, 0.5), sc.map, {1});
  REQUIRE(at_centre);
  CHECK(std::abs(lateral(*at_centre, sc) + 1.6) < 1e-5);
  const auto left_of_centre = enforce_off_road(box("b", 80.0, 0.3, 1.0, 0.5), sc.map, {1});
  CHECK(std::abs(lateral(*left_of_centre, sc) - 1.6) < 1e-5);
  CHECK(static_off_road(*at_centre, sc.map, {1}));
}

TEST_CASE("on-lane enforcement") {
  const PlanningScenario sc = load_scenario(seed_path("lane_change.json"));
  const double room = 1.75 - 0.5 * dims::kVehicleWidth;
  // A follower on the ego lane mutated across the boundary toward the target lane wraps to the far side.
  const auto pre = typed("v", ObjectType::Vehicle, 40.0, 0.5);
  auto over = pre;
  over.center.y = room + 0.2;
  const auto wrapped = enforce_on_lane(over, sc.map, {1}, pre, -1e9, 1e9);
  REQUIRE(wrapped);
  CHECK(wrapped->center.y == doctest::Approx(-room + 0.2).epsilon(1e-9));
  CHECK(irrelevant_vehicle(*wrapped, sc.ego, sc.map, {}) == false);

  auto skewed = typed("v", ObjectType::Vehicle, 40.0, 0.3, 0.2);
  const auto aligned = enforce_on_lane(skewed, sc.map, {1}, skewed, -1e9, 1e9);
  REQUIRE(aligned);
  CHECK(distance(aligned->center, skewed.center) < 1e-9);
  CHECK(aligned->heading == doctest::Approx(0.0));

  const auto between = enforce_on_lane(typed("v", ObjectType::Vehicle, 40.0, 1.6), sc.map, {1, 2}, std::nullopt,
                                       -1e9, 1e9);
  REQUIRE(between);
  CHECK(between->center.y == doctest::Approx(0.0).epsilon(1e-9));
  const auto nearer_target = enforce_on_lane(typed("v", ObjectType::Vehicle, 40.0, 1.9), sc.map, {1, 2},
                                             std::nullopt, -1e9, 1e9);
  CHECK(nearer_target->center.y == doctest::Approx(3.5).epsilon(1e-9));
  CHECK(!enforce_on_lane(typed("v", ObjectType::Vehicle, 40.0, 0.0), sc.map, {}, std::nullopt, -1e9, 1e9));
}

TEST_CASE("enforcement is idempotent") {
  Rng rng(3);
  int checked = 0;
  for (const auto& c : kSeedCases) {
    const PlanningScenario sc = load_scenario(seed_path(c.file));
    const auto& pi = planning_invariant(c.pi);
    for (int i = 0; i < 600; ++i) {
      for (const auto& [type, kinds] : pi.admissible) {
        const auto raw = random_static_object(type, sc.ego, rng);
        for (ConstraintKind k : kinds) {
          const auto pre = i % 2 ? std::optional<PhysicalObject>(mutate_static(raw, rng, 2.0)) : std::nullopt;
          const auto once = enforce(k, raw, sc, pre);
          if (!once) continue;
          const auto twice = enforce(k, *once, sc, std::nullopt);
          REQUIRE(twice);
          REQUIRE(same_pose(*once, *twice));
          const auto again = enforce(k, *once, sc, once);
          REQUIRE(same_pose(*once, *again));
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("dynamic generation") {
  Rng rng(4);
  const PlanningScenario sc = narrow_lane();
  const auto ped = typed("p", ObjectType::Pedestrian, 80.0, -(1.35 + 2.0 + 0.5 * dims::kPedestrianWidth));
  for (auto mode : {HeadingMode::PerpendicularAway, HeadingMode::ParallelForward, HeadingMode::ParallelBackward}) {
    const auto d = generate_dynamic(ped, ConstraintKind::PI_C5_DynamicOffRoad, mode, sc, rng);
    REQUIRE(d);
    CHECK(d->speed > 0.0);
    CHECK(d->speed <= 1.4);
    CHECK(dynamic_off_road(*d, sc.map, {1}));
  }
  const auto ahead = typed("v", ObjectType::Vehicle, 90.0, 0.0);
  CHECK(!generate_dynamic(ahead, ConstraintKind::PI_C2_FollowingVehicle, HeadingMode::Any, sc, rng));
  const auto behind = typed("v", ObjectType::Vehicle, 40.0, 0.0);
  const auto follower = generate_dynamic(behind, ConstraintKind::PI_C2_FollowingVehicle, HeadingMode::Any, sc, rng);
  REQUIRE(follower);
  CHECK(follower->speed == sc.ego.speed);
  CHECK(!follower->trajectory.empty());
}

TEST_CASE("generated genomes satisfy their invariant and the legal ranges") {
  Rng rng(5);
  int sets = 0;
  for (const auto& c : kSeedCases) {
    const Seed seed = load_seed(seed_path(c.file));
    const auto& pi = planning_invariant(c.pi);
    const Generator gen(seed.base, pi, {});
    for (int i = 0; i < 1250; ++i) {
      Genome genome = gen.init_genome(rng);
      const int mutations = i % 4;
      for (int m = 0; m < mutations; ++m) gen.mutate_genome(genome, rng);
      REQUIRE(!genome.empty());
      REQUIRE(static_cast<int>(genome.size()) <= gen.config().max_objects);
      const PlanningScenario sc = gen.assemble(genome);
      REQUIRE(check_pi(pi, sc));
      for (const auto& g : genome) REQUIRE(validate_ranges(g.object, seed.base.ego).empty());
      ++sets;
    }
  }
  CHECK(sets == 10000);
}

TEST_CASE("generation is deterministic and respects max_objects") {
  const Seed seed = load_seed(seed_path("v1_narrow_lane.json"));
  const Generator gen(seed.base, planning_invariant("PI1"), {});
  Rng a(0), b(0);
  CHECK(gen.init_genome(a) == gen.init_genome(b));

  GenerationConfig one;
  one.max_objects = 1;
  const Generator single(seed.base, planning_invariant("PI1"), one);
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    Genome g = single.init_genome(rng);
    REQUIRE(g.size() == 1);
    single.mutate_genome(g, rng);
    REQUIRE(g.size() == 1);
  }
  CHECK_THROWS_AS(Generator(seed.base, planning_invariant("PI3"), {}), ConfigError);
}

TEST_CASE("crossover") {
  const Seed seed = load_seed(seed_path("v1_narrow_lane.json"));
  const Generator gen(seed.base, planning_invariant("PI1"), {});
  Rng rng(7);
  auto ids = [](const Genome& g) {
    std::vector<std::string> out;
    for (const auto& x : g) out.push_back(x.object.id);
    return out;
  };
  bool wholesale = false;
  for (int i = 0; i < 2000; ++i) {
    const Genome a = gen.init_genome(rng);
    const Genome b = gen.init_genome(rng);
    const auto [x, y] = gen.crossover(a, a, rng);
    REQUIRE(x == a);
    REQUIRE(y == a);

    const auto [c, d] = gen.crossover(a, b, rng);
    REQUIRE(static_cast<int>(c.size()) <= gen.config().max_objects);
    REQUIRE(static_cast<int>(d.size()) <= gen.config().max_objects);
    auto parents = ids(a), children = ids(c);
    for (const auto& s : ids(b)) parents.push_back(s);
    for (const auto& s : ids(d)) children.push_back(s);
    std::sort(parents.begin(), parents.end());
    std::sort(children.begin(), children.end());
    REQUIRE(children == parents);
    wholesale |= a.size() == b.size() && c == b && d == a;
  }
  CHECK(wholesale);
}

TEST_CASE("campaign basics") {
  const auto zero = campaign("v1", Mode::Full, 0, 1);
  CHECK(!zero.found);
  CHECK(zero.stop_reason == "budget");
  CHECK(zero.evaluations == 0);

  const auto r1 = campaign("v1", Mode::Full, 4000, 11);
  const auto r2 = campaign("v1", Mode::Full, 4000, 11);
  CHECK(r1.found == r2.found);
  CHECK(r1.evaluations == r2.evaluations);
  CHECK(r1.best_fitness == r2.best_fitness);
  CHECK(r1.rng_seed == 11);
  for (size_t i = 1; i < r1.best_fitness.size(); ++i) CHECK(r1.best_fitness[i] <= r1.best_fitness[i - 1]);

  CampaignConfig bad;
  bad.population = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = {};
  bad.weight_c = 0.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("found violations are sound in every mode") {
  const auto r = campaign("v1", Mode::Full, 50000, 42);
  REQUIRE(r.found);
  REQUIRE(r.scenario);
  CHECK(check_pi(planning_invariant("PI1"), *r.scenario));
  CHECK(subject("v1").decide(*r.scenario).verdict == Verdict::Blocked);

  for (const auto& id : {"v1", "v5", "v8"}) {
    for (Mode m : {Mode::Full, Mode::NoGuide, Mode::NoPI, Mode::Unconstrained}) {
      const auto res = campaign(id, m, 3000, 5);
      if (!res.found) continue;
      const auto& pi = planning_invariant(res.pi);
      CHECK(check_pi(pi, *res.scenario));
      CHECK(subject(id).decide(*res.scenario).verdict == subject(id).info().undesired);
      for (const auto& o : res.violation->objects) CHECK(validate_ranges(o, res.scenario->ego).empty());
    }
  }
}
