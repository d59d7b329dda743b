#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "semfuzz/fuzzer.h"

namespace semfuzz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFollowMargin = 1e-3;  // keeps followers strictly behind the following distance

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

size_t pick(Rng& rng, size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

bool chance(Rng& rng, double p) { return p > 0.0 && uniform(rng, 0.0, 1.0) < p; }

// Wraps x into [lo, hi); identity inside the interval.
double wrap(double x, double lo, double hi) {
  if (x >= lo && x <= hi) return x;
  const double span = hi - lo;
  if (!(span > 0.0)) return lo;
  double r = std::fmod(x - lo, span);
  if (r < 0.0) r += span;
  return lo + r;
}

double heading_in_range(double h) {
  double r = std::fmod(h, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Point2 left_normal(double heading) { return {-std::sin(heading), std::cos(heading)}; }

double longitudinal_half_extent(double length, double width, double heading, double ref_heading) {
  return lateral_half_extent(length, width, heading, ref_heading + 0.5 * std::numbers::pi);
}

// Smallest corner distance to the centerline, or +inf when every corner is outside the band.
std::optional<double> band_intrusion(const Polygon& poly, const Lane& lane) {
  double min_d = std::numeric_limits<double>::infinity();
  for (const auto& c : poly) min_d = std::min(min_d, project(c, lane).dist);
  if (min_d > lane.half_width()) return std::nullopt;
  return min_d;
}

std::vector<int> c3_lanes(const PlanningScenario& sc) {
  std::vector<int> excluded = sc.protected_lanes();
  excluded.push_back(sc.ego.lane_id());
  std::vector<int> allowed;
  for (const Lane& lane : sc.map.lanes()) {
    if (std::find(excluded.begin(), excluded.end(), lane.id()) != excluded.end()) continue;
    const auto chain = lane_chain(sc.map, lane.id());
    const bool enters = std::any_of(chain.begin(), chain.end(), [&](int id) {
      return std::find(sc.context.intersection_lanes.begin(), sc.context.intersection_lanes.end(), id) !=
             sc.context.intersection_lanes.end();
    });
    if (!enters) allowed.push_back(lane.id());
  }
  return allowed;
}

const Lane& nearest_of(const Point2& pos, const LaneMap& map, const std::vector<int>& lanes) {
  const Lane* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (int id : lanes) {
    const Lane& lane = map.lane(id);
    const double d = project(pos, lane).dist;
    if (d < best_d) {
      best_d = d;
      best = &lane;
    }
  }
  return *best;
}

void set_dims(PhysicalObject& o, Rng& rng) {
  switch (o.type) {
    case ObjectType::Pedestrian:
      o.length = dims::kPedestrianLength, o.width = dims::kPedestrianWidth, o.height = dims::kPedestrianHeight;
      break;
    case ObjectType::Vehicle:
      o.length = dims::kVehicleLength, o.width = dims::kVehicleWidth, o.height = dims::kVehicleHeight;
      break;
    case ObjectType::Bicycle:
      o.length = dims::kBicycleLength, o.width = dims::kBicycleWidth, o.height = dims::kBicycleHeight;
      break;
    case ObjectType::StaticObject:
      o.length = uniform(rng, dims::kStaticMin, dims::kStaticMax);
      o.width = uniform(rng, dims::kStaticMin, dims::kStaticMax);
      o.height = uniform(rng, dims::kStaticMin, dims::kStaticMax);
      break;
  }
}

double random_heading(ObjectType t, Rng& rng) {
  const bool half = t == ObjectType::StaticObject || t == ObjectType::Bicycle;
  return uniform(rng, 0.0, half ? std::numbers::pi : kTwoPi);
}

HeadingMode random_walk_mode(Rng& rng, bool allow_any) {
  static constexpr HeadingMode kModes[] = {HeadingMode::ParallelForward, HeadingMode::ParallelBackward,
                                           HeadingMode::PerpendicularAway, HeadingMode::Any};
  return kModes[pick(rng, allow_any ? 4 : 3)];
}

double walking_heading(const PhysicalObject& p, HeadingMode mode, const PlanningScenario& sc, Rng& rng) {
  if (mode == HeadingMode::Any) return uniform(rng, 0.0, kTwoPi);
  const Lane& lane = nearest_of(p.center, sc.map, sc.protected_lanes());
  const LaneProjection pr = project(p.center, lane);
  const double lane_heading = lane.heading(pr.s);
  switch (mode) {
    case HeadingMode::ParallelForward: return heading_in_range(lane_heading);
    case HeadingMode::ParallelBackward: return heading_in_range(lane_heading + std::numbers::pi);
    default: break;
  }
  const Point2 away = p.center - pr.foot;
  if (norm(away) == 0.0) return heading_in_range(lane_heading + 0.5 * std::numbers::pi);
  return heading_in_range(std::atan2(away.y, away.x));
}

bool is_moving_constraint(ConstraintKind k) {
  return k == ConstraintKind::PI_C5_DynamicOffRoad || k == ConstraintKind::PI_C2_FollowingVehicle ||
         k == ConstraintKind::PI_C3_IrrelevantVehicle;
}

// Speed and trajectory without any constraint check.
PhysicalObject add_motion(PhysicalObject o, ConstraintKind k, HeadingMode mode, const PlanningScenario& sc, Rng& rng) {
  o.trajectory.clear();
  if (!is_moving_constraint(k)) {
    o.speed = 0.0;
    return o;
  }
  if (o.type == ObjectType::Pedestrian) {
    if (!(o.speed > 0.0 && o.speed <= dims::kPedestrianMaxSpeed)) {
      o.speed = dims::kPedestrianMaxSpeed * (1.0 - uniform(rng, 0.0, 1.0));
    }
    o.heading = walking_heading(o, mode, sc, rng);
  } else if (o.type == ObjectType::Vehicle) {
    o.speed = sc.ego.speed;
    const FrenetPose fp = transform(o.center, sc.map);
    o.heading = heading_in_range(sc.map.lane(fp.lane_id).heading(fp.s));
  } else {
    o.speed = 0.0;
    return o;
  }
  try {
    o.trajectory = synthesize_trajectory(o, sc.map);
  } catch (const SynthesisError&) {
    o.speed = 0.0;
    o.trajectory.clear();
  }
  return o;
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Full: return "full";
    case Mode::NoGuide: return "no-guide";
    case Mode::NoPI: return "no-pi";
    case Mode::Unconstrained: return "unconstrained";
  }
  return "?";
}

std::optional<Mode> mode_from_string(const std::string& s) {
  for (Mode m : {Mode::Full, Mode::NoGuide, Mode::NoPI, Mode::Unconstrained}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

PhysicalObject random_static_object(ObjectType type, const EgoState& ego, Rng& rng) {
  PhysicalObject o;
  o.type = type;
  o.center = {ego.position.x + uniform(rng, -defaults::kPositionRange, defaults::kPositionRange),
              ego.position.y + uniform(rng, -defaults::kPositionRange, defaults::kPositionRange)};
  set_dims(o, rng);
  o.heading = random_heading(type, rng);
  return o;
}

PhysicalObject mutate_static(const PhysicalObject& obj, Rng& rng, double sigma, double p_resize, double p_reheading) {
  PhysicalObject o = obj;
  if (sigma > 0.0) {
    std::normal_distribution<double> n(0.0, sigma);
    o.center.x += n(rng);
    o.center.y += n(rng);
  }
  if (o.type == ObjectType::StaticObject && chance(rng, p_resize)) set_dims(o, rng);
  if (chance(rng, p_reheading)) o.heading = random_heading(o.type, rng);
  return o;
}

std::optional<PhysicalObject> enforce_off_road(const PhysicalObject& obj, const LaneMap& map,
                                               const std::vector<int>& lanes,
                                               const std::optional<PhysicalObject>& pre, int max_iterations) {
  PhysicalObject x = obj;
  std::optional<Point2> direction;
  if (pre && !(pre->center == obj.center)) direction = obj.center - pre->center;

  for (int it = 0; it <= max_iterations; ++it) {
    const Lane* violated = nullptr;
    double intrusion = 0.0;
    const Polygon poly = x.polygon();
    for (int id : lanes) {
      const Lane& lane = map.lane(id);
      if (auto d = band_intrusion(poly, lane)) {
        violated = &lane;
        intrusion = *d;
        break;
      }
    }
    if (!violated) return x;
    if (it == max_iterations) break;

    const Lane& lane = *violated;
    const LaneProjection p = project(x.center, lane);
    const double lane_heading = lane.heading(p.s);
    const Point2 normal = left_normal(lane_heading);
    const double band = lane.half_width() + lateral_half_extent(x.length, x.width, x.heading, lane_heading);
    double l = p.l;
    if (std::abs(p.l) < band) {
      const double along = direction ? dot(*direction, normal) : 0.0;
      if (along != 0.0) {
        // Push through the band in the mutation direction, keeping the relative offset.
        const double side = along > 0.0 ? 1.0 : -1.0;
        l = p.l + side * 2.0 * band;
        if (std::abs(l) <= band) l = side * (band + kEnforceMargin);
      } else {
        const double side = p.l > 0.0 ? 1.0 : -1.0;
        l = side * (band + kEnforceMargin);
        direction = normal * side;
      }
    } else {
      // Center outside the band but a corner still intrudes (curved lane or lane end).
      const double side = p.l >= 0.0 ? 1.0 : -1.0;
      l = p.l + side * (lane.half_width() - intrusion + kEnforceMargin);
      if (!direction) direction = normal * side;
    }
    x.center = frenet_to_world(p.s, l, lane);
  }
  return std::nullopt;
}

std::optional<PhysicalObject> enforce_on_lane(const PhysicalObject& vehicle, const LaneMap& map,
                                              const std::vector<int>& allowed_lanes,
                                              const std::optional<PhysicalObject>& pre, double s_min, double s_max) {
  if (allowed_lanes.empty()) return std::nullopt;
  const Lane* lane = nullptr;
  if (pre && !map.empty()) {
    const int prev = transform(pre->center, map).lane_id;
    if (std::find(allowed_lanes.begin(), allowed_lanes.end(), prev) != allowed_lanes.end()) lane = &map.lane(prev);
  }
  if (!lane) lane = &nearest_of(vehicle.center, map, allowed_lanes);

  const double room = lane->half_width() - 0.5 * vehicle.width;
  if (room < 0.0) return std::nullopt;
  const double lo = std::max(s_min, 0.5 * vehicle.length);
  const double hi = std::min(s_max, lane->length() - 0.5 * vehicle.length);
  if (hi < lo) return std::nullopt;

  const LaneProjection p = project(vehicle.center, *lane);
  const double s = wrap(p.s, lo, hi);
  double l = p.l;
  if (std::abs(l) > room) l = pre ? wrap(l, -room, room) : 0.0;

  PhysicalObject v = vehicle;
  v.center = frenet_to_world(s, l, *lane);
  v.heading = heading_in_range(lane->heading(s));
  return v;
}

std::optional<PhysicalObject> enforce_ahead_of_blocker(const PhysicalObject& obj, const PlanningScenario& sc) {
  const PhysicalObject* blocker = sc.blocker();
  if (!blocker) return std::nullopt;
  const Lane& lane = sc.map.lane(transform(blocker->center, sc.map).lane_id);
  double blocker_end = -std::numeric_limits<double>::infinity();
  for (const auto& c : blocker->polygon()) blocker_end = std::max(blocker_end, project(c, lane).s);

  PhysicalObject x = obj;
  const LaneProjection p = project(x.center, lane);
  if (x.type == ObjectType::Vehicle) x.heading = heading_in_range(lane.heading(p.s));
  const double h = lane.heading(p.s);
  const double ext_l = lateral_half_extent(x.length, x.width, x.heading, h);
  const double ext_s = longitudinal_half_extent(x.length, x.width, x.heading, h);
  const double room = lane.half_width() - ext_l;
  const double lo = blocker_end + ext_s + 1e-3;
  const double hi = lane.length() - ext_s;
  if (room < 0.0 || hi < lo) return std::nullopt;

  const double s = wrap(p.s, lo, hi);
  const double l = wrap(p.l, -room, room);
  x.center = frenet_to_world(s, l, lane);
  if (x.type == ObjectType::Vehicle) x.heading = heading_in_range(lane.heading(s));
  return x;
}

std::optional<PhysicalObject> enforce(ConstraintKind k, const PhysicalObject& obj, const PlanningScenario& sc,
                                      const std::optional<PhysicalObject>& pre, int max_iterations) {
  switch (k) {
    case ConstraintKind::PI_C1_StaticOffRoad:
    case ConstraintKind::PI_C4_StaticOffRoadPedestrian:
    case ConstraintKind::PI_C5_DynamicOffRoad:
      return enforce_off_road(obj, sc.map, sc.protected_lanes(), pre, max_iterations);
    case ConstraintKind::PI_C2_FollowingVehicle:
      return enforce_on_lane(obj, sc.map, {sc.ego.lane_id()}, pre, -std::numeric_limits<double>::infinity(),
                             sc.ego.pose.s - defaults::kSafetyFollowingDistance - kFollowMargin);
    case ConstraintKind::PI_C3_IrrelevantVehicle:
      return enforce_on_lane(obj, sc.map, c3_lanes(sc), pre, -std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity());
    case ConstraintKind::SP_PI_C1_StaticAheadOfBlocker:
    case ConstraintKind::SP_PI_C2_VehicleParkedAheadOfBlocker:
      return enforce_ahead_of_blocker(obj, sc);
  }
  return std::nullopt;
}

std::optional<PhysicalObject> generate_dynamic(const PhysicalObject& obj, ConstraintKind k, HeadingMode mode,
                                               const PlanningScenario& sc, Rng& rng) {
  const PhysicalObject o = add_motion(obj, k, mode, sc, rng);
  if (is_moving_constraint(k) && o.type == ObjectType::Pedestrian && o.trajectory.empty()) return std::nullopt;
  if (!satisfies(k, o, sc)) return std::nullopt;
  return o;
}

Generator::Generator(const PlanningScenario& base, const PlanningInvariant& pi, GenerationConfig config, bool enforce)
    : base_(base), pi_(&pi), config_(config), enforce_(enforce) {
  if (pi.kind != base.kind) {
    throw ConfigError(pi.id + " applies to " + to_string(pi.kind) + " scenarios, seed is " + to_string(base.kind));
  }
  for (const auto& [type, kinds] : pi.admissible) {
    if (!kinds.empty()) types_.push_back(type);
  }
  if (types_.empty()) throw ConfigError(pi.id + " admits no object type");
}

std::string Generator::fresh_id(Rng& rng) const {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id = "obj_";
  uint64_t v = rng();
  for (int i = 0; i < 10; ++i, v >>= 4) id += kHex[v & 0xf];
  return id;
}

bool Generator::gene_ok(const Gene& g) const {
  if (!validate_ranges(g.object, base_.ego).empty()) return false;
  return object_satisfies(*pi_, g.object, base_);
}

std::optional<Gene> Generator::finish(Gene g, const std::optional<PhysicalObject>& pre, Rng& rng) const {
  const ConstraintKind k = *g.constraint;
  auto enforced = enforce(k, g.object, base_, pre, config_.enforce_iterations);
  if (!enforced) return std::nullopt;
  auto dynamic = generate_dynamic(*enforced, k, g.heading_mode, base_, rng);
  if (!dynamic) return std::nullopt;
  g.object = *dynamic;
  if (!gene_ok(g)) return std::nullopt;
  return g;
}

Gene Generator::demoted(Rng& rng) const {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Gene g{random_static_object(ObjectType::StaticObject, base_.ego, rng), ConstraintKind::PI_C1_StaticOffRoad,
           HeadingMode::Any};
    g.object.id = fresh_id(rng);
    if (!enforce_) return g;
    if (auto r = finish(g, std::nullopt, rng)) return *r;
  }
  throw SynthesisError("no off-road placement found for a static obstacle");
}

Gene Generator::init_gene(Rng& rng) const {
  for (int attempt = 0; attempt < config_.max_retries; ++attempt) {
    const ObjectType type = types_[pick(rng, types_.size())];
    const auto& kinds = pi_->admissible.at(type);
    Gene g{random_static_object(type, base_.ego, rng), kinds[pick(rng, kinds.size())], HeadingMode::Any};
    g.object.id = fresh_id(rng);
    if (*g.constraint == ConstraintKind::PI_C5_DynamicOffRoad) g.heading_mode = random_walk_mode(rng, !enforce_);
    if (!enforce_) {
      g.object = add_motion(g.object, *g.constraint, g.heading_mode, base_, rng);
      return g;
    }
    if (auto r = finish(g, std::nullopt, rng)) return *r;
  }
  return demoted(rng);
}

Genome Generator::init_genome(Rng& rng) const {
  const int n = std::uniform_int_distribution<int>(1, config_.max_objects)(rng);
  Genome genome;
  for (int i = 0; i < n; ++i) genome.push_back(init_gene(rng));
  return genome;
}

Genome Generator::seed_genome(const std::vector<PhysicalObject>& objects) const {
  Genome genome;
  for (const auto& o : objects) {
    const auto it = pi_->admissible.find(o.type);
    if (it == pi_->admissible.end() || it->second.empty()) {
      throw ConfigError("seed object " + o.id + ": " + to_string(o.type) + " not admitted by " + pi_->id);
    }
    Gene g{o, std::nullopt, HeadingMode::Any};
    for (ConstraintKind k : it->second) {
      if (satisfies(k, o, base_)) {
        g.constraint = k;
        break;
      }
    }
    if (!g.constraint) {
      if (enforce_) throw ConfigError("seed object " + o.id + " satisfies no constraint of " + pi_->id);
      g.constraint = it->second.front();
    }
    if (enforce_ && *g.constraint == ConstraintKind::PI_C5_DynamicOffRoad) {
      const Lane& lane = nearest_of(o.center, base_.map, base_.protected_lanes());
      const double c = std::cos(o.heading - lane.heading(project(o.center, lane).s));
      g.heading_mode = c > 0.5    ? HeadingMode::ParallelForward
                       : c < -0.5 ? HeadingMode::ParallelBackward
                                  : HeadingMode::PerpendicularAway;
    }
    genome.push_back(std::move(g));
  }
  return genome;
}

Gene Generator::mutate_gene(const Gene& g, Rng& rng) const {
  Gene m = g;
  m.object = mutate_static(g.object, rng, config_.sigma, config_.p_resize, config_.p_reheading);
  if (!m.constraint) return m;
  // Occasionally switch between the type's admissible constraints, e.g. a standing pedestrian starts walking.
  const auto& kinds = pi_->admissible.at(m.object.type);
  bool switched = false;
  if (kinds.size() > 1 && chance(rng, config_.p_reheading)) {
    const ConstraintKind k = kinds[pick(rng, kinds.size())];
    switched = k != *m.constraint;
    m.constraint = k;
    if (switched) {
      m.heading_mode = HeadingMode::Any;
      m.object.speed = 0.0;
      m.object.trajectory.clear();
    }
  }
  if (m.constraint == ConstraintKind::PI_C5_DynamicOffRoad && (switched || chance(rng, config_.p_reheading))) {
    m.heading_mode = random_walk_mode(rng, !enforce_);
    m.object.speed = 0.0;
  }
  if (!enforce_) {
    m.object = add_motion(m.object, *m.constraint, m.heading_mode, base_, rng);
    return m;
  }
  if (auto r = finish(m, g.object, rng)) return *r;
  return g;
}

void Generator::mutate_genome(Genome& genome, Rng& rng) const {
  if (genome.empty()) {
    genome.push_back(init_gene(rng));
    return;
  }
  const size_t forced = pick(rng, genome.size());
  for (size_t i = 0; i < genome.size(); ++i) {
    if (i == forced || chance(rng, 0.5)) genome[i] = mutate_gene(genome[i], rng);
  }
  if (static_cast<int>(genome.size()) < config_.max_objects && chance(rng, config_.p_add)) {
    genome.push_back(init_gene(rng));
  }
  // A mutated copy of an existing gene; the enforcer may carry the copy across a lane band.
  if (static_cast<int>(genome.size()) < config_.max_objects && chance(rng, config_.p_duplicate)) {
    Gene copy = mutate_gene(genome[pick(rng, genome.size())], rng);
    copy.object.id = fresh_id(rng);
    genome.push_back(std::move(copy));
  }
  if (genome.size() > 1 && chance(rng, config_.p_remove)) genome.erase(genome.begin() + pick(rng, genome.size()));
}

std::pair<Genome, Genome> Generator::crossover(const Genome& a, const Genome& b, Rng& rng) const {
  Genome x = a;
  Genome y = b;
  const size_t common = std::min(a.size(), b.size());
  for (size_t i = 0; i < common; ++i) {
    if (chance(rng, 0.5)) std::swap(x[i], y[i]);
  }
  // Tail genes of the longer parent move across with probability 0.5.
  Genome& longer = a.size() > b.size() ? x : y;
  Genome& shorter = a.size() > b.size() ? y : x;
  Genome kept(longer.begin(), longer.begin() + common);
  for (size_t i = common; i < longer.size(); ++i) {
    if (chance(rng, 0.5) && static_cast<int>(shorter.size()) < config_.max_objects) {
      shorter.push_back(longer[i]);
    } else {
      kept.push_back(longer[i]);
    }
  }
  longer = std::move(kept);
  return {x, y};
}

PlanningScenario Generator::assemble(const Genome& genome) const {
  PlanningScenario sc = base_;
  for (const auto& g : genome) {
    PhysicalObject o = g.object;
    std::string id = o.id;
    for (int k = 2; sc.find_object(id); ++k) id = o.id + "_" + std::to_string(k);
    o.id = id;
    sc.objects.push_back(std::move(o));
  }
  return sc;
}

size_t tournament_select(const std::vector<double>& fitness, Rng& rng) {
  if (fitness.empty()) throw ConfigError("selection from an empty population");
  const size_t i = pick(rng, fitness.size());
  const size_t j = pick(rng, fitness.size());
  if (fitness[i] < fitness[j]) return i;
  if (fitness[j] < fitness[i]) return j;
  return chance(rng, 0.5) ? i : j;
}

}  // namespace semfuzz
