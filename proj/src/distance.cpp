#include "semfuzz/distance.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "semfuzz/geom.h"

namespace semfuzz {

namespace {

std::string required_string(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) throw ConfigError(where + ": missing string field '" + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

static DependenceGraph parse_graph_fields(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("dependence graph must be a JSON object");
  DependenceGraph g;
  g.subject = required_string(j, "subject", "graph");
  std::set<std::string> ids;
  auto add_id = [&](const std::string& id) {
    if (!ids.insert(id).second) throw ConfigError(g.subject + ": duplicate node id " + id);
  };

  for (const auto& p : j.at("predicates")) {
    PredicateNode n;
    n.id = required_string(p, "id", g.subject + " predicate");
    const std::string kind = required_string(p, "kind", n.id);
    if (kind == "critical") {
      n.kind = PredicateKind::Critical;
    } else if (kind == "noncritical") {
      n.kind = PredicateKind::NonCritical;
    } else {
      throw ConfigError(n.id + ": kind must be critical or noncritical");
    }
    n.reachable_side = p.value("reachable_side", true);
    n.boolean = p.value("boolean", false);
    add_id(n.id);
    g.predicates.push_back(n);
  }
  for (const auto& s : j.value("statements", nlohmann::json::array())) {
    g.statements.push_back(s.get<std::string>());
    add_id(g.statements.back());
  }
  for (const auto& t : j.at("targets")) {
    g.targets.push_back(t.get<std::string>());
    add_id(g.targets.back());
  }
  if (g.targets.empty()) throw ConfigError(g.subject + ": no attack target declared");
  for (const auto& e : j.at("edges")) {
    DependenceEdge edge;
    edge.from = required_string(e, "from", g.subject + " edge");
    edge.to = required_string(e, "to", g.subject + " edge");
    const std::string type = required_string(e, "type", g.subject + " edge");
    if (type != "control" && type != "data") throw ConfigError(g.subject + ": edge type must be control or data");
    edge.control = type == "control";
    if (!ids.count(edge.from) || !ids.count(edge.to)) {
      throw ConfigError(g.subject + ": edge " + edge.from + " -> " + edge.to + " names an unknown node");
    }
    g.edges.push_back(edge);
  }
  return g;
}

DependenceGraph parse_dependence_graph(const nlohmann::json& j) {
  try {
    return parse_graph_fields(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed dependence graph: ") + e.what());
  }
}

int compute_cfd(const DependenceGraph& g, const std::string& predicate, const std::vector<std::string>& targets) {
  std::map<std::string, std::vector<const DependenceEdge*>> out;
  for (const auto& e : g.edges) out[e.from].push_back(&e);

  // 0-1 BFS: control edges cost 1, data edges cost 0.
  std::map<std::string, int> dist{{predicate, 0}};
  std::deque<std::string> queue{predicate};
  while (!queue.empty()) {
    const std::string u = queue.front();
    queue.pop_front();
    const int du = dist[u];
    for (const DependenceEdge* e : out[u]) {
      const int w = e->control ? 1 : 0;
      auto it = dist.find(e->to);
      if (it == dist.end() || du + w < it->second) {
        dist[e->to] = du + w;
        if (w == 0) {
          queue.push_front(e->to);
        } else {
          queue.push_back(e->to);
        }
      }
    }
  }
  int best = -1;
  for (const auto& t : targets) {
    auto it = dist.find(t);
    if (it != dist.end() && (best < 0 || it->second < best)) best = it->second;
  }
  if (best < 0) throw ConfigError(g.subject + ": predicate " + predicate + " cannot reach any target");
  return best;
}

DistanceProfile DistanceProfile::build(const DependenceGraph& g) {
  DistanceProfile p;
  p.subject = g.subject;
  for (const auto& n : g.predicates) {
    p.entries.push_back({n.id, n.kind, compute_cfd(g, n.id, g.targets), n.reachable_side, n.boolean});
  }
  return p;
}

std::optional<size_t> DistanceProfile::index_of(const std::string& id) const {
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].id == id) return i;
  }
  return std::nullopt;
}

void BranchStats::add(bool side1, double diff) {
  diff = std::abs(diff);
  min_op = std::min(min_op, diff);
  max_op = std::max(max_op, diff);
  if (side1) {
    ++n1;
    min_op_1 = std::min(min_op_1, diff);
    max_op_1 = std::max(max_op_1, diff);
  } else {
    ++n2;
    min_op_2 = std::min(min_op_2, diff);
    max_op_2 = std::max(max_op_2, diff);
  }
}

namespace {

bool first_side(const ProfileEntry& e, bool taken) {
  return e.kind == PredicateKind::Critical ? taken == e.reachable_side : taken;
}

}  // namespace

StatsSink::StatsSink(const DistanceProfile& profile) : profile_(&profile), stats_(profile.entries.size()) {}

void StatsSink::record(size_t predicate, bool taken, double diff) {
  if (predicate >= stats_.size()) throw ConfigError("predicate index out of range for " + profile_->subject);
  stats_[predicate].add(first_side(profile_->entries[predicate], taken), diff);
}

std::vector<BranchStats> stats_from_events(const DistanceProfile& profile, const std::vector<PredicateEvent>& events) {
  StatsSink sink(profile);
  for (const auto& e : events) sink.record(e.predicate, e.taken, e.diff);
  return sink.stats();
}

void History::update(const std::vector<BranchStats>& stats) {
  if (entries.size() < stats.size()) entries.resize(stats.size());
  for (size_t i = 0; i < stats.size(); ++i) {
    const BranchStats& s = stats[i];
    if (!s.executed()) continue;
    entries[i].max = std::max(entries[i].max, s.max_op);
    entries[i].max1 = std::max(entries[i].max1, s.max_op_1);
    entries[i].max2 = std::max(entries[i].max2, s.max_op_2);
  }
}

void History::merge(const History& other) {
  if (entries.size() < other.entries.size()) entries.resize(other.entries.size());
  for (size_t i = 0; i < other.entries.size(); ++i) {
    entries[i].max = std::max(entries[i].max, other.entries[i].max);
    entries[i].max1 = std::max(entries[i].max1, other.entries[i].max1);
    entries[i].max2 = std::max(entries[i].max2, other.entries[i].max2);
  }
}

namespace {

// Operand ratio; a zero history means every diff so far was 0, i.e. operands already equal.
double op_ratio(double min_op, double max_history, bool boolean) {
  if (boolean) return 1.0;
  if (!(max_history > 0.0)) return 0.0;
  return std::min(1.0, min_op / max_history);
}

}  // namespace

double dfd_critical(const BranchStats* s, double max_history, bool boolean) {
  if (!s || !s->executed()) return 1.0;
  const double n = static_cast<double>(s->n1 + s->n2);
  if (s->n2 == 0) return 0.0;
  return static_cast<double>(s->n2) / n * op_ratio(s->min_op, max_history, boolean);
}

double dfd_noncritical(const BranchStats* s, double max_history_1, double max_history_2, bool boolean) {
  if (!s || !s->executed()) return 1.0;
  const double n = static_cast<double>(s->n1 + s->n2);
  double d = 0.0;
  if (s->n1 > 0) d += static_cast<double>(s->n1) / n * op_ratio(s->min_op_1, max_history_1, boolean);
  if (s->n2 > 0) d += static_cast<double>(s->n2) / n * op_ratio(s->min_op_2, max_history_2, boolean);
  return d;
}

double bpvd(const DistanceProfile& profile, const std::vector<BranchStats>& stats, const History& history, double c) {
  if (!(c > 0.0)) throw ConfigError("weight c must be positive");
  double critical = 0.0;
  double noncritical = 0.0;
  for (size_t i = 0; i < profile.entries.size(); ++i) {
    const ProfileEntry& e = profile.entries[i];
    const BranchStats* s = i < stats.size() ? &stats[i] : nullptr;
    const HistoryEntry h = i < history.entries.size() ? history.entries[i] : HistoryEntry{};
    if (e.kind == PredicateKind::Critical) {
      critical += e.cfd * dfd_critical(s, h.max, e.boolean);
    } else {
      noncritical += e.cfd * dfd_noncritical(s, h.max1, h.max2, e.boolean);
    }
  }
  return critical + c * noncritical;
}

double bpvd_with_snapshot(const DistanceProfile& profile, const std::vector<BranchStats>& stats,
                          const History& snapshot, double c) {
  History merged = snapshot;
  merged.update(stats);
  return bpvd(profile, stats, merged, c);
}

}  // namespace semfuzz
