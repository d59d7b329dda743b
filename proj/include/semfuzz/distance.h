#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace semfuzz {

enum class PredicateKind { Critical, NonCritical };

struct PredicateNode {
  std::string id;
  PredicateKind kind = PredicateKind::Critical;
  // Critical predicates: branch outcome (true/false) from which the target stays reachable.
  bool reachable_side = true;
  // Type and flag checks carry no operand difference.
  bool boolean = false;
};

struct DependenceEdge {
  std::string from;
  std::string to;
  bool control = true;  // false for data dependence
};

struct DependenceGraph {
  std::string subject;
  std::vector<PredicateNode> predicates;
  std::vector<std::string> statements;
  std::vector<std::string> targets;
  std::vector<DependenceEdge> edges;
};

// Throws ConfigError on malformed graphs (unknown node ids, duplicate ids, missing fields).
DependenceGraph parse_dependence_graph(const nlohmann::json& j);

// Minimum number of control edges on any dependence path from the predicate to one of the targets.
// Data edges are free but keep the chain connected. Throws ConfigError if no target is reachable.
int compute_cfd(const DependenceGraph& g, const std::string& predicate, const std::vector<std::string>& targets);

struct ProfileEntry {
  std::string id;
  PredicateKind kind = PredicateKind::Critical;
  int cfd = 0;
  bool reachable_side = true;
  bool boolean = false;
};

struct DistanceProfile {
  std::string subject;
  std::vector<ProfileEntry> entries;  // same order as the graph's predicate list

  static DistanceProfile build(const DependenceGraph& g);
  std::optional<size_t> index_of(const std::string& id) const;
};

struct PredicateEvent {
  size_t predicate = 0;
  bool taken = false;
  double diff = 0.0;
  bool operator==(const PredicateEvent&) const = default;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(size_t predicate, bool taken, double diff) = 0;
};

class NullSink final : public TraceSink {
 public:
  void record(size_t, bool, double) override {}
};

class RecordingSink final : public TraceSink {
 public:
  void record(size_t predicate, bool taken, double diff) override { events.push_back({predicate, taken, diff}); }
  std::vector<PredicateEvent> events;
};

struct BranchStats {
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  uint64_t n1 = 0;  // reachable side (critical) or side 1 (non-critical)
  uint64_t n2 = 0;
  double min_op = kInf;
  double min_op_1 = kInf;
  double min_op_2 = kInf;
  double max_op = 0.0;
  double max_op_1 = 0.0;
  double max_op_2 = 0.0;

  bool executed() const { return n1 + n2 > 0; }
  void add(bool side1, double diff);
};

// Accumulates branch statistics for one evaluation.
class StatsSink final : public TraceSink {
 public:
  explicit StatsSink(const DistanceProfile& profile);
  void record(size_t predicate, bool taken, double diff) override;
  const std::vector<BranchStats>& stats() const { return stats_; }

 private:
  const DistanceProfile* profile_;
  std::vector<BranchStats> stats_;
};

std::vector<BranchStats> stats_from_events(const DistanceProfile& profile, const std::vector<PredicateEvent>& events);

struct HistoryEntry {
  double max = 0.0;   // critical
  double max1 = 0.0;  // non-critical side 1
  double max2 = 0.0;  // non-critical side 2
};

struct History {
  std::vector<HistoryEntry> entries;

  explicit History(size_t n = 0) : entries(n) {}
  // Max-reduce: never decreases any entry.
  void update(const std::vector<BranchStats>& stats);
  void merge(const History& other);
};

inline constexpr double kDefaultWeightC = 0.5;

// An absent or unexecuted stats record yields 1.
double dfd_critical(const BranchStats* stats, double max_history, bool boolean = false);
double dfd_noncritical(const BranchStats* stats, double max_history_1, double max_history_2, bool boolean = false);

// Sum of CFD * DFD over critical predicates plus c times the same over non-critical ones.
// The history must already include this evaluation's stats.
double bpvd(const DistanceProfile& profile, const std::vector<BranchStats>& stats, const History& history, double c);

// Merges the evaluation's stats into a copy of a frozen history snapshot and returns its distance.
double bpvd_with_snapshot(const DistanceProfile& profile, const std::vector<BranchStats>& stats,
                          const History& snapshot, double c);

}  // namespace semfuzz
