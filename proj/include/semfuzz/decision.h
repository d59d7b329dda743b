#pragma once

#include <optional>
#include <string>

namespace semfuzz {

enum class Verdict {
  Clear,
  Blocked,
  ClearToChange,
  NotClear,
  BorrowLane,  // blocker judged non-movable, ego may borrow the neighbouring lane
  WaitBehind,  // blocker judged to be queueing, ego waits behind it
  PerceptionOk,
  PerceptionBlocked,
  Proceed,
  Stop,
  FullyBlocked,
};

const char* to_string(Verdict v);
std::optional<Verdict> verdict_from_string(const std::string& s);

struct PlanningDecision {
  std::string subject;
  Verdict verdict = Verdict::Clear;
  std::string reason;
  // Attack target whose code position executed, if any.
  std::optional<std::string> target;
};

}  // namespace semfuzz
