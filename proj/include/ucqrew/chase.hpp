#pragma once

#include <vector>

#include "ucqrew/rules.hpp"

namespace ucqrew {

// Facts are ground. Labeled nulls are constants named "_:n<k>", which no parsed constant can
// be; variables in the input facts become nulls "_:<name>".
struct Branch {
  Csf facts;
  std::size_t depth = 0;
};

struct ChaseResult {
  std::vector<Branch> branches;
  bool saturated = false;  // no rule applicable on any branch
  bool overflow = false;   // the branch cap stopped a split; branches are then incomplete
};

inline constexpr std::size_t kDefaultBranchCap = 256;

// Restricted disjunctive chase in breadth-first rounds. In each round the triggers of a
// branch are computed once, then applied in turn, each only if still active. Throws
// std::invalid_argument on a constraint.
ChaseResult chase(const std::vector<Rule>& rules, const Csf& facts, std::size_t max_depth,
                  std::size_t branch_cap = kDefaultBranchCap);

enum class Entailment { True, Unknown };

struct EntailmentDetail {
  Entailment result = Entailment::Unknown;
  bool saturated = false;        // the open branches admit no further rule application
  bool overflow = false;
  std::vector<Csf> open_branches;  // branches satisfying no CQ of the UCQ
};

// True iff every branch satisfies some CQ of `ucq` within `max_depth` rounds. Branches are
// closed as soon as they satisfy the UCQ.
EntailmentDetail entails_detailed(const std::vector<Rule>& rules, const Csf& facts,
                                  const std::vector<Csf>& ucq, std::size_t max_depth,
                                  std::size_t branch_cap = kDefaultBranchCap);
Entailment entails(const std::vector<Rule>& rules, const Csf& facts,
                   const std::vector<Csf>& ucq, std::size_t max_depth = 3);

}  // namespace ucqrew
