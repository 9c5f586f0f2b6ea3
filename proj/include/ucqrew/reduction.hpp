#pragma once

#include <vector>

#include "ucqrew/rules.hpp"

namespace ucqrew {

enum class Origin { Query, InconsistencyWitness };

// A positive CQ of the normalized problem, tagged with where it came from.
struct SourcedCq {
  Csf atoms;
  std::vector<std::string> answer_vars;
  Origin origin = Origin::Query;
  std::optional<std::string> label;
};

struct NormalizedProblem {
  std::vector<Rule> rules;            // existential and disjunctive only
  std::vector<SourcedCq> positive_ucq;
};

// B -> bottom becomes the Boolean query B. Throws std::invalid_argument on a non-empty head.
std::vector<ConjunctiveQueryNeg> constraints_to_queries(const std::vector<Rule>& constraints);

// P, -N1, ..., -Nk becomes P -> [N1, ..., Nk]; variables only in negated atoms turn into existential
// variables of the head. Answer variables must be frozen by the caller beforehand. Throws
// std::invalid_argument when the query has no negated atom.
Rule negated_query_to_rule(const ConjunctiveQueryNeg& q);

// Constraint-free rule set plus positive UCQ with the same entailment. Answer variables of
// negated queries are frozen into the generated rules. Throws ValidationError when validate()
// reports anything.
NormalizedProblem normalize_problem(const KnowledgeBase& kb, const Ucq& q);

}  // namespace ucqrew
