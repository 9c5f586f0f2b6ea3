#include "ucqrew/reduction.hpp"

#include <stdexcept>

namespace ucqrew {

std::vector<ConjunctiveQueryNeg> constraints_to_queries(const std::vector<Rule>& constraints) {
  std::vector<ConjunctiveQueryNeg> out;
  for (const Rule& r : constraints) {
    if (!r.head.empty()) throw std::invalid_argument("constraints_to_queries: rule has a head");
    ConjunctiveQueryNeg q;
    q.label = r.label;
    q.positives = r.body;
    out.push_back(std::move(q));
  }
  return out;
}

Rule negated_query_to_rule(const ConjunctiveQueryNeg& q) {
  if (q.negatives.empty())
    throw std::invalid_argument("negated_query_to_rule: query has no negated atom");
  Rule r;
  r.label = q.label;
  r.body = q.positives;
  std::vector<Csf> disjuncts;
  for (const Atom& n : q.negatives) disjuncts.push_back(Csf{n});
  r.head = Dsf(std::move(disjuncts));
  return r;
}

NormalizedProblem normalize_problem(const KnowledgeBase& kb, const Ucq& q) {
  if (auto diags = validate(kb, q); !diags.empty()) throw ValidationError(std::move(diags));

  NormalizedProblem out;
  RulePartition parts = partition(kb);
  out.rules = parts.existential;
  out.rules.insert(out.rules.end(), parts.disjunctive.begin(), parts.disjunctive.end());

  for (const auto& cq : q.cqs) {
    if (cq.negation_count() == 0) {
      out.positive_ucq.push_back({cq.positives, cq.answer_vars, Origin::Query, cq.label});
      continue;
    }
    VarSet answers(cq.answer_vars.begin(), cq.answer_vars.end());
    Substitution freeze = freezing(answers);
    ConjunctiveQueryNeg frozen = cq;
    frozen.positives = apply(freeze, cq.positives);
    frozen.negatives = apply(freeze, cq.negatives);
    frozen.answer_vars.clear();
    out.rules.push_back(negated_query_to_rule(frozen));
  }
  for (auto& c : constraints_to_queries(parts.constraints))
    out.positive_ucq.push_back({c.positives, {}, Origin::InconsistencyWitness, c.label});
  return out;
}

}  // namespace ucqrew
