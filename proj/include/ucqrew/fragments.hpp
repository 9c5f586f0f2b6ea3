#pragma once

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ucqrew/rules.hpp"

namespace ucqrew {

bool is_linear(const Rule& r);
bool is_disconnected(const Rule& r);
bool is_domain_restricted(const Rule& r);
bool is_cdr(const Rule& r);
bool is_clr(const Rule& r);
bool is_dder(const Rule& r);

// Marked body positions as (rule index, body atom index, argument index).
struct StickyMarking {
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> marked;
  bool converged = false;

  // Marked variables of rule `i`.
  VarSet variables(const std::vector<Rule>& rules, std::size_t i) const;
};

StickyMarking sticky_marking(const std::vector<Rule>& rules);
bool is_sticky(const std::vector<Rule>& rules);
// Whether the variables of rule `i` marked in `m` each occur once in its body.
bool sticky_compatible(const std::vector<Rule>& rules, const StickyMarking& m, std::size_t i);

// Edge (a, b): rule b depends on rule a, i.e. some head disjunct of a, used as a rule with
// body(a), has a piece unification with body(b) read as a query.
struct DependencyGraph {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  bool acyclic() const;
};

DependencyGraph dependency_graph(const std::vector<Rule>& rules);
bool is_agrd(const std::vector<Rule>& rules);

struct RuleFlags {
  std::string id;
  bool linear = false;
  bool disconnected = false;
  bool dr = false;
  bool cdr = false;
  bool clr = false;
  bool dder = false;
  bool sticky_compatible = false;
};

struct FusReport {
  std::vector<RuleFlags> rules;
  bool sticky = false;
  bool agrd = false;
  // Neither of the existential and disjunctive parts depends on the other. Informational only.
  bool parts_independent = false;
  bool guaranteed_fus = false;
  std::string reason;    // machine-readable name of the criterion that fired, empty if none
  std::string citation;  // the theorem that backs the verdict
  std::string verdict() const { return guaranteed_fus ? "guaranteed-fus" : "unknown"; }
};

// Constraints are listed with their flags but play no part in the verdict.
FusReport is_fus_guaranteed(const std::vector<Rule>& rules);

}  // namespace ucqrew
