#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "ucqrew/piece.hpp"
#include "ucqrew/reduction.hpp"

namespace ucqrew {

// Single rewriting steps. The rule is renamed apart from the query internally; `frozen`
// variables of the query behave as constants.
std::vector<Csf> existential_step(const Rule& r, const Csf& q, const VarSet& frozen = {});
std::vector<Rule> disjunctive_step(const Rule& r, const Csf& q, const VarSet& frozen = {});

// Subsumption cover of `ucq`: every dropped CQ is subsumed by a kept one. Earlier entries win
// between equivalent CQs.
std::vector<Csf> prune(const std::vector<Csf>& ucq, const VarSet& frozen = {});

// A step taken by the engine, reported to RewriteOptions::audit. Query and rule are in the
// engine's internal form: frozen variables appear as reserved constants.
struct StepRecord {
  Csf query;
  PieceUnification unifier;
  std::variant<Csf, Rule> result;
};

struct RewriteBudget {
  std::optional<std::size_t> max_iterations = 64;
  std::optional<std::chrono::milliseconds> timeout;
  std::size_t max_cqs = 200000;
  std::size_t max_rules = 200000;
};

struct RewriteOptions {
  std::optional<std::size_t> k = 2;  // levels per existential phase; nullopt is unbounded
  bool prune = true;                 // false keeps every CQ that is new up to renaming
  std::size_t jobs = 1;
  RewriteBudget budget;
  std::function<void(const StepRecord&)> audit;
};

struct CqRecord {
  Csf atoms;
  std::vector<std::string> answer_vars;
  Origin origin = Origin::Query;
  std::size_t generation = 0;
  std::size_t depth = 0;  // longest chain of steps behind this CQ
};

struct RuleRecord {
  Rule rule;
  std::size_t generation = 0;
  std::size_t depth = 0;
  bool input = false;
};

// The evolving pair of rule set and UCQ. Entries are only ever appended; `alive` marks the CQs
// in the current subsumption cover.
struct RewritingState {
  std::vector<RuleRecord> rules;
  std::vector<CqRecord> cqs;
  std::vector<bool> alive;
};

struct RewriteStats {
  std::size_t iterations = 0;
  std::size_t cq_generated = 0;
  std::size_t cq_kept = 0;
  std::size_t rules_generated = 0;
  std::size_t piece_unifications = 0;
};

struct RewriteResult {
  std::vector<CqRecord> ucq;  // thawed, canonically named, in generation order
  RewritingState state;
  bool converged = false;
  bool timed_out = false;
  bool completed_iteration = false;  // at least one outer iteration finished
  RewriteStats stats;
};

// Alternates existential expansion and disjunctive rule generation until neither adds
// anything, or the budget runs out (converged = false; the UCQ returned is still sound).
// `rules` must not contain constraints.
RewriteResult rewrite_k(const std::vector<Rule>& rules, const std::vector<SourcedCq>& ucq,
                        const RewriteOptions& options = {});
RewriteResult rewrite_k(const std::vector<Rule>& rules, const std::vector<Csf>& ucq,
                        const RewriteOptions& options = {}, const VarSet& frozen = {});

// k levels of breadth-first expansion with existential rules only.
std::vector<Csf> rewrite_exists_k(const std::vector<Rule>& existential_rules,
                                  const std::vector<Csf>& ucq, std::optional<std::size_t> k,
                                  const VarSet& frozen = {});

// Input rules plus every rule obtainable from them by disjunctive steps with CQs of `ucq`,
// closed under steps on the new disjunctive rules. Generated constraints are included as rules
// with an empty head.
std::vector<Rule> rewrite_disj(const std::vector<Rule>& rules, const std::vector<Csf>& ucq,
                               const VarSet& frozen = {});

// Equality up to variable renaming, with head disjuncts compared as a set.
bool alpha_equivalent(const Rule& a, const Rule& b);

}  // namespace ucqrew
