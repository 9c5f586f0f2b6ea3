#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucqrew/formula.hpp"

namespace ucqrew {

enum class RuleKind { Constraint, Existential, Disjunctive };

// B -> [H1, ..., Hn]. Zero disjuncts is a negative constraint, one an existential rule, more a
// disjunctive existential rule.
struct Rule {
  std::optional<std::string> label;
  Csf body;
  Dsf head;

  RuleKind kind() const;
  VarSet frontier() const;
  VarSet existential_vars() const;
  VarSet vars() const;
  bool operator==(const Rule&) const = default;
};

// Variables of the positive atoms are existential, variables only in negated atoms are
// universally quantified. Answer variables are a subset of the positive variables.
struct ConjunctiveQueryNeg {
  std::optional<std::string> label;
  Csf positives;
  Csf negatives;
  std::vector<std::string> answer_vars;

  std::size_t negation_count() const { return negatives.size(); }
  VarSet universal_vars() const;
  VarSet frontier() const;
  bool operator==(const ConjunctiveQueryNeg&) const = default;
};

struct Ucq {
  std::vector<ConjunctiveQueryNeg> cqs;

  // Members with exactly k negated atoms.
  Ucq with_negations(std::size_t k) const;
  // Members with two or more negated atoms.
  Ucq with_many_negations() const;
};

struct KnowledgeBase {
  std::vector<Rule> rules;
  Csf facts;

  // Predicate arities as first seen. Conflicting uses are reported by validate().
  std::map<std::string, std::size_t> predicates() const;
};

struct RulePartition {
  std::vector<Rule> existential;
  std::vector<Rule> disjunctive;
  std::vector<Rule> constraints;
};

RulePartition partition(const KnowledgeBase& kb);
RulePartition partition(const std::vector<Rule>& rules);

VarSet frontier(const Rule& r);

struct Diagnostic {
  std::size_t line = 0;
  std::size_t column = 0;
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Arity conflicts, answer variables that no positive atom binds, rules and queries without a
// body. An empty list means the input is well formed.
std::vector<Diagnostic> validate(const KnowledgeBase& kb, const Ucq& queries = {});

std::ostream& operator<<(std::ostream& os, const Rule& r);

}  // namespace ucqrew
