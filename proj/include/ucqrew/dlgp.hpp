#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ucqrew/rules.hpp"

namespace ucqrew::dlgp {

struct Statement {
  enum class Kind { Fact, Rule, Constraint, Query };
  Kind kind = Kind::Fact;
  std::optional<std::string> label;
  Csf facts;               // Kind::Fact
  Rule rule;               // Kind::Rule and Kind::Constraint
  ConjunctiveQueryNeg query;  // Kind::Query
  std::size_t line = 0;
  std::size_t column = 0;

  // Structural equality: source positions are ignored.
  bool operator==(const Statement& other) const;
};

struct Document {
  std::optional<std::string> base;
  std::vector<std::pair<std::string, std::string>> prefixes;  // in declaration order
  bool una = false;
  std::vector<Statement> statements;

  KnowledgeBase kb() const;  // facts, rules and constraints
  Ucq queries() const;
  bool operator==(const Document&) const = default;
};

struct ParseResult {
  Document document;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// Never throws on malformed input: every problem becomes a diagnostic with a 1-based line and
// column, and parsing resumes after the next '.'. Statements with errors are dropped.
ParseResult parse(std::string_view text);

// Prefixed names are already expanded on input, so printed terms never use prefixes. The
// directives are echoed so that parse(print(d)) == d.
std::string print(const Document& doc);
std::string print(const Term& t);
std::string print(const Atom& a);
std::string print(const Rule& r);
std::string print(const ConjunctiveQueryNeg& q);
std::string print(const Ucq& ucq);
std::string print(const std::vector<Rule>& rules);

// One query statement per CQ; `answer_vars` become the ?(...) list.
std::string print_cq(const Csf& atoms, const std::vector<std::string>& answer_vars,
                     const std::optional<std::string>& label = std::nullopt);

}  // namespace ucqrew::dlgp
