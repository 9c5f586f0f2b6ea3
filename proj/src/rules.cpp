#include "ucqrew/rules.hpp"

#include <algorithm>
#include <sstream>

namespace ucqrew {

RuleKind Rule::kind() const {
  if (head.empty()) return RuleKind::Constraint;
  return head.size() == 1 ? RuleKind::Existential : RuleKind::Disjunctive;
}

VarSet Rule::frontier() const {
  VarSet b = body.vars();
  VarSet out;
  for (const auto& v : head.vars())
    if (b.contains(v)) out.insert(v);
  return out;
}

VarSet Rule::existential_vars() const {
  VarSet b = body.vars();
  VarSet out;
  for (const auto& v : head.vars())
    if (!b.contains(v)) out.insert(v);
  return out;
}

VarSet Rule::vars() const {
  VarSet v = body.vars();
  VarSet h = head.vars();
  v.insert(h.begin(), h.end());
  return v;
}

VarSet frontier(const Rule& r) { return r.frontier(); }

VarSet ConjunctiveQueryNeg::universal_vars() const {
  VarSet p = positives.vars();
  VarSet out;
  for (const auto& v : negatives.vars())
    if (!p.contains(v)) out.insert(v);
  return out;
}

VarSet ConjunctiveQueryNeg::frontier() const {
  VarSet p = positives.vars();
  VarSet out;
  for (const auto& v : negatives.vars())
    if (p.contains(v)) out.insert(v);
  return out;
}

Ucq Ucq::with_negations(std::size_t k) const {
  Ucq out;
  for (const auto& q : cqs)
    if (q.negation_count() == k) out.cqs.push_back(q);
  return out;
}

Ucq Ucq::with_many_negations() const {
  Ucq out;
  for (const auto& q : cqs)
    if (q.negation_count() >= 2) out.cqs.push_back(q);
  return out;
}

namespace {

template <typename Fn>
void for_each_atom(const KnowledgeBase& kb, const Ucq& queries, Fn&& fn) {
  for (const Atom& a : kb.facts) fn(a);
  for (const Rule& r : kb.rules) {
    for (const Atom& a : r.body) fn(a);
    for (const Csf& d : r.head)
      for (const Atom& a : d) fn(a);
  }
  for (const auto& q : queries.cqs) {
    for (const Atom& a : q.positives) fn(a);
    for (const Atom& a : q.negatives) fn(a);
  }
}

std::string describe(const std::optional<std::string>& label, const char* what) {
  return label ? std::string(what) + " [" + *label + "]" : std::string(what);
}

}  // namespace

std::map<std::string, std::size_t> KnowledgeBase::predicates() const {
  std::map<std::string, std::size_t> table;
  for_each_atom(*this, Ucq{}, [&](const Atom& a) { table.emplace(a.predicate, a.arity()); });
  return table;
}

RulePartition partition(const std::vector<Rule>& rules) {
  RulePartition p;
  for (const Rule& r : rules) {
    switch (r.kind()) {
      case RuleKind::Existential: p.existential.push_back(r); break;
      case RuleKind::Disjunctive: p.disjunctive.push_back(r); break;
      case RuleKind::Constraint: p.constraints.push_back(r); break;
    }
  }
  return p;
}

RulePartition partition(const KnowledgeBase& kb) { return partition(kb.rules); }

namespace {

std::string join(const std::vector<Diagnostic>& ds) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i) os << "; ";
    if (ds[i].line) os << ds[i].line << ':' << ds[i].column << ": ";
    os << ds[i].message;
  }
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate(const KnowledgeBase& kb, const Ucq& queries) {
  std::vector<Diagnostic> out;
  std::map<std::string, std::size_t> arity;
  std::set<std::string> reported;
  for_each_atom(kb, queries, [&](const Atom& a) {
    auto [it, inserted] = arity.emplace(a.predicate, a.arity());
    if (!inserted && it->second != a.arity() && reported.insert(a.predicate).second)
      out.push_back({0, 0,
                     "predicate '" + a.predicate + "' used with arity " +
                         std::to_string(it->second) + " and " + std::to_string(a.arity())});
  });
  for (const Rule& r : kb.rules)
    if (r.body.empty()) out.push_back({0, 0, describe(r.label, "rule") + " has an empty body"});
  for (const auto& q : queries.cqs) {
    VarSet pos = q.positives.vars();
    for (const auto& v : q.answer_vars)
      if (!pos.contains(v))
        out.push_back({0, 0,
                       describe(q.label, "query") + ": answer variable " + v +
                           " does not occur in a positive atom"});
    if (q.positives.empty() && !q.negatives.empty())
      out.push_back({0, 0, describe(q.label, "query") + " has no positive atom"});
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Rule& r) {
  os << r.body << " -> ";
  if (r.head.empty()) return os << "bottom";
  if (r.head.size() == 1) return os << r.head[0];
  return os << r.head;
}

}  // namespace ucqrew
