#include "ucqrew/fragments.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "ucqrew/piece.hpp"

namespace ucqrew {

namespace {

std::vector<Atom> head_atoms(const Rule& r) {
  std::vector<Atom> out;
  for (const Csf& d : r.head) out.insert(out.end(), d.begin(), d.end());
  return out;
}

VarSet intersect(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

struct Component {
  VarSet vars;
  std::size_t atoms;
};

std::vector<Component> body_components(const Rule& r) {
  std::vector<Component> out;
  for (const Csf& c : connected_components(r.body)) out.push_back({c.vars(), c.size()});
  return out;
}

}  // namespace

bool is_linear(const Rule& r) { return r.body.size() == 1; }

bool is_disconnected(const Rule& r) { return r.frontier().empty(); }

bool is_domain_restricted(const Rule& r) {
  const VarSet body = r.body.vars();
  for (const Atom& h : head_atoms(r)) {
    VarSet shared = intersect(h.vars(), body);
    if (!shared.empty() && shared != body) return false;
  }
  return true;
}

bool is_cdr(const Rule& r) {
  const auto comps = body_components(r);
  for (const Atom& h : head_atoms(r)) {
    const VarSet hv = h.vars();
    for (const auto& c : comps) {
      VarSet shared = intersect(hv, c.vars);
      if (!shared.empty() && shared != c.vars) return false;
    }
  }
  return true;
}

bool is_clr(const Rule& r) {
  const auto comps = body_components(r);
  for (const Atom& h : head_atoms(r)) {
    const VarSet hv = h.vars();
    std::size_t touched = 0;
    bool single_atom = true;
    for (const auto& c : comps)
      if (!intersect(hv, c.vars).empty()) {
        ++touched;
        single_atom = single_atom && c.atoms == 1;
      }
    if (touched > 1 || (touched == 1 && !single_atom)) return false;
  }
  return true;
}

bool is_dder(const Rule& r) {
  for (const auto& c : body_components(r)) {
    std::size_t fed = 0;
    for (const Csf& d : r.head)
      if (!intersect(d.vars(), c.vars).empty()) ++fed;
    if (fed > 1) return false;
  }
  return true;
}

VarSet StickyMarking::variables(const std::vector<Rule>& rules, std::size_t i) const {
  VarSet out;
  const auto& body = rules[i].body.atoms();
  for (const auto& [ri, ai, k] : marked)
    if (ri == i) out.insert(body[ai].args[k].name());
  return out;
}

StickyMarking sticky_marking(const std::vector<Rule>& rules) {
  std::vector<VarSet> marked(rules.size());
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto head = head_atoms(rules[i]);
    for (const auto& v : rules[i].body.vars())
      for (const Atom& h : head)
        if (!h.vars().contains(v)) {
          marked[i].insert(v);
          break;
        }
  }

  // Propagate through (predicate, argument index) positions until nothing changes.
  using Position = std::pair<std::string, std::size_t>;
  StickyMarking out;
  for (bool changed = true; changed;) {
    changed = false;
    std::set<Position> positions;
    for (std::size_t i = 0; i < rules.size(); ++i)
      for (const Atom& a : rules[i].body)
        for (std::size_t k = 0; k < a.arity(); ++k)
          if (a.args[k].is_variable() && marked[i].contains(a.args[k].name()))
            positions.emplace(a.predicate, k);
    for (std::size_t j = 0; j < rules.size(); ++j) {
      const VarSet body = rules[j].body.vars();
      for (const Atom& h : head_atoms(rules[j]))
        for (std::size_t k = 0; k < h.arity(); ++k) {
          const Term& x = h.args[k];
          if (!x.is_variable() || !body.contains(x.name())) continue;
          if (positions.contains({h.predicate, k}) && marked[j].insert(x.name()).second)
            changed = true;
        }
    }
  }
  out.converged = true;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& body = rules[i].body.atoms();
    for (std::size_t a = 0; a < body.size(); ++a)
      for (std::size_t k = 0; k < body[a].arity(); ++k)
        if (body[a].args[k].is_variable() && marked[i].contains(body[a].args[k].name()))
          out.marked.emplace(i, a, k);
  }
  return out;
}

bool sticky_compatible(const std::vector<Rule>& rules, const StickyMarking& m, std::size_t i) {
  std::map<std::string, std::size_t> occurrences;
  for (const auto& [ri, ai, k] : m.marked)
    if (ri == i) ++occurrences[rules[i].body.atoms()[ai].args[k].name()];
  return std::all_of(occurrences.begin(), occurrences.end(),
                     [](const auto& e) { return e.second <= 1; });
}

bool is_sticky(const std::vector<Rule>& rules) {
  StickyMarking m = sticky_marking(rules);
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (!sticky_compatible(rules, m, i)) return false;
  return true;
}

bool DependencyGraph::acyclic() const {
  std::vector<std::vector<std::size_t>> succ(nodes);
  for (const auto& [a, b] : edges) succ[a].push_back(b);
  enum Color { White, Grey, Black };
  std::vector<Color> color(nodes, White);
  std::function<bool(std::size_t)> cyclic_from = [&](std::size_t v) {
    color[v] = Grey;
    for (std::size_t w : succ[v]) {
      if (color[w] == Grey) return true;
      if (color[w] == White && cyclic_from(w)) return true;
    }
    color[v] = Black;
    return false;
  };
  for (std::size_t v = 0; v < nodes; ++v)
    if (color[v] == White && cyclic_from(v)) return false;
  return true;
}

namespace {

bool depends(const Rule& from, const Rule& to) {
  for (const Csf& d : from.head) {
    NameSupply names;
    Rule r = rename_apart(Rule{from.label, from.body, Dsf{d}}, to.body.vars(), names);
    bool found = false;
    for_each_piece_unification(r, to.body, [&](const PieceUnification&) {
      found = true;
      return false;
    });
    if (found) return true;
  }
  return false;
}

}  // namespace

DependencyGraph dependency_graph(const std::vector<Rule>& rules) {
  DependencyGraph g;
  g.nodes = rules.size();
  for (std::size_t a = 0; a < rules.size(); ++a)
    for (std::size_t b = 0; b < rules.size(); ++b)
      if (depends(rules[a], rules[b])) g.edges.emplace_back(a, b);
  return g;
}

bool is_agrd(const std::vector<Rule>& rules) { return dependency_graph(rules).acyclic(); }

namespace {

struct Criterion {
  const char* name;
  const char* citation;
};

constexpr Criterion kLinear{"linear", "Linear existential rules are a fus"};
constexpr Criterion kDisconnected{
    "disconnected",
    "Let R1 be a fus and R2 a set of disconnected existential rules. The union of both sets is "
    "also a fus"};
constexpr Criterion kDr{"dr", "Domain restricted existential rules are a fus"};
constexpr Criterion kCdr{"cdr", "A set of cdr existential rules is a fus"};
constexpr Criterion kClr{"clr", "A set of connected linear existential rules is a fus"};
constexpr Criterion kSticky{"sticky", "Sticky existential rules are a fus"};
constexpr Criterion kAgrd{
    "agrd", "Existential rules with an acyclic graph of rule dependencies are a fus"};
constexpr const char* kDisjunctiveCitation =
    "If the existential rules are a fus, and the disjunctive rules a set of disconnected "
    "disjunctive existential rules, then the whole set is also a fus";
constexpr const char* kDderCitation =
    "Let R be a DDER that is also a cdr (clr). Then, R is also a fus";

// The criterion under which a set of existential rules is a fus. Disconnected rules are set
// aside first, since adding them to a fus keeps it a fus.
std::optional<Criterion> existential_criterion(const std::vector<Rule>& rules,
                                               const std::vector<RuleFlags>& flags) {
  std::vector<Rule> core;
  std::vector<const RuleFlags*> core_flags;
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (!flags[i].disconnected) {
      core.push_back(rules[i]);
      core_flags.push_back(&flags[i]);
    }
  if (core.empty()) return kDisconnected;
  auto all = [&](bool RuleFlags::*flag) {
    return std::all_of(core_flags.begin(), core_flags.end(),
                       [&](const RuleFlags* f) { return f->*flag; });
  };
  if (all(&RuleFlags::linear)) return kLinear;
  if (all(&RuleFlags::dr)) return kDr;
  if (all(&RuleFlags::cdr)) return kCdr;
  if (all(&RuleFlags::clr)) return kClr;
  if (is_sticky(core)) return kSticky;
  if (is_agrd(core)) return kAgrd;
  return std::nullopt;
}

}  // namespace

FusReport is_fus_guaranteed(const std::vector<Rule>& rules) {
  FusReport report;
  std::vector<Rule> classified;
  std::vector<Rule> existential, disjunctive;
  std::vector<RuleFlags> ex_flags;
  bool all_disjunctive_disconnected = true;

  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& r = rules[i];
    RuleFlags f;
    f.id = r.label ? *r.label : "r" + std::to_string(i);
    f.linear = is_linear(r);
    f.disconnected = is_disconnected(r);
    f.dr = is_domain_restricted(r);
    f.cdr = is_cdr(r);
    f.clr = is_clr(r);
    f.dder = is_dder(r);
    report.rules.push_back(f);
    if (r.kind() == RuleKind::Constraint) continue;
    classified.push_back(r);
    if (r.kind() == RuleKind::Existential) {
      existential.push_back(r);
      ex_flags.push_back(f);
    } else {
      disjunctive.push_back(r);
      all_disjunctive_disconnected = all_disjunctive_disconnected && f.disconnected;
    }
  }

  StickyMarking marking = sticky_marking(rules);
  for (std::size_t i = 0; i < rules.size(); ++i)
    report.rules[i].sticky_compatible = sticky_compatible(rules, marking, i);
  report.sticky = is_sticky(classified);

  DependencyGraph graph = dependency_graph(classified);
  report.agrd = graph.acyclic();
  report.parts_independent = true;
  for (const auto& [a, b] : graph.edges)
    if ((classified[a].kind() == RuleKind::Existential) !=
        (classified[b].kind() == RuleKind::Existential))
      report.parts_independent = false;

  auto existential_fus = existential_criterion(existential, ex_flags);
  if (disjunctive.empty()) {
    if (existential_fus) {
      report.guaranteed_fus = true;
      report.reason = existential_fus->name;
      report.citation = existential_fus->citation;
    }
    return report;
  }
  if (existential_fus && all_disjunctive_disconnected) {
    report.guaranteed_fus = true;
    report.reason = std::string("disconnected-disjunctive+") + existential_fus->name;
    report.citation = kDisjunctiveCitation;
    return report;
  }
  bool all_dder = true, all_cdr = true, all_clr = true;
  for (const Rule& r : classified) {
    all_dder = all_dder && is_dder(r);
    all_cdr = all_cdr && is_cdr(r);
    all_clr = all_clr && is_clr(r);
  }
  if (all_dder && (all_cdr || all_clr)) {
    report.guaranteed_fus = true;
    report.reason = all_cdr ? "dder+cdr" : "dder+clr";
    report.citation = kDderCitation;
  }
  return report;
}

}  // namespace ucqrew
