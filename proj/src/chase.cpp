#include "ucqrew/chase.hpp"

#include <functional>
#include <map>
#include <stdexcept>

namespace ucqrew {

namespace {

using Binding = std::map<std::string, Term>;

class FactIndex {
 public:
  explicit FactIndex(const Csf& facts) {
    for (const Atom& a : facts) by_pred_[a.predicate].push_back(&a);
  }

  const std::vector<const Atom*>& with_predicate(const std::string& p) const {
    static const std::vector<const Atom*> none;
    auto it = by_pred_.find(p);
    return it == by_pred_.end() ? none : it->second;
  }

 private:
  std::map<std::string, std::vector<const Atom*>> by_pred_;
};

// Enumerates extensions of `b` that map every atom of `pattern` onto a fact. `visit` returns
// false to stop; the function then returns false too.
bool match(const std::vector<Atom>& pattern, std::size_t i, const FactIndex& index, Binding& b,
           const std::function<bool(const Binding&)>& visit) {
  if (i == pattern.size()) return visit(b);
  const Atom& p = pattern[i];
  for (const Atom* f : index.with_predicate(p.predicate)) {
    if (f->arity() != p.arity()) continue;
    std::vector<std::string> bound_here;
    bool ok = true;
    for (std::size_t k = 0; k < p.arity() && ok; ++k) {
      const Term& t = p.args[k];
      if (t.is_constant()) {
        ok = t == f->args[k];
        continue;
      }
      auto it = b.find(t.name());
      if (it == b.end()) {
        b.emplace(t.name(), f->args[k]);
        bound_here.push_back(t.name());
      } else {
        ok = it->second == f->args[k];
      }
    }
    bool keep_going = !ok || match(pattern, i + 1, index, b, visit);
    for (const auto& v : bound_here) b.erase(v);
    if (!keep_going) return false;
  }
  return true;
}

bool satisfied(const Csf& disjunct, const Binding& frontier, const Csf& facts) {
  FactIndex index(facts);
  Binding b = frontier;
  bool found = false;
  match(disjunct.atoms(), 0, index, b, [&](const Binding&) {
    found = true;
    return false;
  });
  return found;
}

bool active(const Rule& r, const Binding& h, const Csf& facts) {
  for (const Csf& d : r.head)
    if (satisfied(d, h, facts)) return false;
  return true;
}

struct Trigger {
  std::size_t rule;
  Binding binding;
};

class Chaser {
 public:
  explicit Chaser(const std::vector<Rule>& rules) : rules_(rules) {
    for (const Rule& r : rules)
      if (r.kind() == RuleKind::Constraint)
        throw std::invalid_argument("chase: constraints must be posed as queries");
  }

  static Csf ground(const Csf& facts) {
    Substitution s;
    for (const auto& v : facts.vars()) s.bind(v, Term::constant("_:" + v));
    return apply(s, facts);
  }

  std::vector<Trigger> triggers(const Csf& facts) const {
    std::vector<Trigger> out;
    FactIndex index(facts);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      Binding b;
      match(rules_[i].body.atoms(), 0, index, b, [&](const Binding& h) {
        if (active(rules_[i], h, facts)) out.push_back({i, h});
        return true;
      });
    }
    return out;
  }

  Csf fire(const Binding& h, const Csf& disjunct, const Csf& facts) {
    Substitution s;
    for (const auto& [v, t] : h) s.bind(v, t);
    for (const auto& v : disjunct.vars())
      if (!h.contains(v)) s.bind(v, Term::constant("_:n" + std::to_string(next_null_++)));
    return merge(facts, apply(s, disjunct));
  }

  // One round on one branch. Appends the children to `out`; false when the cap was hit.
  bool round(const Branch& b, std::vector<Branch>& out, std::size_t budget) {
    std::vector<Csf> partial{b.facts};
    bool fired = false;
    for (const Trigger& t : triggers(b.facts)) {
      const Rule& r = rules_[t.rule];
      std::vector<Csf> next;
      for (const Csf& p : partial) {
        if (!active(r, t.binding, p)) {
          next.push_back(p);
          continue;
        }
        fired = true;
        for (const Csf& d : r.head) next.push_back(fire(t.binding, d, p));
      }
      if (next.size() > budget) return false;
      partial = std::move(next);
    }
    for (Csf& p : partial) out.push_back({std::move(p), fired ? b.depth + 1 : b.depth});
    return true;
  }

  const std::vector<Rule>& rules_;
  std::size_t next_null_ = 0;
};

bool satisfies_some(const Csf& facts, const std::vector<Csf>& ucq) {
  for (const Csf& q : ucq)
    if (entails_facts(facts, q)) return true;
  return false;
}

// Shared driver: `closed` decides which branches need no further work.
template <typename Closed>
ChaseResult run(const std::vector<Rule>& rules, const Csf& facts, std::size_t max_depth,
                std::size_t cap, Closed closed) {
  Chaser chaser(rules);
  ChaseResult res;
  std::vector<Branch> open;
  Branch root{Chaser::ground(facts), 0};
  if (closed(root.facts))
    res.branches.push_back(std::move(root));
  else
    open.push_back(std::move(root));

  for (std::size_t depth = 0; depth < max_depth && !open.empty(); ++depth) {
    std::vector<Branch> next;
    bool any_fired = false;
    for (const Branch& b : open) {
      const std::size_t used = res.branches.size() + next.size();
      const std::size_t budget = cap > used ? cap - used : 0;
      std::size_t before = next.size();
      if (!chaser.round(b, next, budget)) {
        res.overflow = true;
        next.resize(before);
        next.push_back(b);
        continue;
      }
      for (std::size_t i = before; i < next.size(); ++i)
        if (next[i].depth > b.depth) any_fired = true;
    }
    open.clear();
    for (Branch& b : next) {
      if (closed(b.facts))
        res.branches.push_back(std::move(b));
      else
        open.push_back(std::move(b));
    }
    if (res.overflow || !any_fired) break;
  }

  res.saturated = !res.overflow;
  for (const Branch& b : open)
    if (!chaser.triggers(b.facts).empty()) res.saturated = false;
  res.branches.insert(res.branches.end(), open.begin(), open.end());
  return res;
}

}  // namespace

ChaseResult chase(const std::vector<Rule>& rules, const Csf& facts, std::size_t max_depth,
                  std::size_t branch_cap) {
  return run(rules, facts, max_depth, branch_cap, [](const Csf&) { return false; });
}

EntailmentDetail entails_detailed(const std::vector<Rule>& rules, const Csf& facts,
                                  const std::vector<Csf>& ucq, std::size_t max_depth,
                                  std::size_t branch_cap) {
  ChaseResult res = run(rules, facts, max_depth, branch_cap,
                        [&](const Csf& f) { return satisfies_some(f, ucq); });
  EntailmentDetail out;
  out.overflow = res.overflow;
  for (const Branch& b : res.branches)
    if (!satisfies_some(b.facts, ucq)) out.open_branches.push_back(b.facts);
  out.saturated = res.saturated;
  out.result = !res.overflow && out.open_branches.empty() ? Entailment::True : Entailment::Unknown;
  return out;
}

Entailment entails(const std::vector<Rule>& rules, const Csf& facts, const std::vector<Csf>& ucq,
                   std::size_t max_depth) {
  return entails_detailed(rules, facts, ucq, max_depth).result;
}

}  // namespace ucqrew
