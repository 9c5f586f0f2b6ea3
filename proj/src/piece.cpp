#include "ucqrew/piece.hpp"

#include <algorithm>

namespace ucqrew {

Rule rename_apart(const Rule& r, const VarSet& reserved, NameSupply& names) {
  std::vector<Atom> all = r.body.atoms();
  for (const Csf& d : r.head) all.insert(all.end(), d.begin(), d.end());
  auto [_, renaming] = rename_apart(all, reserved, names);
  if (renaming.empty()) return r;
  Rule out;
  out.label = r.label;
  out.body = apply(renaming, r.body);
  out.head = apply(renaming, r.head);
  return out;
}

namespace {

class PieceEnumerator {
 public:
  PieceEnumerator(const Rule& rule, const Csf& query,
                  const std::function<bool(const PieceUnification&)>& visit)
      : rule_(rule), query_(query.atoms()), visit_(visit),
        frontier_(rule.frontier()), existential_(rule.existential_vars()) {
    for (const Csf& d : rule.head) {
      VarSet ex;
      for (const auto& v : d.vars())
        if (existential_.contains(v)) ex.insert(v);
      for (const auto& a : ex)
        for (const auto& b : ex)
          if (a < b) cooccurring_.emplace(a, b);
    }
    included_.assign(query_.size(), false);
  }

  void run() {
    const std::size_t m = rule_.head.size();
    if (m == 0 || m >= 8 * sizeof(unsigned long)) return;
    for (unsigned long mask = 1; mask < (1UL << m) && !stop_; ++mask) {
      selected_.clear();
      for (std::size_t i = 0; i < m; ++i)
        if (mask & (1UL << i)) selected_.push_back(i);
      targets_.assign(query_.size(), std::vector<std::size_t>(selected_.size(), 0));
      excluded_vars_.clear();
      dfs(0, TermClasses{}, 0);
    }
  }

 private:
  bool is_existential(const Term& t) const {
    return t.is_variable() && existential_.contains(t.name());
  }

  // Checks the restrictions that can only get worse as more terms are merged or more atoms
  // are left out of Q'.
  bool viable(const TermClasses& classes) const {
    for (const auto& cls : classes.classes()) {
      std::vector<const std::string*> ex;
      bool rigid = false;
      bool outside = false;
      for (const Term& t : cls) {
        if (t.is_constant()) {
          rigid = true;
        } else if (existential_.contains(t.name())) {
          ex.push_back(&t.name());
        } else if (frontier_.contains(t.name())) {
          rigid = true;
        } else if (excluded_vars_.contains(t.name())) {
          outside = true;
        }
      }
      if (ex.empty()) continue;
      if (rigid || outside) return false;
      for (std::size_t i = 0; i < ex.size(); ++i)
        for (std::size_t j = i + 1; j < ex.size(); ++j) {
          auto key = *ex[i] < *ex[j] ? std::pair(*ex[i], *ex[j]) : std::pair(*ex[j], *ex[i]);
          if (cooccurring_.contains(key)) return false;
        }
    }
    return true;
  }

  void dfs(std::size_t i, const TermClasses& classes, std::size_t count) {
    if (stop_) return;
    if (i == query_.size()) {
      if (count > 0) finalize(classes);
      return;
    }
    // Leave atom i in Q \ Q'.
    {
      VarSet added;
      for (const Term& t : query_[i].args)
        if (t.is_variable() && excluded_vars_.insert(t.name()).second) added.insert(t.name());
      included_[i] = false;
      if (viable(classes)) dfs(i + 1, classes, count);
      for (const auto& v : added) excluded_vars_.erase(v);
    }
    // Put atom i in Q'.
    included_[i] = true;
    choose(i, 0, classes, count);
    included_[i] = false;
  }

  void choose(std::size_t i, std::size_t j, const TermClasses& classes, std::size_t count) {
    if (stop_) return;
    if (j == selected_.size()) {
      dfs(i + 1, classes, count + 1);
      return;
    }
    const Atom& q = query_[i];
    const auto& atoms = rule_.head[selected_[j]].atoms();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const Atom& h = atoms[k];
      if (h.predicate != q.predicate || h.arity() != q.arity()) continue;
      TermClasses next = classes;
      bool ok = true;
      for (std::size_t a = 0; a < q.arity() && ok; ++a) ok = next.merge(q.args[a], h.args[a]);
      if (!ok || !viable(next)) continue;
      targets_[i][j] = k;
      choose(i, j + 1, next, count);
    }
  }

  void finalize(const TermClasses& classes) {
    PieceUnification pu;
    pu.rule = rule_;
    pu.disjuncts = selected_;
    std::vector<Atom> qpart;
    std::vector<std::vector<Atom>> hparts(selected_.size());
    for (std::size_t i = 0; i < query_.size(); ++i) {
      if (!included_[i]) continue;
      qpart.push_back(query_[i]);
      for (std::size_t j = 0; j < selected_.size(); ++j)
        hparts[j].push_back(rule_.head[selected_[j]].atoms()[targets_[i][j]]);
    }
    pu.query_part = Csf(std::move(qpart));
    for (auto& h : hparts) pu.head_parts.emplace_back(std::move(h));

    pu.mgu = classes.to_substitution([this](const Term& t) {
      if (frontier_.contains(t.name())) return 3;
      if (existential_.contains(t.name())) return 1;
      return 2;
    });

    // Conditions (1) and (2) on the chosen representatives.
    for (const auto& v : excluded_vars_) {
      Term image = pu.mgu.apply(Term::variable(v));
      if (image.is_variable() && image.name() == v) continue;
      if (!image.is_constant() && !frontier_.contains(image.name())) return;
    }
    for (const auto& z : existential_) {
      Term image = pu.mgu.apply(Term::variable(z));
      if (image.is_variable() && excluded_vars_.contains(image.name())) return;
    }
    if (!visit_(pu)) stop_ = true;
  }

  const Rule& rule_;
  const std::vector<Atom>& query_;
  const std::function<bool(const PieceUnification&)>& visit_;
  VarSet frontier_;
  VarSet existential_;
  std::set<std::pair<std::string, std::string>> cooccurring_;
  std::vector<std::size_t> selected_;
  std::vector<bool> included_;
  std::vector<std::vector<std::size_t>> targets_;
  VarSet excluded_vars_;
  bool stop_ = false;
};

}  // namespace

void for_each_piece_unification(const Rule& rule, const Csf& query,
                                const std::function<bool(const PieceUnification&)>& visit) {
  PieceEnumerator(rule, query, visit).run();
}

Csf existential_result(const PieceUnification& pu, const Csf& query) {
  return apply(pu.mgu, merge(pu.rule.body, difference(query, pu.query_part)));
}

Rule disjunctive_result(const PieceUnification& pu, const Csf& query) {
  Rule out;
  out.label = pu.rule.label;
  out.body = apply(pu.mgu, merge(pu.rule.body, difference(query, pu.query_part)));
  std::vector<Csf> rest;
  for (std::size_t i = 0; i < pu.rule.head.size(); ++i)
    if (std::find(pu.disjuncts.begin(), pu.disjuncts.end(), i) == pu.disjuncts.end())
      rest.push_back(apply(pu.mgu, pu.rule.head[i]));
  out.head = Dsf(std::move(rest));
  return out;
}

}  // namespace ucqrew
