#include "ucqrew/formula.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ucqrew {

Csf::Csf(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

bool Csf::contains(const Atom& a) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

VarSet Csf::vars() const {
  VarSet v;
  for (const Atom& a : atoms_) a.collect_vars(v);
  return v;
}

std::vector<Term> Csf::terms() const {
  std::set<Term> seen;
  std::vector<Term> out;
  for (const Atom& a : atoms_)
    for (const Term& t : a.args)
      if (seen.insert(t).second) out.push_back(t);
  return out;
}

Dsf::Dsf(std::vector<Csf> disjuncts) {
  for (auto& d : disjuncts)
    if (std::find(disjuncts_.begin(), disjuncts_.end(), d) == disjuncts_.end())
      disjuncts_.push_back(std::move(d));
}

VarSet Dsf::vars() const {
  VarSet v;
  for (const Csf& d : disjuncts_)
    for (const Atom& a : d) a.collect_vars(v);
  return v;
}

bool Dsf::same_set(const Dsf& other) const {
  auto a = disjuncts_;
  auto b = other.disjuncts_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

Csf apply(const Substitution& s, const Csf& f) { return Csf(s.apply(f.atoms())); }

Dsf apply(const Substitution& s, const Dsf& f) {
  std::vector<Csf> out;
  for (const Csf& d : f) out.push_back(apply(s, d));
  return Dsf(std::move(out));
}

Csf thaw(const Csf& f) {
  std::vector<Atom> out;
  for (const Atom& a : f) out.push_back(thaw(a));
  return Csf(std::move(out));
}

Csf merge(const Csf& a, const Csf& b) {
  std::vector<Atom> all = a.atoms();
  all.insert(all.end(), b.begin(), b.end());
  return Csf(std::move(all));
}

Csf difference(const Csf& a, const Csf& b) {
  std::vector<Atom> out;
  for (const Atom& x : a)
    if (!b.contains(x)) out.push_back(x);
  return Csf(std::move(out));
}

std::vector<Csf> connected_components(const Csf& f) {
  const auto& atoms = f.atoms();
  std::vector<std::size_t> parent(atoms.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (const Term& t : atoms[i].args) {
      if (!t.is_variable()) continue;
      auto [it, inserted] = owner.emplace(t.name(), i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  // Atoms are sorted, so grouping by root in index order yields components already ordered by
  // their smallest atom.
  std::map<std::size_t, std::size_t> slot;
  std::vector<std::vector<Atom>> groups;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto [it, inserted] = slot.emplace(find(i), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(atoms[i]);
  }
  std::vector<Csf> out;
  for (auto& g : groups) out.emplace_back(std::move(g));
  return out;
}

std::size_t card(const Csf& f) { return f.vars().size(); }

std::size_t width(const Csf& f) {
  return static_cast<std::size_t>(
      std::count_if(f.begin(), f.end(), [](const Atom& a) { return !a.ground(); }));
}

std::size_t ccard(const Csf& f) {
  std::size_t best = 0;
  for (const Csf& c : connected_components(f)) best = std::max(best, card(c));
  return best;
}

std::size_t cwidth(const Csf& f) {
  std::size_t best = 0;
  for (const Csf& c : connected_components(f)) best = std::max(best, width(c));
  return best;
}

std::size_t ccard(const Dsf& f) {
  std::size_t best = 0;
  for (const Csf& d : f) best = std::max(best, ccard(d));
  return best;
}

std::size_t cwidth(const Dsf& f) {
  std::size_t best = 0;
  for (const Csf& d : f) best = std::max(best, cwidth(d));
  return best;
}

namespace {

class HomSearch {
 public:
  HomSearch(const Csf& src, const Csf& dst, const VarSet& frozen, bool injective)
      : src_(src.atoms()), frozen_(frozen), injective_(injective) {
    for (const Atom& a : dst) by_pred_[{a.predicate, a.arity()}].push_back(&a);
    done_.assign(src_.size(), false);
  }

  bool run() { return extend(0); }
  Substitution result() const {
    Substitution s;
    for (const auto& [v, t] : map_) s.bind(v, t);
    return s;
  }

 private:
  const std::vector<const Atom*>* candidates(const Atom& a) const {
    auto it = by_pred_.find({a.predicate, a.arity()});
    return it == by_pred_.end() ? nullptr : &it->second;
  }

  // Tries to extend the mapping so that `a` maps onto `b`; records new bindings in `added`.
  bool match(const Atom& a, const Atom& b, std::vector<std::string>& added) {
    for (std::size_t i = 0; i < a.arity(); ++i) {
      const Term& s = a.args[i];
      const Term& d = b.args[i];
      if (!s.is_variable() || frozen_.contains(s.name())) {
        if (s != d) return false;
        continue;
      }
      auto it = map_.find(s.name());
      if (it != map_.end()) {
        if (it->second != d) return false;
        continue;
      }
      if (injective_ && (!d.is_variable() || used_.contains(d))) return false;
      map_.emplace(s.name(), d);
      if (injective_) used_.insert(d);
      added.push_back(s.name());
    }
    return true;
  }

  void undo(const std::vector<std::string>& added) {
    for (const auto& v : added) {
      if (injective_) used_.erase(map_.at(v));
      map_.erase(v);
    }
  }

  std::size_t count_options(const Atom& a) {
    const auto* cands = candidates(a);
    if (!cands) return 0;
    std::size_t n = 0;
    for (const Atom* b : *cands) {
      std::vector<std::string> added;
      if (match(a, *b, added)) ++n;
      undo(added);
    }
    return n;
  }

  bool extend(std::size_t placed) {
    if (placed == src_.size()) return true;
    // Most constrained atom first.
    std::size_t pick = src_.size();
    std::size_t fewest = SIZE_MAX;
    for (std::size_t i = 0; i < src_.size(); ++i) {
      if (done_[i]) continue;
      std::size_t n = count_options(src_[i]);
      if (n < fewest) {
        fewest = n;
        pick = i;
        if (n <= 1) break;
      }
    }
    if (fewest == 0) return false;
    done_[pick] = true;
    for (const Atom* b : *candidates(src_[pick])) {
      std::vector<std::string> added;
      if (match(src_[pick], *b, added) && extend(placed + 1)) return true;
      undo(added);
    }
    done_[pick] = false;
    return false;
  }

  const std::vector<Atom>& src_;
  const VarSet& frozen_;
  bool injective_;
  std::map<std::pair<std::string, std::size_t>, std::vector<const Atom*>> by_pred_;
  std::map<std::string, Term> map_;
  std::set<Term> used_;
  std::vector<bool> done_;
};

}  // namespace

std::optional<Substitution> homomorphism(const Csf& src, const Csf& dst, const VarSet& frozen,
                                         bool injective) {
  HomSearch search(src, dst, frozen, injective);
  if (!search.run()) return std::nullopt;
  return search.result();
}

bool subsumes(const Csf& general, const Csf& specific, const VarSet& frozen) {
  return homomorphism(general, specific, frozen).has_value();
}

bool equivalent(const Csf& a, const Csf& b, const VarSet& frozen) {
  return subsumes(a, b, frozen) && subsumes(b, a, frozen);
}

bool isomorphic(const Csf& a, const Csf& b) {
  if (a.size() != b.size()) return false;
  if (a.vars().size() != b.vars().size()) return false;
  // Injective on variables and equal sizes: the image is all of b.
  return homomorphism(a, b, {}, true).has_value();
}

bool entails_facts(const Csf& d, const Csf& q) {
  Substitution nulls;
  for (const auto& v : d.vars()) nulls.bind(v, Term::constant("_:" + v));
  return homomorphism(q, apply(nulls, d), {}).has_value();
}

Csf canonical_names(const Csf& f, const VarSet& keep) {
  VarSet avoid = keep;
  std::map<std::string, std::string> named;
  Substitution renaming;
  std::size_t next = 0;
  for (const Atom& a : f)
    for (const Term& t : a.args) {
      if (!t.is_variable() || keep.contains(t.name()) || named.contains(t.name())) continue;
      std::string name;
      do name = "X" + std::to_string(next++);
      while (avoid.contains(name));
      named.emplace(t.name(), name);
      renaming.bind(t.name(), Term::variable(name));
      avoid.insert(name);
    }
  return apply(renaming, f);
}

std::ostream& operator<<(std::ostream& os, const Csf& f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) os << ", ";
    os << f.atoms()[i];
  }
  return os;
}

std::ostream& operator<<(std::ostream& os, const Dsf& f) {
  os << '[';
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) os << ", ";
    if (f[i].size() == 1)
      os << f[i];
    else
      os << '(' << f[i] << ')';
  }
  return os << ']';
}

}  // namespace ucqrew
