#include "ucqrew/logic.hpp"

#include <cstdlib>
#include <mutex>
#include <sstream>

namespace ucqrew {

bool Atom::ground() const {
  for (const Term& t : args)
    if (t.is_variable()) return false;
  return true;
}

void Atom::collect_vars(VarSet& out) const {
  for (const Term& t : args)
    if (t.is_variable()) out.insert(t.name());
}

VarSet Atom::vars() const {
  VarSet v;
  collect_vars(v);
  return v;
}

Substitution::Substitution(std::initializer_list<std::pair<const std::string, Term>> init) {
  for (const auto& [v, t] : init) bind(v, t);
}

void Substitution::bind(const std::string& var, Term t) {
  if (t.is_variable() && t.name() == var) {
    bindings_.erase(var);
    return;
  }
  bindings_.insert_or_assign(var, std::move(t));
}

const Term* Substitution::lookup(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

VarSet Substitution::domain() const {
  VarSet d;
  for (const auto& [v, _] : bindings_) d.insert(v);
  return d;
}

Term Substitution::apply(const Term& t) const {
  if (!t.is_variable()) return t;
  const Term* img = lookup(t.name());
  return img ? *img : t;
}

Atom Substitution::apply(const Atom& a) const {
  Atom out;
  out.predicate = a.predicate;
  out.args.reserve(a.args.size());
  for (const Term& t : a.args) out.args.push_back(apply(t));
  return out;
}

Literal Substitution::apply(const Literal& l) const { return Literal{l.negative, apply(l.atom)}; }

std::vector<Atom> Substitution::apply(std::span<const Atom> atoms) const {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) out.push_back(apply(a));
  return out;
}

Substitution compose(const Substitution& s1, const Substitution& s2) {
  Substitution out;
  for (const auto& [v, t] : s1.bindings()) out.bind(v, s2.apply(t));
  for (const auto& [v, t] : s2.bindings())
    if (!s1.lookup(v)) out.bind(v, t);
  return out;
}

void TermClasses::touch(const Term& t) {
  if (seen_.emplace(t, order_.size()).second) order_.push_back(t);
}

Term TermClasses::find(const Term& t) const {
  Term cur = t;
  for (auto it = parent_.find(cur); it != parent_.end(); it = parent_.find(cur)) cur = it->second;
  return cur;
}

bool TermClasses::merge(const Term& a, const Term& b) {
  touch(a);
  touch(b);
  Term ra = find(a);
  Term rb = find(b);
  if (ra == rb) return true;
  if (ra.is_constant() && rb.is_constant()) return false;
  // Constants stay roots so a clash is detected at the root.
  if (ra.is_constant()) std::swap(ra, rb);
  parent_[ra] = rb;
  return true;
}

std::vector<std::vector<Term>> TermClasses::classes() const {
  std::map<Term, std::size_t> slot;
  std::vector<std::vector<Term>> groups;
  for (const Term& t : order_) {
    Term root = find(t);
    auto [it, inserted] = slot.emplace(root, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(t);
  }
  std::vector<std::vector<Term>> out;
  for (auto& g : groups)
    if (g.size() > 1) out.push_back(std::move(g));
  return out;
}

std::optional<Substitution> unify(std::span<const Atom> atoms) {
  if (atoms.empty()) return Substitution{};
  TermClasses classes;
  const Atom& first = atoms.front();
  for (const Atom& a : atoms.subspan(1)) {
    if (a.predicate != first.predicate || a.arity() != first.arity()) return std::nullopt;
    for (std::size_t i = 0; i < a.arity(); ++i)
      if (!classes.merge(first.args[i], a.args[i])) return std::nullopt;
  }
  return classes.to_substitution([](const Term&) { return 0; });
}

std::string NameSupply::fresh(const VarSet& avoid) {
  for (;;) {
    std::string name = "X" + std::to_string(next_++);
    if (!avoid.contains(name)) return name;
  }
}

NameSupply& global_name_supply() {
  static NameSupply supply([] {
    const char* seed = std::getenv("ECOMPLETO_SEED");
    return seed ? std::strtoull(seed, nullptr, 10) : 0ULL;
  }());
  return supply;
}

std::pair<std::vector<Atom>, Substitution> rename_apart(std::span<const Atom> atoms,
                                                        const VarSet& reserved,
                                                        NameSupply& names, bool rename_all) {
  VarSet own;
  for (const Atom& a : atoms) a.collect_vars(own);
  VarSet avoid = reserved;
  avoid.insert(own.begin(), own.end());
  Substitution renaming;
  // Walk in first-occurrence order so the fresh names are deterministic.
  for (const Atom& a : atoms)
    for (const Term& t : a.args) {
      if (!t.is_variable() || renaming.lookup(t.name())) continue;
      if (!rename_all && !reserved.contains(t.name())) continue;
      std::string fresh = names.fresh(avoid);
      avoid.insert(fresh);
      renaming.bind(t.name(), Term::variable(fresh));
    }
  return {renaming.apply(atoms), renaming};
}

std::pair<std::vector<Atom>, Substitution> rename_apart(std::span<const Atom> atoms,
                                                        const VarSet& reserved) {
  static std::mutex guard;
  std::lock_guard lock(guard);
  return rename_apart(atoms, reserved, global_name_supply());
}

Term frozen_constant(const std::string& var) { return Term::constant("?" + var); }

bool is_frozen_constant(const Term& t) {
  return t.is_constant() && !t.name().empty() && t.name().front() == '?';
}

Substitution freezing(const VarSet& frozen) {
  Substitution s;
  for (const auto& v : frozen) s.bind(v, frozen_constant(v));
  return s;
}

Term thaw(const Term& t) {
  return is_frozen_constant(t) ? Term::variable(t.name().substr(1)) : t;
}

Atom thaw(const Atom& a) {
  Atom out = a;
  for (Term& t : out.args) t = thaw(t);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Term& t) { return os << t.name(); }

std::ostream& operator<<(std::ostream& os, const Atom& a) {
  os << a.predicate;
  if (a.args.empty()) return os;
  os << '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) os << ',';
    os << a.args[i];
  }
  return os << ')';
}

std::ostream& operator<<(std::ostream& os, const Literal& l) {
  if (l.negative) os << '-';
  return os << l.atom;
}

std::ostream& operator<<(std::ostream& os, const Substitution& s) {
  os << '{';
  bool first = true;
  for (const auto& [v, t] : s.bindings()) {
    if (!first) os << ", ";
    first = false;
    os << v << "<-" << t;
  }
  return os << '}';
}

std::string to_string(const Atom& a) {
  std::ostringstream os;
  os << a;
  return os.str();
}

}  // namespace ucqrew
