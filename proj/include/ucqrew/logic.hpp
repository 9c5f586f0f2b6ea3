#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ucqrew {

using VarSet = std::set<std::string>;

// A variable or a constant. No function symbols exist in this language.
class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Constant };

  Term() = default;
  static Term variable(std::string name) { return Term(Kind::Variable, std::move(name)); }
  static Term constant(std::string name) { return Term(Kind::Constant, std::move(name)); }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool is_variable() const { return kind_ == Kind::Variable; }
  bool is_constant() const { return kind_ == Kind::Constant; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;

 private:
  Term(Kind k, std::string n) : kind_(k), name_(std::move(n)) {}
  Kind kind_ = Kind::Constant;
  std::string name_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  Atom() = default;
  Atom(std::string pred, std::vector<Term> arguments)
      : predicate(std::move(pred)), args(std::move(arguments)) {}

  std::size_t arity() const { return args.size(); }
  bool ground() const;
  void collect_vars(VarSet& out) const;
  VarSet vars() const;

  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

struct Literal {
  bool negative = false;
  Atom atom;

  Literal complement() const { return Literal{!negative, atom}; }
  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

// Finite map variable -> term. Identity bindings are never stored.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const std::string, Term>> init);

  void bind(const std::string& var, Term t);
  const Term* lookup(const std::string& var) const;
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<std::string, Term>& bindings() const { return bindings_; }
  VarSet domain() const;

  Term apply(const Term& t) const;
  Atom apply(const Atom& a) const;
  Literal apply(const Literal& l) const;
  std::vector<Atom> apply(std::span<const Atom> atoms) const;

  bool operator==(const Substitution&) const = default;

 private:
  std::map<std::string, Term> bindings_;
};

// Union-find over terms, the working state of unification. Two distinct constants can never
// share a class.
class TermClasses {
 public:
  bool merge(const Term& a, const Term& b);
  Term find(const Term& t) const;
  bool same(const Term& a, const Term& b) const { return find(a) == find(b); }
  // Every class with at least two members, members in first-seen order.
  std::vector<std::vector<Term>> classes() const;

  // Maps every member of a class to the class representative: the constant when there is one,
  // otherwise the member with the highest `priority`; ties go to the member seen last.
  template <typename Priority>
  Substitution to_substitution(Priority priority) const {
    Substitution s;
    for (const auto& cls : classes()) {
      const Term* rep = &cls.front();
      for (const Term& t : cls) {
        if (t.is_constant()) {
          rep = &t;
          break;
        }
        if (priority(t) >= priority(*rep)) rep = &t;
      }
      for (const Term& t : cls)
        if (t.is_variable() && t != *rep) s.bind(t.name(), *rep);
    }
    return s;
  }

 private:
  std::map<Term, Term> parent_;
  std::map<Term, std::size_t> seen_;
  std::vector<Term> order_;
  void touch(const Term& t);
};

// apply(compose(s1, s2), F) == apply(s2, apply(s1, F)).
Substitution compose(const Substitution& s1, const Substitution& s2);

// Most general unifier of a non-empty set of atoms, in idempotent form.
std::optional<Substitution> unify(std::span<const Atom> atoms);

// Deterministic generator of fresh variable names X0, X1, ...
class NameSupply {
 public:
  explicit NameSupply(std::uint64_t start = 0) : next_(start) {}
  // Skips any name contained in `avoid`.
  std::string fresh(const VarSet& avoid);

 private:
  std::uint64_t next_;
};

// Process-wide supply. Its start value honours ECOMPLETO_SEED.
NameSupply& global_name_supply();

// Renames every variable of `atoms` that clashes with `reserved` (or every variable when
// `rename_all` is set) to a fresh name. Returns the renamed atoms and the renaming used.
std::pair<std::vector<Atom>, Substitution> rename_apart(std::span<const Atom> atoms,
                                                        const VarSet& reserved,
                                                        NameSupply& names,
                                                        bool rename_all = false);
std::pair<std::vector<Atom>, Substitution> rename_apart(std::span<const Atom> atoms,
                                                        const VarSet& reserved);

// Answer variables are frozen during rewriting: they become constants of a reserved lexical
// space (a leading '?', which no parsed constant can carry) and are thawed on output.
Term frozen_constant(const std::string& var);
bool is_frozen_constant(const Term& t);
Substitution freezing(const VarSet& frozen);
Term thaw(const Term& t);
Atom thaw(const Atom& a);

std::ostream& operator<<(std::ostream& os, const Term& t);
std::ostream& operator<<(std::ostream& os, const Atom& a);
std::ostream& operator<<(std::ostream& os, const Literal& l);
std::ostream& operator<<(std::ostream& os, const Substitution& s);
std::string to_string(const Atom& a);

}  // namespace ucqrew
