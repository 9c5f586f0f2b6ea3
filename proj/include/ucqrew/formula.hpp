#pragma once

#include <optional>
#include <vector>

#include "ucqrew/logic.hpp"

namespace ucqrew {

// Conjunctive set formula: a duplicate-free set of atoms kept in sorted order. Empty is true.
class Csf {
 public:
  Csf() = default;
  Csf(std::vector<Atom> atoms);
  Csf(std::initializer_list<Atom> atoms) : Csf(std::vector<Atom>(atoms)) {}

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  bool contains(const Atom& a) const;
  VarSet vars() const;
  std::vector<Term> terms() const;

  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }

  auto operator<=>(const Csf&) const = default;
  bool operator==(const Csf&) const = default;

 private:
  std::vector<Atom> atoms_;
};

// Disjunctive set formula over Csfs. Duplicates are dropped, the first occurrence keeps its
// position so printing reproduces the input order. Empty is false.
class Dsf {
 public:
  Dsf() = default;
  Dsf(std::vector<Csf> disjuncts);
  Dsf(std::initializer_list<Csf> disjuncts) : Dsf(std::vector<Csf>(disjuncts)) {}

  const std::vector<Csf>& disjuncts() const { return disjuncts_; }
  std::size_t size() const { return disjuncts_.size(); }
  bool empty() const { return disjuncts_.empty(); }
  const Csf& operator[](std::size_t i) const { return disjuncts_[i]; }
  VarSet vars() const;
  // Set equality, ignoring disjunct order.
  bool same_set(const Dsf& other) const;

  auto begin() const { return disjuncts_.begin(); }
  auto end() const { return disjuncts_.end(); }
  bool operator==(const Dsf&) const = default;

 private:
  std::vector<Csf> disjuncts_;
};

Csf apply(const Substitution& s, const Csf& f);
Dsf apply(const Substitution& s, const Dsf& f);
Csf thaw(const Csf& f);
Csf merge(const Csf& a, const Csf& b);
// Atoms of `a` that are not in `b`.
Csf difference(const Csf& a, const Csf& b);

// Hypergraph view: variables are nodes, each atom is a hyperedge. Components are pairwise
// variable-disjoint; every ground atom is a component on its own. Ordered by smallest atom.
std::vector<Csf> connected_components(const Csf& f);

std::size_t card(const Csf& f);
std::size_t width(const Csf& f);
std::size_t ccard(const Csf& f);
std::size_t cwidth(const Csf& f);
std::size_t ccard(const Dsf& f);
std::size_t cwidth(const Dsf& f);

// A mapping of vars(src) \ frozen into the terms of dst sending every atom of src onto an
// atom of dst. Variables of dst are rigid. With `injective`, variables map to pairwise
// distinct variables only (a renaming).
std::optional<Substitution> homomorphism(const Csf& src, const Csf& dst, const VarSet& frozen,
                                         bool injective = false);
bool subsumes(const Csf& general, const Csf& specific, const VarSet& frozen = {});
// Mutual subsumption.
bool equivalent(const Csf& a, const Csf& b, const VarSet& frozen = {});
// Equal up to a bijective variable renaming.
bool isomorphic(const Csf& a, const Csf& b);

// `d` read as facts (its variables are unknown individuals) entails the Boolean CQ `q`.
bool entails_facts(const Csf& d, const Csf& q);

// Renames the variables of `f` to X0, X1, ... in first-occurrence order. Variables in `keep`
// are left untouched and their names are never reused.
Csf canonical_names(const Csf& f, const VarSet& keep = {});

std::ostream& operator<<(std::ostream& os, const Csf& f);
std::ostream& operator<<(std::ostream& os, const Dsf& f);

}  // namespace ucqrew
