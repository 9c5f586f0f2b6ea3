#pragma once

#include <functional>
#include <vector>

#include "ucqrew/rules.hpp"

namespace ucqrew {

// One way of unifying part of a CQ with part of a rule head.
//
// `disjuncts` lists the selected head disjuncts H' (indices into rule.head), `head_parts[i]` is
// the subset h'_i of disjunct `disjuncts[i]`, `query_part` is Q'. Under `mgu` every h'_i and Q'
// become the same atom set. The rule is the renamed-apart copy actually used.
struct PieceUnification {
  Rule rule;
  std::vector<std::size_t> disjuncts;
  std::vector<Csf> head_parts;
  Csf query_part;
  Substitution mgu;
};

// Renames the variables of `r` that clash with `reserved`.
Rule rename_apart(const Rule& r, const VarSet& reserved, NameSupply& names);

// Calls `visit` for every valid piece unification of `query` with `rule`, in a deterministic
// order, until `visit` returns false. `rule` must already share no variable with `query`.
// Every non-empty set of disjuncts is tried as H'.
//
// Validity: the mgu satisfies
//   (1) v in vars(Q \ Q') and v != v.mgu  =>  v.mgu is a frontier variable of the rule or a
//       constant;
//   (2) v existential in the rule  =>  v.mgu is not in vars(Q \ Q');
// and a class holding an existential variable holds no constant, no frontier variable and no
// second existential variable of the same disjunct.
void for_each_piece_unification(const Rule& rule, const Csf& query,
                                const std::function<bool(const PieceUnification&)>& visit);

// The rewriting produced by a piece unification.
Csf existential_result(const PieceUnification& pu, const Csf& query);
Rule disjunctive_result(const PieceUnification& pu, const Csf& query);

}  // namespace ucqrew
