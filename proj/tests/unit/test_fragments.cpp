#include "doctest.h"
#include "support/generators.hpp"
#include "support/text.hpp"
#include "ucqrew/fragments.hpp"
#include "ucqrew/rewrite.hpp"

using namespace ucqrew;
using testing::rule;
using testing::rules;

namespace {

const char* kMrca =
    "organism(Z), ancestor(Z,X), ancestor(Z,Y) :- organism(X), organism(Y)";
const char* kSixDegrees =
    "knows(X,X1), knows(X1,X2), knows(X2,X3), knows(X3,X4), knows(X4,X5), knows(X5,Y)"
    " :- person(X), person(Y)";
const char* kGraduated = "exam(V), passed(X,V), passed(Y,V) :- graduated(X,Z), graduated(Y,W)";

}  // namespace

TEST_CASE("linear") {
  CHECK(is_linear(rule("q(X,Z) :- p(X)")));
  CHECK_FALSE(is_linear(rule("q(X) :- p(X), t(X)")));
  CHECK_FALSE(is_linear(rule(kGraduated)));
}

TEST_CASE("disconnected") {
  CHECK(is_disconnected(rule("p(Y) :- b(X)")));
  CHECK_FALSE(is_disconnected(rule("q(X) :- p(X)")));
  CHECK(is_disconnected(rule("p(a,Z) :- b(a,X)")));
}

TEST_CASE("domain restricted") {
  CHECK(is_domain_restricted(rule("r(X,Y) :- p(X), q(Y)")));
  CHECK_FALSE(is_domain_restricted(rule(kMrca)));
  CHECK(is_domain_restricted(rule("s(Z) :- p(X)")));
}

TEST_CASE("connected domain restricted") {
  CHECK(is_cdr(rule(kMrca)));
  CHECK(is_cdr(rule(kSixDegrees)));
  CHECK_FALSE(is_cdr(rule("[c(X), c(Y)] :- a(X), b(Y), s(X,Y)")));
  CHECK_FALSE(is_cdr(rule("[r(X,Y), c(Y)] :- a(X), b(Y), s(X,Z)")));
  CHECK_FALSE(is_cdr(rule(kGraduated)));
  CHECK_FALSE(is_dder(rule("[r(X,Y), c(X), c(Y)] :- a(X), b(Y)")));
}

TEST_CASE("connected linear") {
  CHECK(is_clr(rule(kGraduated)));
  CHECK(is_clr(rule(kMrca)));
  CHECK(is_clr(rule(kSixDegrees)));
  CHECK(is_clr(rule("[r(X,W), c(X), c(Y)] :- a(X), b(Y)")));
  CHECK_FALSE(is_clr(rule("[r(X,W), c(Y)] :- a(X), b(Y), s(X,Z)")));
}

TEST_CASE("disconnected disjunction") {
  CHECK(is_dder(rule("[c(X), d(Y)] :- a(X), b(Y)")));
  CHECK_FALSE(is_dder(rule("[r(X,Y), c(X), c(Y)] :- a(X), b(Y)")));
  CHECK(is_dder(rule("q(X,Y) :- p(X), p(Y)")));
}

TEST_CASE("sticky marking") {
  auto trans = rules("r(X,Z) :- r(X,Y), r(Y,Z).");
  auto m = sticky_marking(trans);
  CHECK(m.converged);
  CHECK(m.variables(trans, 0).contains("Y"));
  CHECK_FALSE(is_sticky(trans));

  auto simple = rules("p(X,Z) :- b(X,Y).");
  CHECK(sticky_marking(simple).variables(simple, 0) == VarSet{"Y"});
  CHECK(is_sticky(simple));
  CHECK(is_sticky({}));
}

TEST_CASE("sticky marking propagates through head positions") {
  // Y is marked in the second rule at q[1]; the first rule carries X into q[1].
  auto rs = rules("q(Z,X) :- p(X), s(X). t(X) :- q(X,Y).");
  auto m = sticky_marking(rs);
  CHECK(m.variables(rs, 1).contains("Y"));
  CHECK(m.variables(rs, 0).contains("X"));
  CHECK_FALSE(is_sticky(rs));
}

TEST_CASE("dependency graph") {
  auto cyc = rules("q(X) :- p(X). p(X) :- q(X).");
  CHECK(dependency_graph(cyc).edges.size() == 2);
  CHECK_FALSE(is_agrd(cyc));
  CHECK(is_agrd(rules("q(X) :- p(X).")));
  CHECK(is_agrd({}));
  CHECK_FALSE(is_agrd(rules("p(X) :- p(X), r(X).")));
  // An existential that would have to meet a constant blocks the dependency.
  CHECK(is_agrd(rules("p(X,Z) :- p(X,a).")));
  CHECK(is_agrd(rules("q(X,Z) :- p(X). s(X) :- q(X,a).")));
}

TEST_CASE("fus verdicts") {
  auto ex2 = is_fus_guaranteed({rule(kMrca), rule(kSixDegrees)});
  CHECK(ex2.guaranteed_fus);
  CHECK(ex2.reason == "cdr");
  CHECK(ex2.verdict() == "guaranteed-fus");
  CHECK(ex2.rules[0].cdr);
  CHECK_FALSE(ex2.rules[0].dr);
  CHECK(ex2.rules[0].clr);

  auto ex3 = is_fus_guaranteed({rule("[r(X,Y), c(X), c(Y)] :- a(X), b(Y)")});
  CHECK_FALSE(ex3.guaranteed_fus);
  CHECK(ex3.verdict() == "unknown");
  CHECK(ex3.reason.empty());

  auto dder = is_fus_guaranteed({rule("[c(X), d(Y)] :- a(X), b(Y)")});
  CHECK(dder.guaranteed_fus);
  CHECK(dder.reason == "dder+cdr");

  auto lin = is_fus_guaranteed(rules("q(X,Z) :- p(X). p(X) :- q(X,Y)."));
  CHECK(lin.reason == "linear");

  auto disc = is_fus_guaranteed(rules("q(X) :- p(X). [a(Y), b(Y)] :- p(X)."));
  CHECK(disc.reason == "disconnected-disjunctive+linear");

  CHECK(is_fus_guaranteed({}).guaranteed_fus);
}

TEST_CASE("constraints are listed but ignored") {
  auto rep = is_fus_guaranteed(rules("q(X) :- p(X). ! :- q(X), r(X)."));
  CHECK(rep.rules.size() == 2);
  CHECK(rep.reason == "linear");
}

TEST_CASE("non-fus recursion is reported unknown") {
  auto rep = is_fus_guaranteed(rules("p(X) :- e(X,Y), p(Y)."));
  CHECK_FALSE(rep.guaranteed_fus);
  CHECK_FALSE(rep.agrd);
}

TEST_CASE("property: class inclusions") {
  testing::Generator g(13);
  testing::RuleShape shape;
  shape.max_body = 3;
  for (int i = 0; i < 3000; ++i) {
    auto sig = g.signature(4, 3);
    Rule r = g.rule(sig, shape);
    INFO(r);
    if (is_domain_restricted(r)) CHECK(is_cdr(r));
    if (is_linear(r)) CHECK(is_clr(r));
    if (is_disconnected(r)) {
      CHECK(is_cdr(r));
      CHECK(is_clr(r));
      CHECK(is_dder(r));
    }
    if (r.head.size() <= 1) CHECK(is_dder(r));
  }
}

TEST_CASE("property: rewritings of DDER rules stay DDER and keep cdr or clr") {
  testing::Generator g(19);
  testing::RuleShape shape;
  shape.max_body = 3;
  shape.disjunctive_share = 0.9;
  shape.max_disjuncts = 3;
  std::size_t checked = 0;
  for (int i = 0; i < 4000; ++i) {
    auto sig = g.signature(4, 2);
    Rule r = g.rule(sig, shape);
    if (!is_dder(r)) continue;
    Csf q = g.cq(sig);
    for (const Rule& out : disjunctive_step(r, q)) {
      ++checked;
      INFO(r, " | ", q, " => ", out);
      CHECK(is_dder(out));
      if (is_cdr(r)) CHECK(is_cdr(out));
      if (is_clr(r)) CHECK(is_clr(out));
    }
  }
  CHECK(checked > 200);
}
