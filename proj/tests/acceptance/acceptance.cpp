// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support/corpus.hpp"
#include "support/fuzz.hpp"
#include "support/generators.hpp"
#include "support/piece_oracle.hpp"
#include "support/text.hpp"
#include "ucqrew/chase.hpp"
#include "ucqrew/cli.hpp"
#include "ucqrew/dlgp.hpp"
#include "ucqrew/fragments.hpp"
#include "ucqrew/reduction.hpp"
#include "ucqrew/rewrite.hpp"

using namespace ucqrew;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances.
constexpr double kExample1LimitMs = 1000.0;
constexpr double kSoundnessLimitMs = 120000.0;
constexpr int kSoundnessInstances = 400;
constexpr int kCompletenessInstances = 120;
constexpr int kTerminationCases = 50;
constexpr int kDderSteps = 500;
constexpr int kFuzzInputs = 100000;
constexpr std::size_t kCorpusMinimum = 50;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Outcome& o) {
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

// Re-checks every step the engine reports against conditions (1) and (2).
struct Audit {
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::string first_failure;

  void check(const PieceUnification& pu, const Csf& query) {
    ++checked;
    auto r = testing::validate_piece(pu, query);
    if (!r.ok && failed++ == 0) first_failure = r.failure;
  }
  std::function<void(const StepRecord&)> hook() {
    return [this](const StepRecord& s) { check(s.unifier, s.query); };
  }
};

Audit audit;

bool same_up_to_renaming(const std::vector<Csf>& got, const std::vector<Csf>& want) {
  if (got.size() != want.size()) return false;
  std::vector<bool> used(got.size(), false);
  for (const Csf& w : want) {
    bool found = false;
    for (std::size_t i = 0; i < got.size() && !found; ++i)
      if (!used[i] && isomorphic(got[i], w)) used[i] = found = true;
    if (!found) return false;
  }
  return true;
}

std::vector<Rule> random_rules(testing::Generator& g, const testing::Signature& sig,
                               std::size_t max_rules, const testing::RuleShape& shape = {}) {
  std::vector<Rule> rs;
  for (std::size_t k = 0, n = 1 + g.below(max_rules); k < n; ++k) rs.push_back(g.rule(sig, shape));
  return rs;
}

// 1 ---------------------------------------------------------------------------------------

Outcome example1() {
  const std::string dir = (fs::temp_directory_path() / "ucqrew-acceptance").string();
  fs::create_directories(dir);
  const std::string kb = dir + "/diabetes.dlgp";
  std::ofstream(kb) << "[r1] [(diabetic(Y), sibling(Y,X)), (diabetic(Z), parent(Z,X))] :- diabetesRisk(X).\n"
                       "[qc] ? :- singleChild(X1), sibling(Y1,X1).\n"
                       "[qp] ? :- diabetic(Y2), parent(Y2,X2).\n"
                       "[qd] ? :- diabetic(X1).\n";
  auto cqs_of = [](const std::string& text) {
    std::vector<Csf> out;
    for (const auto& q : testing::doc(text).queries().cqs) out.push_back(q.positives);
    return out;
  };
  const auto start = Clock::now();
  std::ostringstream out1, out2, err;
  int code1 = run_cli({"rewrite", "--kb", kb, "--query", "qc", "--query", "qp"}, out1, err);
  int code2 = run_cli({"rewrite", "--kb", kb, "--query", "qd"}, out2, err);
  const double elapsed = ms_since(start);
  fs::remove_all(dir);

  const bool three = same_up_to_renaming(
      cqs_of(out1.str()), {testing::atoms("singleChild(X), sibling(Y,X)"),
                           testing::atoms("diabetic(Y), parent(Y,X)"),
                           testing::atoms("diabetesRisk(X), singleChild(X)")});
  const bool atomic = same_up_to_renaming(
      cqs_of(out2.str()), {testing::atoms("diabetic(X1)"), testing::atoms("diabetesRisk(X)")});
  Outcome o;
  o.pass = code1 == Ok && code2 == Ok && three && atomic && elapsed < kExample1LimitMs;
  o.detail = std::string("three-CQ rewriting ") + (three ? "exact" : "WRONG") +
             ", atomic query " + (atomic ? "exact" : "WRONG") + ", exit codes " +
             std::to_string(code1) + "/" + std::to_string(code2) + ", " +
             std::to_string(static_cast<int>(elapsed)) + " ms (limit " +
             std::to_string(static_cast<int>(kExample1LimitMs)) + " ms)";
  return o;
}

// 2 ---------------------------------------------------------------------------------------

Outcome classifier_goldens() {
  int ok = 0, total = 0;
  std::string wrong;
  auto expect = [&](const std::string& what, bool got, bool want) {
    ++total;
    if (got == want)
      ++ok;
    else if (wrong.empty())
      wrong = what;
  };
  const Rule mrca = testing::rule("organism(Z), ancestor(Z,X), ancestor(Z,Y) :- organism(X), organism(Y)");
  const Rule six = testing::rule(
      "knows(X,X1), knows(X1,X2), knows(X2,X3), knows(X3,X4), knows(X4,X5), knows(X5,Y) :- "
      "person(X), person(Y)");
  for (const auto& [name, r] : {std::pair{"mrca", mrca}, std::pair{"six-degrees", six}}) {
    expect(std::string(name) + " cdr", is_cdr(r), true);
    expect(std::string(name) + " dr", is_domain_restricted(r), false);
    expect(std::string(name) + " clr", is_clr(r), true);
  }
  const Rule grad = testing::rule("exam(V), passed(X,V), passed(Y,V) :- graduated(X,Z), graduated(Y,W)");
  expect("graduated clr", is_clr(grad), true);
  expect("graduated cdr", is_cdr(grad), false);

  // Expected generated rules, obtained here by actual rewriting steps.
  auto generated = [&](const char* rule, const char* query, const char* shown) {
    for (const Rule& out : disjunctive_step(testing::rule(rule), testing::atoms(query)))
      if (alpha_equivalent(out, testing::rule(shown))) return std::optional<Rule>(out);
    return std::optional<Rule>();
  };
  auto g1 = generated("[r(X,Y), c(X), c(Y)] :- a(X), b(Y)", "r(X,Y), s(X,Y)",
                      "[c(X), c(Y)] :- a(X), b(Y), s(X,Y)");
  auto g2 = generated("[r(X,Y), c(X), c(Y)] :- a(X), b(Y)", "c(X), s(X,Z)",
                      "[r(X,Y), c(Y)] :- a(X), b(Y), s(X,Z)");
  auto g3 = generated("[r(X,W), c(X), c(Y)] :- a(X), b(Y)", "c(X), s(X,Z)",
                      "[r(X,W), c(Y)] :- a(X), b(Y), s(X,Z)");
  expect("generated rule 1 exists", g1.has_value(), true);
  expect("generated rule 2 exists", g2.has_value(), true);
  expect("generated rule 3 exists", g3.has_value(), true);
  if (g1) expect("generated rule 1 cdr", is_cdr(*g1), false);
  if (g2) expect("generated rule 2 cdr", is_cdr(*g2), false);
  if (g3) expect("generated rule 3 clr", is_clr(*g3), false);
  expect("source of rule 3 clr", is_clr(testing::rule("[r(X,W), c(X), c(Y)] :- a(X), b(Y)")), true);

  Outcome o;
  o.pass = ok == total;
  o.detail = std::to_string(ok) + "/" + std::to_string(total) + " flags exact" +
             (wrong.empty() ? "" : ", first mismatch: " + wrong);
  return o;
}

// 3 ---------------------------------------------------------------------------------------

// Fact sets that satisfy `q`: its canonical instance, ground images under random assignments
// into the constants, and those images with one extra atom. By monotonicity every superset of
// a satisfying image also satisfies q, so images cover the minimal witnesses.
std::vector<Csf> satisfying_fact_sets(testing::Generator& g, const testing::Signature& sig,
                                      const Csf& q) {
  std::vector<Csf> out{q};
  const VarSet qv = q.vars();
  std::vector<std::string> vars(qv.begin(), qv.end());
  const auto pool = sig.all_ground_atoms();
  for (int k = 0; k < 4; ++k) {
    Substitution s;
    for (const auto& v : vars) s.bind(v, Term::constant(sig.constants[g.below(sig.constants.size())]));
    Csf image = apply(s, q);
    if (image.size() > 4) continue;
    out.push_back(image);
    std::vector<Atom> more = image.atoms();
    more.push_back(pool[g.below(pool.size())]);
    if (more.size() <= 4) out.push_back(Csf(std::move(more)));
  }
  return out;
}

// One instance: either a plain rule set with one CQ, or a knowledge base with a constraint and
// a query with negated atoms, normalized to a constraint-free rule set and a positive UCQ.
NormalizedProblem soundness_instance(testing::Generator& g, const testing::Signature& sig,
                                     bool& with_negation) {
  KnowledgeBase kb;
  kb.rules = random_rules(g, sig, 3);
  Ucq q;
  ConjunctiveQueryNeg cq;
  cq.positives = g.cq(sig, 3);
  with_negation = g.chance(0.35);
  if (with_negation) {
    if (g.chance(0.5)) {
      Rule c = g.rule(sig);
      c.head = Dsf{};
      kb.rules.push_back(c);
    }
    const VarSet pv = cq.positives.vars();
    std::vector<std::string> vars(pv.begin(), pv.end());
    vars.push_back("W");
    std::vector<Atom> neg;
    for (std::size_t i = 0, n = 1 + g.below(2); i < n; ++i)
      neg.push_back(g.atom_over(sig, [&] { return Term::variable(vars[g.below(vars.size())]); }));
    cq.negatives = Csf(std::move(neg));
  }
  q.cqs.push_back(cq);
  return normalize_problem(kb, q);
}

Outcome soundness() {
  testing::Generator g(3001);
  const auto start = Clock::now();
  std::size_t checks = 0, violations = 0, inconclusive = 0, cqs = 0, converged = 0, negated = 0;
  std::string first;
  for (int i = 0; i < kSoundnessInstances; ++i) {
    auto sig = g.signature(4, 2, 3);
    bool with_negation = false;
    const NormalizedProblem np = soundness_instance(g, sig, with_negation);
    negated += with_negation;
    std::vector<Csf> ucq;
    for (const auto& c : np.positive_ucq) ucq.push_back(c.atoms);
    RewriteOptions opts;
    opts.budget.max_iterations = 3;
    opts.budget.max_cqs = 400;
    opts.budget.timeout = std::chrono::milliseconds(2000);  // what was kept is still checked
    opts.audit = audit.hook();
    auto res = rewrite_k(np.rules, ucq, opts);
    converged += res.converged;
    for (const auto& c : res.ucq) {
      ++cqs;
      const std::size_t depth = std::max<std::size_t>(3, c.depth);
      for (const Csf& d : satisfying_fact_sets(g, sig, c.atoms)) {
        if (!entails_facts(d, c.atoms)) continue;
        ++checks;
        // A split stopped by the branch cap says nothing; retry with a larger cap.
        EntailmentDetail e;
        for (std::size_t cap : {kDefaultBranchCap, std::size_t{4096}, std::size_t{32768}}) {
          e = entails_detailed(np.rules, d, ucq, depth, cap);
          if (e.result == Entailment::True || !e.overflow) break;
        }
        if (e.result == Entailment::True) continue;
        if (e.overflow) {
          ++inconclusive;
        } else if (violations++ == 0) {
          std::ostringstream os;
          os << "instance " << i << " cq " << c.atoms << " facts " << d << " rules";
          for (const Rule& r : np.rules) os << " {" << r << "}";
          first = os.str();
        }
      }
    }
  }
  const double elapsed = ms_since(start);
  Outcome o;
  o.pass = violations == 0 && inconclusive == 0 && elapsed < kSoundnessLimitMs;
  o.detail = std::to_string(kSoundnessInstances) + " instances (" + std::to_string(negated) +
             " through the reduction, " + std::to_string(converged) + " converged), " +
             std::to_string(cqs) + " output CQs, " + std::to_string(checks) + " fact sets, " +
             std::to_string(violations) + " violations, " + std::to_string(inconclusive) +
             " beyond the branch cap, " + std::to_string(static_cast<int>(elapsed / 1000)) +
             " s (limit " + std::to_string(static_cast<int>(kSoundnessLimitMs / 1000)) + " s)" +
             (first.empty() ? "" : "; first: " + first);
  return o;
}

// 4 ---------------------------------------------------------------------------------------

// Every fact set of at most `max` atoms drawn from `pool`.
void for_each_small_subset(const std::vector<Atom>& pool, std::size_t max,
                           const std::function<void(const Csf&)>& f) {
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    std::vector<Atom> atoms;
    for (std::size_t i : pick) atoms.push_back(pool[i]);
    f(Csf(std::move(atoms)));
    if (pick.size() == max) return;
    for (std::size_t i = from; i < pool.size(); ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

Outcome completeness() {
  testing::Generator g(4001);
  std::size_t instances = 0, attempts = 0, fact_sets = 0, entailed = 0, needed_rules = 0;
  std::size_t violations = 0, undecided = 0;
  std::string first;
  while (instances < static_cast<std::size_t>(kCompletenessInstances) && attempts < 20000) {
    ++attempts;
    auto sig = g.signature(3, 2, 2);
    auto rules = random_rules(g, sig, 3);
    if (!is_fus_guaranteed(rules).guaranteed_fus) continue;
    const Csf query = g.cq(sig, 2);
    RewriteOptions opts;
    opts.budget.max_cqs = 2000;
    opts.budget.timeout = std::chrono::milliseconds(5000);
    opts.audit = audit.hook();
    auto res = rewrite_k(rules, std::vector<Csf>{query}, opts);
    if (!res.converged) continue;
    ++instances;
    for_each_small_subset(sig.all_ground_atoms(), 3, [&](const Csf& d) {
      ++fact_sets;
      auto e = entails_detailed(rules, d, {query}, 3);
      bool covered = false;
      for (const auto& c : res.ucq) covered = covered || entails_facts(d, c.atoms);
      if (e.result == Entailment::True) {
        ++entailed;
        needed_rules += !entails_facts(d, query);
        if (!covered && violations++ == 0) {
          std::ostringstream os;
          os << "facts " << d << " query " << query;
          first = os.str();
        }
      } else if (covered) {
        ++undecided;  // the bounded chase stopped short of a sound rewriting
      }
    });
  }
  Outcome o;
  o.pass = violations == 0 && instances >= static_cast<std::size_t>(kCompletenessInstances);
  o.detail = std::to_string(instances) + " convergent guaranteed-fus instances, " +
             std::to_string(fact_sets) + " fact sets of <= 3 atoms, " + std::to_string(entailed) +
             " entailed (" + std::to_string(needed_rules) + " only through rules), " +
             std::to_string(violations) + " without a matching CQ, " + std::to_string(undecided) +
             " beyond the chase depth" + (first.empty() ? "" : "; first: " + first);
  return o;
}

// 5 ---------------------------------------------------------------------------------------

bool converges(const std::vector<Rule>& rules, const Csf& query) {
  RewriteOptions opts;
  opts.budget.max_iterations = 64;
  opts.budget.max_cqs = 20000;
  opts.budget.timeout = std::chrono::milliseconds(10000);
  opts.audit = audit.hook();
  return rewrite_k(rules, std::vector<Csf>{query}, opts).converged;
}

bool has_disjunctive(const std::vector<Rule>& rs) {
  for (const Rule& r : rs)
    if (r.kind() == RuleKind::Disjunctive) return true;
  return false;
}

Outcome termination() {
  testing::Generator g(5001);
  // (a) linear rules, some disjunctive, atomic queries.
  int linear_ok = 0;
  testing::RuleShape linear;
  linear.max_body = 1;
  linear.disjunctive_share = 0.6;
  for (int made = 0; made < kTerminationCases;) {
    auto sig = g.signature(4, 2, 2);
    auto rules = random_rules(g, sig, 4, linear);
    if (!has_disjunctive(rules)) continue;
    ++made;
    linear_ok += converges(rules, g.cq(sig, 1));
  }

  // (b) DDER sets that are all cdr, and all clr but not all cdr.
  testing::RuleShape shape;
  shape.max_body = 3;
  shape.disjunctive_share = 0.6;
  shape.max_disjuncts = 3;
  auto dder_sets = [&](bool want_cdr) {
    int ok = 0;
    for (int made = 0; made < kTerminationCases;) {
      auto sig = g.signature(4, 2, 2);
      // Draw rules one at a time from the fragment.
      std::vector<Rule> rules;
      for (std::size_t n = 1 + g.below(4); rules.size() < n;) {
        Rule r = g.rule(sig, shape);
        if (!is_dder(r)) continue;
        if (want_cdr ? !is_cdr(r) : !is_clr(r)) continue;
        rules.push_back(r);
      }
      if (!has_disjunctive(rules)) continue;
      if (!want_cdr && std::all_of(rules.begin(), rules.end(), [](const Rule& r) { return is_cdr(r); }))
        continue;
      ++made;
      ok += converges(rules, g.cq(sig, 2));
    }
    return ok;
  };
  const int cdr_ok = dder_sets(true);
  const int clr_ok = dder_sets(false);

  // (c) closure of DDER under disjunctive steps.
  int steps = 0, kept = 0;
  while (steps < kDderSteps) {
    auto sig = g.signature(4, 2, 2);
    Rule r = g.rule(sig, shape);
    if (!is_dder(r) || r.kind() != RuleKind::Disjunctive) continue;
    Csf q = g.cq(sig, 3);
    NameSupply names;
    Rule apart = rename_apart(r, q.vars(), names);
    for_each_piece_unification(apart, q, [&](const PieceUnification& pu) {
      audit.check(pu, q);
      ++steps;
      kept += is_dder(disjunctive_result(pu, q));
      return steps < kDderSteps;
    });
  }

  Outcome o;
  o.pass = linear_ok == kTerminationCases && cdr_ok == kTerminationCases &&
           clr_ok == kTerminationCases && kept == steps;
  o.detail = "(a) linear disjunctive " + std::to_string(linear_ok) + "/" +
             std::to_string(kTerminationCases) + " converged, (b) DDER+cdr " +
             std::to_string(cdr_ok) + "/" + std::to_string(kTerminationCases) + ", DDER+clr " +
             std::to_string(clr_ok) + "/" + std::to_string(kTerminationCases) +
             ", (c) DDER closure " + std::to_string(kept) + "/" + std::to_string(steps) + " steps";
  return o;
}

// 6 ---------------------------------------------------------------------------------------

Outcome validity() {
  Outcome o;
  o.pass = audit.failed == 0 && audit.checked > 0;
  o.detail = std::to_string(audit.checked) + " piece unifications re-checked during 3 to 5, " +
             std::to_string(audit.failed) + " failures" +
             (audit.first_failure.empty() ? "" : "; first: " + audit.first_failure);
  return o;
}

// 7 ---------------------------------------------------------------------------------------

Outcome parser() {
  const auto files = testing::corpus();
  std::size_t stable = 0;
  bool snippet_rule = false, snippet_query = false;
  std::vector<std::string> seeds;
  for (const auto& f : files) {
    seeds.push_back(f.text);
    snippet_rule = snippet_rule ||
                   f.text.find("[disj. rule] [leaf(X), (inner_node(X), edge(X,Y))] :- node(X).") !=
                       std::string::npos;
    snippet_query = snippet_query ||
                    f.text.find("[q neg] ? :- person(X), -marriedTo(X,Y).") != std::string::npos;
    auto first = dlgp::parse(f.text);
    if (!first.ok()) continue;
    auto second = dlgp::parse(dlgp::print(first.document));
    stable += second.ok() && second.document == first.document;
  }

  testing::FuzzInputs inputs(7001, seeds);
  std::size_t rejected = 0, unpositioned = 0, unstable = 0;
  for (int i = 0; i < kFuzzInputs; ++i) {
    auto r = dlgp::parse(inputs.next());
    if (!r.ok()) ++rejected;
    for (const auto& d : r.diagnostics) unpositioned += d.line == 0 || d.column == 0;
    if (r.ok()) {
      auto again = dlgp::parse(dlgp::print(r.document));
      unstable += !(again.ok() && again.document == r.document);
    }
  }
  Outcome o;
  o.pass = files.size() >= kCorpusMinimum && stable == files.size() && snippet_rule &&
           snippet_query && unpositioned == 0 && unstable == 0;
  o.detail = std::to_string(stable) + "/" + std::to_string(files.size()) +
             " corpus documents at a fixpoint, both verbatim snippets " +
             (snippet_rule && snippet_query ? "present" : "MISSING") + ", " +
             std::to_string(kFuzzInputs) + " fuzz inputs (" + std::to_string(rejected) +
             " rejected) without a crash, " + std::to_string(unpositioned) +
             " unpositioned diagnostics, " + std::to_string(unstable) + " unstable accepts";
  return o;
}

}  // namespace

int main() {
  report(1, "diabetes rewriting", example1());
  report(2, "classifier goldens", classifier_goldens());
  report(3, "soundness", soundness());
  report(4, "completeness on convergence", completeness());
  report(5, "termination on fus fragments", termination());
  report(6, "definition validity audit", validity());
  report(7, "parser round trip and fuzzing", parser());
  return failures;
}
