#include "ucqrew/rewrite.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <stdexcept>

namespace ucqrew {

namespace {

std::vector<std::string> predicate_set(const Csf& f) {
  std::vector<std::string> p;
  for (const Atom& a : f) p.push_back(a.predicate + "/" + std::to_string(a.arity()));
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

// A rule as one atom set: body atoms tagged "b|", head atoms tagged "h|" with an extra argument
// naming their disjunct. Renamings of this set are exactly the renamings of the rule that
// permute disjuncts.
Csf rule_as_csf(const Rule& r) {
  std::vector<Atom> atoms;
  for (const Atom& a : r.body) atoms.emplace_back("b|" + a.predicate, a.args);
  for (std::size_t i = 0; i < r.head.size(); ++i)
    for (const Atom& a : r.head[i]) {
      Atom tagged("h|" + a.predicate, a.args);
      tagged.args.push_back(Term::variable("#d" + std::to_string(i)));
      atoms.push_back(std::move(tagged));
    }
  return Csf(std::move(atoms));
}

std::string rule_signature(const Rule& r) {
  std::string key;
  for (const auto& p : predicate_set(r.body)) key += p + ",";
  std::vector<std::string> heads;
  for (const Csf& d : r.head) {
    std::string h;
    for (const auto& p : predicate_set(d)) h += p + ",";
    heads.push_back(h);
  }
  std::sort(heads.begin(), heads.end());
  for (const auto& h : heads) key += "|" + h;
  key += "#" + std::to_string(r.body.size());
  return key;
}

Csf freeze_vars(const Csf& f, const VarSet& frozen) {
  VarSet present;
  for (const auto& v : f.vars())
    if (frozen.contains(v)) present.insert(v);
  return apply(freezing(present), f);
}

Rule thaw_rule(const Rule& r) {
  Rule out;
  out.label = r.label;
  out.body = thaw(r.body);
  std::vector<Csf> ds;
  for (const Csf& d : r.head) ds.push_back(thaw(d));
  out.head = Dsf(std::move(ds));
  return out;
}

VarSet frozen_names_in(const Csf& f) {
  VarSet out;
  for (const Atom& a : f)
    for (const Term& t : a.args)
      if (is_frozen_constant(t)) out.insert(t.name().substr(1));
  return out;
}

struct Produced {
  Csf cq;
  Rule rule;
  bool is_rule = false;
  std::size_t rule_index = 0;
  std::optional<StepRecord> record;
};

class Engine {
 public:
  Engine(const RewriteOptions& options, VarSet frozen_names, std::vector<std::string> answer_order)
      : options_(options), frozen_names_(std::move(frozen_names)),
        answer_order_(std::move(answer_order)) {
    if (options_.budget.timeout)
      deadline_ = std::chrono::steady_clock::now() + *options_.budget.timeout;
  }

  void add_input_rule(const Rule& r, bool from_query) {
    if (r.kind() == RuleKind::Constraint)
      throw std::invalid_argument("rewrite_k: constraints must be turned into queries first");
    NameSupply names;
    Rule renamed = rename_apart(r, frozen_names_, names);
    insert_rule(renamed, 0, 0, from_query, true);
  }

  void add_input_cq(const Csf& frozen_cq, bool from_query) {
    NameSupply names;
    VarSet reserved = frozen_names_;
    auto [atoms, _] = rename_apart(frozen_cq.atoms(), reserved, names);
    pending_.push_back({Csf(std::move(atoms)), from_query, 0});
  }

  RewriteResult run() {
    RewriteResult result;
    add_candidates(pending_);
    pending_.clear();
    const auto& b = options_.budget;
    for (;;) {
      if (b.max_iterations && stats_.iterations >= *b.max_iterations) break;
      bool changed = expand_existential();
      if (exhausted_) break;
      changed = expand_disjunctive() || changed;
      if (exhausted_) break;
      ++stats_.iterations;
      result.completed_iteration = true;
      if (!changed) {
        result.converged = true;
        break;
      }
    }
    result.timed_out = timed_out_;
    result.stats = stats_;
    result.stats.cq_kept = 0;
    for (std::size_t i = 0; i < cqs_.size(); ++i) {
      if (!alive_[i]) continue;
      ++result.stats.cq_kept;
      result.ucq.push_back(present(cqs_[i]));
    }
    for (const auto& e : rules_)
      result.state.rules.push_back({thaw_rule(e.rule), e.generation, e.depth, e.input});
    for (std::size_t i = 0; i < cqs_.size(); ++i) result.state.cqs.push_back(present(cqs_[i]));
    result.state.alive = alive_;
    return result;
  }

 private:
  struct CqEntry {
    Csf atoms;
    bool from_query = true;
    std::size_t generation = 0;
    std::size_t depth = 0;
    std::size_t expanded_upto = 0;  // existential rules [0, expanded_upto) already applied
    std::vector<std::string> preds;
  };
  struct RuleEntry {
    Rule rule;
    bool from_query = false;
    std::size_t generation = 0;
    std::size_t depth = 0;
    bool input = false;
  };
  struct Candidate {
    Csf atoms;
    bool from_query = true;
    std::size_t depth = 0;
  };

  bool out_of_budget() {
    if (exhausted_) return true;
    if (deadline_ && std::chrono::steady_clock::now() >= *deadline_) {
      timed_out_ = true;
      exhausted_ = true;
    }
    if (cqs_.size() > options_.budget.max_cqs || rules_.size() > options_.budget.max_rules)
      exhausted_ = true;
    return exhausted_;
  }

  CqRecord present(const CqEntry& e) const {
    CqRecord rec;
    VarSet answers = frozen_names_in(e.atoms);
    rec.atoms = canonical_names(thaw(e.atoms), answers);
    for (const auto& v : answer_order_)
      if (answers.contains(v)) rec.answer_vars.push_back(v);
    rec.origin = e.from_query ? Origin::Query : Origin::InconsistencyWitness;
    rec.generation = e.generation;
    rec.depth = e.depth;
    return rec;
  }

  // Returns false when an equivalent rule is already known.
  bool insert_rule(const Rule& r, std::size_t generation, std::size_t depth, bool from_query,
                   bool input) {
    std::string key = rule_signature(r);
    auto& bucket = buckets_[key];
    for (std::size_t idx : bucket)
      if (alpha_equivalent(rules_[idx].rule, r)) return false;
    bucket.push_back(rules_.size());
    Rule stored = r;
    if (!input) {
      ++stats_.rules_generated;
      if (r.label) stored.label = *r.label + ".rw" + std::to_string(stats_.rules_generated);
    }
    if (stored.kind() == RuleKind::Existential)
      existential_.push_back(rules_.size());
    else
      disjunctive_.push_back(rules_.size());
    rules_.push_back({std::move(stored), from_query, generation, depth, input});
    return true;
  }

  bool subsumed_by_alive(const Csf& c, const std::vector<std::string>& preds) const {
    for (std::size_t i = 0; i < cqs_.size(); ++i) {
      if (!alive_[i]) continue;
      const auto& gp = cqs_[i].preds;
      if (options_.prune) {
        if (!std::includes(preds.begin(), preds.end(), gp.begin(), gp.end())) continue;
        if (subsumes(cqs_[i].atoms, c)) return true;
      } else if (gp == preds && isomorphic(cqs_[i].atoms, c)) {
        return true;
      }
    }
    return false;
  }

  std::size_t add_candidates(const std::vector<Candidate>& candidates) {
    std::size_t kept = 0;
    ++generation_;
    for (const auto& cand : candidates) {
      auto preds = predicate_set(cand.atoms);
      if (subsumed_by_alive(cand.atoms, preds)) continue;
      if (options_.prune)
        for (std::size_t i = 0; i < cqs_.size(); ++i) {
          if (!alive_[i]) continue;
          const auto& gp = cqs_[i].preds;
          if (std::includes(gp.begin(), gp.end(), preds.begin(), preds.end()) &&
              subsumes(cand.atoms, cqs_[i].atoms))
            alive_[i] = false;
        }
      cqs_.push_back({cand.atoms, cand.from_query, generation_, cand.depth, 0, std::move(preds)});
      alive_.push_back(true);
      ++kept;
    }
    return kept;
  }

  VarSet reserved_for(const Csf& q) const {
    VarSet r = q.vars();
    r.insert(frozen_names_.begin(), frozen_names_.end());
    return r;
  }

  std::vector<Produced> existential_steps(std::size_t cq_index, std::size_t lo,
                                          std::size_t hi) const {
    std::vector<Produced> out;
    const Csf& q = cqs_[cq_index].atoms;
    for (std::size_t k = lo; k < hi; ++k) {
      NameSupply names;
      Rule r = rename_apart(rules_[existential_[k]].rule, reserved_for(q), names);
      std::set<Csf> seen;
      for_each_piece_unification(r, q, [&](const PieceUnification& pu) {
        Csf res = existential_result(pu, q);
        if (!seen.insert(res).second) return true;
        Produced p;
        p.cq = res;
        p.rule_index = existential_[k];
        if (options_.audit) p.record = StepRecord{q, pu, res};
        out.push_back(std::move(p));
        return true;
      });
    }
    return out;
  }

  std::vector<Produced> disjunctive_steps(std::size_t rule_index, std::size_t cq_index) const {
    std::vector<Produced> out;
    const Csf& q = cqs_[cq_index].atoms;
    NameSupply names;
    Rule r = rename_apart(rules_[rule_index].rule, reserved_for(q), names);
    std::vector<Rule> seen;
    for_each_piece_unification(r, q, [&](const PieceUnification& pu) {
      Rule res = disjunctive_result(pu, q);
      for (const Rule& s : seen)
        if (s == res) return true;
      seen.push_back(res);
      Produced p;
      p.rule = res;
      p.is_rule = true;
      p.rule_index = rule_index;
      if (options_.audit) p.record = StepRecord{q, pu, res};
      out.push_back(std::move(p));
      return true;
    });
    return out;
  }

  void report(const std::vector<Produced>& produced) {
    stats_.piece_unifications += produced.size();
    if (!options_.audit) return;
    for (const auto& p : produced)
      if (p.record) options_.audit(*p.record);
  }

  bool expand_existential() {
    bool any = false;
    std::size_t levels = 0;
    while (!options_.k || levels < *options_.k) {
      const std::size_t rule_count = existential_.size();
      std::vector<std::size_t> frontier;
      for (std::size_t i = 0; i < cqs_.size(); ++i)
        if (alive_[i] && cqs_[i].expanded_upto < rule_count) frontier.push_back(i);
      if (frontier.empty()) break;

      std::vector<std::vector<Produced>> per_cq(frontier.size());
      auto work = [&](std::size_t from, std::size_t to) {
        for (std::size_t f = from; f < to; ++f)
          per_cq[f] = existential_steps(frontier[f], cqs_[frontier[f]].expanded_upto, rule_count);
      };
      if (options_.jobs > 1 && frontier.size() > 1) {
        std::vector<std::future<void>> tasks;
        std::size_t chunk = (frontier.size() + options_.jobs - 1) / options_.jobs;
        for (std::size_t from = 0; from < frontier.size(); from += chunk)
          tasks.push_back(std::async(std::launch::async, work, from,
                                     std::min(frontier.size(), from + chunk)));
        for (auto& t : tasks) t.get();
      } else {
        for (std::size_t f = 0; f < frontier.size(); ++f) {
          if (out_of_budget()) return any;
          work(f, f + 1);
        }
      }

      std::vector<Candidate> candidates;
      for (std::size_t f = 0; f < frontier.size(); ++f) {
        CqEntry& src = cqs_[frontier[f]];
        src.expanded_upto = rule_count;
        report(per_cq[f]);
        for (auto& p : per_cq[f]) {
          const RuleEntry& re = rules_[p.rule_index];
          candidates.push_back({std::move(p.cq), src.from_query || re.from_query,
                                1 + std::max(src.depth, re.depth)});
        }
      }
      stats_.cq_generated += candidates.size();
      if (add_candidates(candidates) > 0) any = true;
      ++levels;
      if (out_of_budget()) break;
    }
    return any;
  }

  bool expand_disjunctive() {
    bool any = false;
    std::vector<std::size_t> snapshot;
    for (std::size_t i = 0; i < cqs_.size(); ++i)
      if (alive_[i]) snapshot.push_back(i);
    std::vector<Candidate> constraints;
    ++generation_;
    for (std::size_t d = 0; d < disjunctive_.size(); ++d) {
      const std::size_t ri = disjunctive_[d];
      for (std::size_t ci : snapshot) {
        if (!done_.insert({ri, ci}).second) continue;
        if (out_of_budget()) return any;
        auto produced = disjunctive_steps(ri, ci);
        report(produced);
        const bool from_query = rules_[ri].from_query || cqs_[ci].from_query;
        const std::size_t depth = std::max(rules_[ri].depth, cqs_[ci].depth);
        for (auto& p : produced) {
          if (p.rule.kind() == RuleKind::Constraint) {
            constraints.push_back({p.rule.body, from_query, depth + 1});
            ++stats_.cq_generated;
          } else if (insert_rule(p.rule, generation_, depth, from_query, false)) {
            any = true;
          }
        }
      }
    }
    if (add_candidates(constraints) > 0) any = true;
    return any;
  }

  const RewriteOptions& options_;
  VarSet frozen_names_;
  std::vector<std::string> answer_order_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;

  std::vector<RuleEntry> rules_;
  std::vector<std::size_t> existential_;
  std::vector<std::size_t> disjunctive_;
  std::map<std::string, std::vector<std::size_t>> buckets_;
  std::vector<CqEntry> cqs_;
  std::vector<bool> alive_;
  std::vector<Candidate> pending_;
  std::set<std::pair<std::size_t, std::size_t>> done_;
  std::size_t generation_ = 0;
  RewriteStats stats_;
  bool exhausted_ = false;
  bool timed_out_ = false;
};

bool rule_from_query(const Rule& r) {
  for (const Atom& a : r.body)
    for (const Term& t : a.args)
      if (is_frozen_constant(t)) return true;
  return false;
}

}  // namespace

bool alpha_equivalent(const Rule& a, const Rule& b) {
  if (a.body.size() != b.body.size() || a.head.size() != b.head.size()) return false;
  return isomorphic(rule_as_csf(a), rule_as_csf(b));
}

std::vector<Csf> existential_step(const Rule& r, const Csf& q, const VarSet& frozen) {
  Csf fq = freeze_vars(q, frozen);
  VarSet reserved = fq.vars();
  reserved.insert(frozen.begin(), frozen.end());
  NameSupply names;
  Rule fr = rename_apart(r, reserved, names);
  std::vector<Csf> out;
  for_each_piece_unification(fr, fq, [&](const PieceUnification& pu) {
    Csf res = thaw(existential_result(pu, fq));
    if (std::find(out.begin(), out.end(), res) == out.end()) out.push_back(std::move(res));
    return true;
  });
  return out;
}

std::vector<Rule> disjunctive_step(const Rule& r, const Csf& q, const VarSet& frozen) {
  Csf fq = freeze_vars(q, frozen);
  VarSet reserved = fq.vars();
  reserved.insert(frozen.begin(), frozen.end());
  NameSupply names;
  Rule fr = rename_apart(r, reserved, names);
  std::vector<Rule> out;
  for_each_piece_unification(fr, fq, [&](const PieceUnification& pu) {
    Rule res = thaw_rule(disjunctive_result(pu, fq));
    if (std::find(out.begin(), out.end(), res) == out.end()) out.push_back(std::move(res));
    return true;
  });
  return out;
}

std::vector<Csf> prune(const std::vector<Csf>& ucq, const VarSet& frozen) {
  std::vector<Csf> kept;
  for (const Csf& c : ucq) {
    bool covered = false;
    for (const Csf& k : kept)
      if (subsumes(k, c, frozen)) {
        covered = true;
        break;
      }
    if (covered) continue;
    std::erase_if(kept, [&](const Csf& k) { return subsumes(c, k, frozen); });
    kept.push_back(c);
  }
  // Restore input order among survivors.
  std::vector<Csf> out;
  for (const Csf& c : ucq)
    if (std::find(kept.begin(), kept.end(), c) != kept.end() &&
        std::find(out.begin(), out.end(), c) == out.end())
      out.push_back(c);
  return out;
}

RewriteResult rewrite_k(const std::vector<Rule>& rules, const std::vector<SourcedCq>& ucq,
                        const RewriteOptions& options) {
  VarSet frozen;
  std::vector<std::string> order;
  for (const auto& q : ucq)
    for (const auto& v : q.answer_vars)
      if (frozen.insert(v).second) order.push_back(v);
  for (const Rule& r : rules) {
    for (const auto& v : frozen_names_in(r.body))
      if (frozen.insert(v).second) order.push_back(v);
  }
  Engine engine(options, frozen, order);
  for (const Rule& r : rules) engine.add_input_rule(r, rule_from_query(r));
  for (const auto& q : ucq) {
    VarSet own(q.answer_vars.begin(), q.answer_vars.end());
    engine.add_input_cq(freeze_vars(q.atoms, own), q.origin == Origin::Query);
  }
  return engine.run();
}

RewriteResult rewrite_k(const std::vector<Rule>& rules, const std::vector<Csf>& ucq,
                        const RewriteOptions& options, const VarSet& frozen) {
  std::vector<SourcedCq> sourced;
  for (const Csf& c : ucq) {
    SourcedCq s;
    s.atoms = c;
    for (const auto& v : c.vars())
      if (frozen.contains(v)) s.answer_vars.push_back(v);
    sourced.push_back(std::move(s));
  }
  return rewrite_k(rules, sourced, options);
}

std::vector<Csf> rewrite_exists_k(const std::vector<Rule>& existential_rules,
                                  const std::vector<Csf>& ucq, std::optional<std::size_t> k,
                                  const VarSet& frozen) {
  for (const Rule& r : existential_rules)
    if (r.kind() != RuleKind::Existential)
      throw std::invalid_argument("rewrite_exists_k: rules must have exactly one disjunct");
  RewriteOptions opts;
  opts.k = k;
  opts.budget.max_iterations = 1;
  RewriteResult res = rewrite_k(existential_rules, ucq, opts, frozen);
  std::vector<Csf> out;
  for (const auto& c : res.ucq) out.push_back(c.atoms);
  return out;
}

std::vector<Rule> rewrite_disj(const std::vector<Rule>& rules, const std::vector<Csf>& ucq,
                               const VarSet& frozen) {
  std::vector<Rule> out = rules;
  auto known = [&](const Rule& r) {
    return std::any_of(out.begin(), out.end(), [&](const Rule& o) { return alpha_equivalent(o, r); });
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].kind() != RuleKind::Disjunctive) continue;
    for (const Csf& q : ucq)
      for (Rule& res : disjunctive_step(out[i], q, frozen))
        if (!known(res)) out.push_back(std::move(res));
  }
  return out;
}

}  // namespace ucqrew
