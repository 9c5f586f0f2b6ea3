#include "ucqrew/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "ucqrew/chase.hpp"
#include "ucqrew/dlgp.hpp"
#include "ucqrew/fragments.hpp"
#include "ucqrew/reduction.hpp"
#include "ucqrew/report.hpp"
#include "ucqrew/rewrite.hpp"

namespace ucqrew {

namespace {

struct InputFailure {};

class Inputs {
 public:
  explicit Inputs(std::ostream& err) : err_(err) {}

  dlgp::Document load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      err_ << path << ": error: cannot read file\n";
      throw InputFailure{};
    }
    std::stringstream buf;
    buf << in.rdbuf();
    dlgp::ParseResult res = dlgp::parse(buf.str());
    if (!res.ok()) {
      for (const auto& d : res.diagnostics)
        err_ << path << ":" << d.line << ":" << d.column << ": error: " << d.message << "\n";
      throw InputFailure{};
    }
    return std::move(res.document);
  }

  // Each --query is a file when one exists at that path, otherwise a label of a query in the
  // kb. Without any, every query of the kb is used.
  Ucq queries(const dlgp::Document& kb, const std::vector<std::string>& specs) {
    if (specs.empty()) {
      Ucq all = kb.queries();
      if (all.cqs.empty()) {
        err_ << "error: the knowledge base contains no query and --query was not given\n";
        throw InputFailure{};
      }
      return all;
    }
    Ucq picked;
    for (const auto& spec : specs) {
      if (std::filesystem::is_regular_file(spec)) {
        for (auto& q : load(spec).queries().cqs) picked.cqs.push_back(std::move(q));
        continue;
      }
      std::size_t before = picked.cqs.size();
      for (const auto& q : kb.queries().cqs)
        if (q.label == spec) picked.cqs.push_back(q);
      if (picked.cqs.size() == before) {
        err_ << "error: no query file or query labelled '" << spec << "'\n";
        throw InputFailure{};
      }
    }
    return picked;
  }

  NormalizedProblem normalize(const KnowledgeBase& kb, const Ucq& q) {
    try {
      return normalize_problem(kb, q);
    } catch (const ValidationError& e) {
      for (const auto& d : e.diagnostics()) err_ << "error: " << d.message << "\n";
      throw InputFailure{};
    }
  }

 private:
  std::ostream& err_;
};

std::optional<std::size_t> parse_k(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::nullopt;
  std::size_t pos = 0;
  unsigned long long v = std::stoull(text, &pos);
  if (pos != text.size()) throw std::invalid_argument(text);
  return static_cast<std::size_t>(v);
}

struct RewriteArgs {
  std::string kb;
  std::vector<std::string> query;
  std::string k = "2";
  std::size_t max_iterations = 64;
  std::optional<double> timeout_secs;
  bool no_prune = false;
  std::string format = "dlgp";
  bool stats = false;
  std::string stats_out;
  std::size_t jobs = 1;
};

int cmd_rewrite(const RewriteArgs& a, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Inputs inputs(err);
  NormalizedProblem problem;
  RewriteOptions opts;
  try {
    dlgp::Document kb = inputs.load(a.kb);
    problem = inputs.normalize(kb.kb(), inputs.queries(kb, a.query));
    try {
      opts.k = parse_k(a.k);
    } catch (const std::exception&) {
      err << "error: --k expects a natural number or 'inf'\n";
      return InputError;
    }
  } catch (const InputFailure&) {
    return InputError;
  }
  opts.prune = !a.no_prune;
  opts.jobs = std::max<std::size_t>(1, a.jobs);
  opts.budget.max_iterations = a.max_iterations;
  if (a.timeout_secs)
    opts.budget.timeout = std::chrono::milliseconds(
        static_cast<long long>(std::max(0.0, *a.timeout_secs) * 1000.0));

  RewriteResult res = rewrite_k(problem.rules, problem.positive_ucq, opts);

  RunStats stats;
  stats.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  stats.peak_memory_estimate_bytes = peak_memory_estimate();
  stats.iterations = res.stats.iterations;
  stats.cq_generated = res.stats.cq_generated;
  stats.cq_kept_after_prune = res.stats.cq_kept;
  stats.rules_generated = res.stats.rules_generated;
  stats.piece_unifications = res.stats.piece_unifications;
  stats.converged = res.converged;
  stats.timed_out = res.timed_out;
  if (a.stats || !a.stats_out.empty()) {
    std::string text = to_json(stats).dump(2) + "\n";
    if (a.stats_out.empty()) {
      err << text;
    } else {
      std::ofstream f(a.stats_out);
      if (!f) {
        err << a.stats_out << ": error: cannot write stats\n";
        return InputError;
      }
      f << text;
    }
  }

  if (res.timed_out && !res.completed_iteration) {
    err << "error: timeout before the first iteration completed\n";
    return TimeoutBeforeOutput;
  }
  if (a.format == "json") {
    out << to_json(res.ucq).dump(2) << "\n";
  } else {
    for (const auto& cq : res.ucq) {
      std::optional<std::string> label;
      if (cq.origin == Origin::InconsistencyWitness) label = origin_name(cq.origin);
      out << dlgp::print_cq(cq.atoms, cq.answer_vars, label) << "\n";
    }
  }
  return res.converged ? Ok : BudgetExhausted;
}

int cmd_classify(const std::string& kb_path, std::ostream& out, std::ostream& err) {
  Inputs inputs(err);
  try {
    dlgp::Document doc = inputs.load(kb_path);
    KnowledgeBase kb = doc.kb();
    NormalizedProblem problem = inputs.normalize(kb, doc.queries());
    std::vector<Rule> rules = problem.rules;
    const auto constraints = partition(kb).constraints;
    rules.insert(rules.end(), constraints.begin(), constraints.end());
    out << to_json(is_fus_guaranteed(rules)).dump(2) << "\n";
    return Ok;
  } catch (const InputFailure&) {
    return InputError;
  }
}

int cmd_oracle(const std::string& kb_path, const std::string& facts_path,
               const std::vector<std::string>& query, std::size_t depth, std::ostream& out,
               std::ostream& err) {
  Inputs inputs(err);
  try {
    dlgp::Document doc = inputs.load(kb_path);
    KnowledgeBase kb = doc.kb();
    if (!facts_path.empty()) kb.facts = merge(kb.facts, inputs.load(facts_path).kb().facts);
    Ucq q = inputs.queries(doc, query);
    for (auto& cq : q.cqs) cq.answer_vars.clear();
    NormalizedProblem problem = inputs.normalize(kb, q);
    std::vector<Csf> ucq;
    for (const auto& c : problem.positive_ucq) ucq.push_back(c.atoms);
    Entailment e = entails(problem.rules, kb.facts, ucq, depth);
    out << (e == Entailment::True ? "true" : "unknown") << "\n";
    return Ok;
  } catch (const InputFailure&) {
    return InputError;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"UCQ rewriting for disjunctive existential rules with negated queries"};
  app.require_subcommand(1);

  RewriteArgs rw;
  auto* rewrite = app.add_subcommand("rewrite", "Compile the queries into a UCQ rewriting");
  rewrite->add_option("--kb", rw.kb, "DLGP+ knowledge base")->required();
  rewrite->add_option("--query", rw.query, "Query file, or label of a query in the kb (repeatable)");
  rewrite->add_option("--k", rw.k, "Existential levels per iteration, a number or 'inf'")
      ->capture_default_str();
  rewrite->add_option("--max-iterations", rw.max_iterations, "Outer iteration budget")
      ->capture_default_str();
  rewrite->add_option("--timeout-secs", rw.timeout_secs, "Wall-clock budget");
  rewrite->add_flag("--no-prune", rw.no_prune, "Keep CQs subsumed by others");
  rewrite->add_option("--format", rw.format, "Output format")
      ->check(CLI::IsMember({"dlgp", "json"}))
      ->capture_default_str();
  rewrite->add_flag("--stats", rw.stats, "Write run statistics as JSON to stderr");
  rewrite->add_option("--stats-out", rw.stats_out, "Write run statistics to this file");
  rewrite->add_option("--jobs", rw.jobs, "Worker threads per expansion level")
      ->capture_default_str();

  std::string classify_kb;
  auto* classify = app.add_subcommand("classify", "Report rule fragments and the fus verdict");
  classify->add_option("--kb", classify_kb, "DLGP+ knowledge base")->required();

  std::string oracle_kb, oracle_facts;
  std::vector<std::string> oracle_query;
  std::size_t oracle_depth = 3;
  auto* oracle = app.add_subcommand("oracle", "Decide entailment with a bounded chase");
  oracle->add_option("--kb", oracle_kb, "DLGP+ knowledge base")->required();
  oracle->add_option("--facts", oracle_facts, "Additional facts");
  oracle->add_option("--query", oracle_query, "Query file, or label of a query in the kb (repeatable)");
  oracle->add_option("--depth", oracle_depth, "Chase rounds")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? Ok : InputError;
  }

  if (*rewrite) return cmd_rewrite(rw, out, err);
  if (*classify) return cmd_classify(classify_kb, out, err);
  return cmd_oracle(oracle_kb, oracle_facts, oracle_query, oracle_depth, out, err);
}

}  // namespace ucqrew
