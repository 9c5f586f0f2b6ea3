#include "ucqrew/report.hpp"

#include <fstream>
#include <sstream>

#include "ucqrew/dlgp.hpp"

namespace ucqrew {

std::optional<std::size_t> peak_memory_estimate() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) != 0) continue;
    std::istringstream fields(line.substr(6));
    std::size_t kb = 0;
    if (fields >> kb) return kb * 1024;
  }
  return std::nullopt;
}

std::string origin_name(Origin o) {
  return o == Origin::Query ? "query" : "inconsistency-witness";
}

nlohmann::json to_json(const RunStats& s) {
  nlohmann::json j;
  j["runtime_ms"] = s.runtime_ms;
  if (s.peak_memory_estimate_bytes)
    j["peak_memory_estimate_bytes"] = *s.peak_memory_estimate_bytes;
  else
    j["peak_memory_estimate_bytes"] = nullptr;
  j["memory_estimate_source"] = "VmHWM (process peak resident set, best effort)";
  j["iterations"] = s.iterations;
  j["cq_generated"] = s.cq_generated;
  j["cq_kept_after_prune"] = s.cq_kept_after_prune;
  j["rules_generated"] = s.rules_generated;
  j["piece_unifications"] = s.piece_unifications;
  j["converged"] = s.converged;
  j["timed_out"] = s.timed_out;
  return j;
}

nlohmann::json to_json(const FusReport& r) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& f : r.rules)
    rules.push_back({{"id", f.id},
                     {"linear", f.linear},
                     {"disconnected", f.disconnected},
                     {"dr", f.dr},
                     {"cdr", f.cdr},
                     {"clr", f.clr},
                     {"dder", f.dder},
                     {"sticky_compatible", f.sticky_compatible}});
  return {{"rules", rules},
          {"sticky", r.sticky},
          {"agrd", r.agrd},
          {"parts_independent", r.parts_independent},
          {"verdict", r.verdict()},
          {"reason", r.reason},
          {"citation", r.citation}};
}

nlohmann::json to_json(const std::vector<CqRecord>& ucq) {
  nlohmann::json cqs = nlohmann::json::array();
  for (const auto& cq : ucq) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const Atom& a : cq.atoms) {
      nlohmann::json args = nlohmann::json::array();
      for (const Term& t : a.args) args.push_back(dlgp::print(t));
      atoms.push_back({{"predicate", a.predicate}, {"args", args}});
    }
    cqs.push_back({{"atoms", atoms}, {"answer_vars", cq.answer_vars}, {"origin", origin_name(cq.origin)}});
  }
  return {{"cqs", cqs}};
}

}  // namespace ucqrew
