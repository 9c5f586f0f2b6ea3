#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "ucqrew/fragments.hpp"
#include "ucqrew/rewrite.hpp"

namespace ucqrew {

struct RunStats {
  double runtime_ms = 0;
  std::optional<std::size_t> peak_memory_estimate_bytes;  // VmHWM of the process, if readable
  std::size_t iterations = 0;
  std::size_t cq_generated = 0;
  std::size_t cq_kept_after_prune = 0;
  std::size_t rules_generated = 0;
  std::size_t piece_unifications = 0;
  bool converged = false;
  bool timed_out = false;
};

// Peak resident set size from /proc/self/status; nullopt elsewhere.
std::optional<std::size_t> peak_memory_estimate();

nlohmann::json to_json(const RunStats& s);
nlohmann::json to_json(const FusReport& r);
// {cqs: [{atoms: [{predicate, args}], answer_vars, origin}]}, terms in DLGP spelling.
nlohmann::json to_json(const std::vector<CqRecord>& ucq);

std::string origin_name(Origin o);

}  // namespace ucqrew
