#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbary/driver.hpp"
#include "wbary/model.hpp"

namespace wbary::io {

// {"weights": [...], "measures": [{"points": [[...], ...], "masses": [...]}, ...]}
// Throws ParseError with the offending field (or line/column for malformed
// JSON) and ContractError-derived messages for invariant violations.
Instance parse_instance_json(const std::string& text);

// Rows "measure_id,coord_1,...,coord_d,mass"; an optional header line is
// skipped. Measures are ordered by id and weighted uniformly.
Instance parse_instance_csv(const std::string& text);

// Dispatches on the file extension (.csv, anything else is JSON).
Instance load_instance(const std::string& path);

nlohmann::json instance_to_json(const Instance& inst);

nlohmann::json result_to_json(const SolveResult& result);

// "iter,rm_obj,pricing_obj" followed by one row per iteration.
std::string trace_csv(const SolveResult& result);

struct GenOptions {
  std::vector<int> sizes;
  int dim = 2;
  bool random_masses = false;
  std::uint64_t seed = 1;
};

// Points uniform on [0,1]^dim from a seeded generator; uniform weights.
Instance generate_instance(const GenOptions& options);

}  // namespace wbary::io
