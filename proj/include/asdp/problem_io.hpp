#pragma once

// JSON problem input and JSON result output.
//
// Problem document:
//   {
//     "q": [..],                                   length k
//     "A": {"rows": m, "cols": k, "entries": [[i, j, v], ...]},
//     "P": {"rows": k, "cols": k, "entries": [...]},   optional, both triangles
//     "cones": [{"kind": "zero" | "nonnegative", "b": [..]},
//               {"kind": "psd", "n": 3, "b": [..]}],   "b" optional (zero)
//     "objective_scale": 1, "objective_offset": 0      optional
//   }
// Indices are 0-based.

#include <string>
#include <string_view>

#include "asdp/admm.hpp"

namespace asdp {

/// Throws FormatError on malformed documents.
ConicProblem<double> parse_problem_json(std::string_view text);
ConicProblem<double> read_problem_json_file(const std::string& path);
std::string write_problem_json(const ConicProblem<double>& prob);

struct ResultDumpOptions {
  bool include_solution = false;
  bool include_timings = true;
};

std::string result_to_json(const SolveResult<double>& result, const Settings& settings, const std::string& name,
                           const ResultDumpOptions& options = {});

}  // namespace asdp
