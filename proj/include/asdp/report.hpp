#pragma once

// CSV report comparing exact and LOBPCG projections per problem.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asdp {

struct ReportRow {
  std::string name;
  int n_max = 0;
  int rank = 0;  // largest Ritz-pair count in the final LOBPCG call
  double t_exact = 0;
  double speedup = 0;  // t_exact / t
  double t_proj_exact = 0;
  double speedup_proj = 0;  // t_proj_exact / t_proj
  int iter_exact = 0;
  int iter = 0;
  double f_exact = 0;
  double f = 0;
  std::optional<double> f_star;
  std::string status = "ok";  // per-file failure message otherwise

  bool operator==(const ReportRow&) const = default;
};

struct ReportOptions {
  bool omit_timings = false;  // write 0 in the four timing columns
};

extern const std::vector<std::string> kReportColumns;

std::string write_report(const std::vector<ReportRow>& rows, const ReportOptions& options = {});

/// Throws FormatError on a malformed header or row.
std::vector<ReportRow> read_report(std::string_view csv);

}  // namespace asdp
