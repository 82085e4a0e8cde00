#include "asdp/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "asdp/errors.hpp"

namespace asdp {

const std::vector<std::string> kReportColumns = {"name",        "n_max",        "rank",       "t_exact", "speedup",
                                                 "t_proj_exact", "speedup_proj", "iter_exact", "iter",    "f_exact",
                                                 "f",           "f_star",       "status"};

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      in_quotes = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n') {
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else if (ch != '\r') {
      field += ch;
      any = true;
    }
  }
  if (in_quotes) throw FormatError("report: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double to_real(const std::string& s, const char* column) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw FormatError(std::string("report: invalid number in column ") + column);
  return v;
}

int to_int(const std::string& s, const char* column) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw FormatError(std::string("report: invalid integer in column ") + column);
  return v;
}

}  // namespace

std::string write_report(const std::vector<ReportRow>& rows, const ReportOptions& options) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kReportColumns.size(); ++i) out << (i ? "," : "") << kReportColumns[i];
  out << "\n";
  for (const auto& r : rows) {
    auto timing = [&](double v) { return options.omit_timings ? std::string("0") : format_real(v); };
    out << quote(r.name) << "," << r.n_max << "," << r.rank << "," << timing(r.t_exact) << "," << timing(r.speedup)
        << "," << timing(r.t_proj_exact) << "," << timing(r.speedup_proj) << "," << r.iter_exact << "," << r.iter
        << "," << format_real(r.f_exact) << "," << format_real(r.f) << ","
        << (r.f_star ? format_real(*r.f_star) : std::string()) << "," << quote(r.status) << "\n";
  }
  return out.str();
}

std::vector<ReportRow> read_report(std::string_view csv) {
  auto table = parse_csv(csv);
  if (table.empty() || table.front() != kReportColumns) throw FormatError("report: unexpected header");
  std::vector<ReportRow> rows;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& t = table[i];
    if (t.size() != kReportColumns.size())
      throw FormatError("report: row " + std::to_string(i) + " has " + std::to_string(t.size()) + " fields");
    ReportRow r;
    r.name = t[0];
    r.n_max = to_int(t[1], "n_max");
    r.rank = to_int(t[2], "rank");
    r.t_exact = to_real(t[3], "t_exact");
    r.speedup = to_real(t[4], "speedup");
    r.t_proj_exact = to_real(t[5], "t_proj_exact");
    r.speedup_proj = to_real(t[6], "speedup_proj");
    r.iter_exact = to_int(t[7], "iter_exact");
    r.iter = to_int(t[8], "iter");
    r.f_exact = to_real(t[9], "f_exact");
    r.f = to_real(t[10], "f");
    if (!t[11].empty()) r.f_star = to_real(t[11], "f_star");
    r.status = t[12];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace asdp
