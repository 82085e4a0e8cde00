#include "asdp/sdpa.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "asdp/errors.hpp"

namespace asdp {
namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

bool is_separator(char ch) {
  switch (ch) {
    case ' ': case '\t': case '\r': case '\v': case '\f':
    case ',': case '(': case ')': case '{': case '}':
      return true;
    default:
      return false;
  }
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_separator(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_separator(line[j])) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (!header_seen && (raw[first] == '"' || raw[first] == '*')) continue;
    header_seen = true;
    lines.push_back({number, tokenize(raw)});
    if (end == text.size()) break;
  }
  return lines;
}

bool parse_int(const std::string& tok, int& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool parse_real(const std::string& tok, double& out) {
  std::string s = tok;
  std::replace(s.begin(), s.end(), 'D', 'e');
  std::replace(s.begin(), s.end(), 'd', 'e');
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && std::isfinite(out);
}

// Walks tokens across lines for the header fields that may wrap.
class TokenCursor {
 public:
  explicit TokenCursor(const std::vector<Line>& lines) : lines_(lines) {}

  bool at_end() const { return line_ >= lines_.size(); }
  int line_number() const { return at_end() ? (lines_.empty() ? 1 : lines_.back().number) : lines_[line_].number; }
  std::size_t line_index() const { return line_; }

  const std::string& next(const char* what) {
    while (!at_end() && tok_ >= lines_[line_].tokens.size()) advance_line();
    if (at_end()) throw ParseError(line_number(), std::string("unexpected end of input while reading ") + what);
    return lines_[line_].tokens[tok_++];
  }

  // Discards the rest of the current line (trailing annotations such as "= mDIM").
  void finish_line() {
    if (!at_end() && tok_ > 0) advance_line();
  }

 private:
  void advance_line() {
    ++line_;
    tok_ = 0;
  }

  const std::vector<Line>& lines_;
  std::size_t line_ = 0;
  std::size_t tok_ = 0;
};

}  // namespace

int BlockProblem::max_block_dim() const {
  int best = 0;
  for (int d : block_dims) best = std::max(best, std::abs(d));
  return best;
}

Matrix<double> BlockProblem::block_matrix(int matrix, int block) const {
  if (block < 1 || block > num_blocks()) throw FormatError("block_matrix: block index out of range");
  const int n = std::abs(block_dims[static_cast<std::size_t>(block - 1)]);
  Matrix<double> f = Matrix<double>::Zero(n, n);
  for (const auto& e : entries) {
    if (e.matrix != matrix || e.block != block) continue;
    f(e.row - 1, e.col - 1) = e.value;
    f(e.col - 1, e.row - 1) = e.value;
  }
  return f;
}

BlockProblem parse_sdpa(std::string_view text) {
  const std::vector<Line> lines = split_lines(text);
  TokenCursor cur(lines);
  BlockProblem bp;

  int line_no = cur.line_number();
  if (!parse_int(cur.next("the constraint count"), bp.num_constraints) || bp.num_constraints < 1)
    throw ParseError(line_no, "expected a positive constraint count");
  cur.finish_line();

  line_no = cur.line_number();
  int nblocks = 0;
  if (!parse_int(cur.next("the block count"), nblocks) || nblocks < 1)
    throw ParseError(line_no, "expected a positive block count");
  cur.finish_line();

  bp.block_dims.resize(static_cast<std::size_t>(nblocks));
  for (auto& d : bp.block_dims) {
    line_no = cur.line_number();
    const std::string& tok = cur.next("the block sizes");
    if (!parse_int(tok, d) || d == 0) throw ParseError(line_no, "invalid block size '" + tok + "'");
  }
  cur.finish_line();

  bp.c.resize(static_cast<std::size_t>(bp.num_constraints));
  for (auto& ci : bp.c) {
    line_no = cur.line_number();
    const std::string& tok = cur.next("the objective vector");
    if (!parse_real(tok, ci)) throw ParseError(line_no, "invalid number '" + tok + "' in the objective vector");
  }
  cur.finish_line();

  std::set<std::tuple<int, int, int, int>> seen;
  for (std::size_t li = cur.line_index(); li < lines.size(); ++li) {
    const Line& line = lines[li];
    if (line.tokens.size() != 5)
      throw ParseError(line.number, "entry lines need 5 fields, found " + std::to_string(line.tokens.size()));
    SdpaEntry e;
    if (!parse_int(line.tokens[0], e.matrix) || !parse_int(line.tokens[1], e.block) ||
        !parse_int(line.tokens[2], e.row) || !parse_int(line.tokens[3], e.col))
      throw ParseError(line.number, "entry indices must be integers");
    if (!parse_real(line.tokens[4], e.value)) throw ParseError(line.number, "invalid entry value '" + line.tokens[4] + "'");
    if (e.matrix < 0 || e.matrix > bp.num_constraints)
      throw ParseError(line.number, "matrix index " + std::to_string(e.matrix) + " out of range");
    if (e.block < 1 || e.block > nblocks)
      throw ParseError(line.number, "block index " + std::to_string(e.block) + " out of range");
    const int dim = bp.block_dims[static_cast<std::size_t>(e.block - 1)];
    const int n = std::abs(dim);
    if (e.row < 1 || e.col < 1 || e.row > n || e.col > n)
      throw ParseError(line.number, "entry position outside a block of size " + std::to_string(n));
    if (e.row > e.col) throw ParseError(line.number, "entry lies in the lower triangle");
    if (dim < 0 && e.row != e.col) throw ParseError(line.number, "off-diagonal entry in a diagonal block");
    if (!seen.emplace(e.matrix, e.block, e.row, e.col).second)
      throw ParseError(line.number, "duplicate entry");
    bp.entries.push_back(e);
  }
  return bp;
}

BlockProblem read_sdpa_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sdpa(ss.str());
}

std::string write_sdpa(const BlockProblem& bp) {
  std::ostringstream out;
  out.precision(17);
  out << bp.num_constraints << "\n" << bp.num_blocks() << "\n";
  for (std::size_t j = 0; j < bp.block_dims.size(); ++j) out << (j ? " " : "") << bp.block_dims[j];
  out << "\n";
  for (std::size_t i = 0; i < bp.c.size(); ++i) out << (i ? " " : "") << bp.c[i];
  out << "\n";
  for (const auto& e : bp.entries)
    out << e.matrix << " " << e.block << " " << e.row << " " << e.col << " " << e.value << "\n";
  return out.str();
}

}  // namespace asdp
