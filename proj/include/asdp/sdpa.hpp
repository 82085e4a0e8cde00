#pragma once

// Sparse SDPA (.dat-s) reading and writing.

#include <string>
#include <string_view>
#include <vector>

#include "asdp/linalg.hpp"

namespace asdp {

/// One nonzero of F_matrix restricted to a diagonal block. Block, row and
/// column are 1-based as in the file; row <= col.
struct SdpaEntry {
  int matrix = 0;
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0;

  bool operator==(const SdpaEntry&) const = default;
};

struct BlockProblem {
  int num_constraints = 0;
  std::vector<int> block_dims;  // negative: diagonal (LP) block
  std::vector<double> c;
  std::vector<SdpaEntry> entries;

  int num_blocks() const { return static_cast<int>(block_dims.size()); }
  int max_block_dim() const;

  /// Dense symmetric F_{matrix, block} (block is 1-based).
  Matrix<double> block_matrix(int matrix, int block) const;

  bool operator==(const BlockProblem&) const = default;
};

/// Parses sparse SDPA text. Comment lines start with '"' or '*'; the
/// characters ",(){}" count as whitespace. Throws ParseError.
BlockProblem parse_sdpa(std::string_view text);
BlockProblem read_sdpa_file(const std::string& path);

/// Emits text that parse_sdpa reads back to an identical BlockProblem.
std::string write_sdpa(const BlockProblem& bp);

}  // namespace asdp
