#pragma once

// Lowering of the SDPA dual form
//
//   maximize  sum_j <F_{0,j}, Y_j>
//   subject to sum_j <F_{i,j}, Y_j> = c_i,  Y_j PSD (or nonnegative diagonal)
//
// to minimize q'x s.t. Ax = z, z in C, with one variable per block:
//   x = [svec(Y_1); ...; diag(Y_LP); ...],  q = -[svec(F_{0,j})],
//   A = [rows svec(F_i)'; I],  C = {c} x blocks of PSD / nonnegative cones.
// The reported objective is negated back.

#include <vector>

#include "asdp/admm.hpp"
#include "asdp/sdpa.hpp"

namespace asdp {

struct BlockLayout {
  int block = 0;     // 1-based SDPA block index
  int dim = 0;       // matrix dimension (LP: number of diagonal entries)
  bool diagonal = false;
  Index offset = 0;  // offset into x
  Index length = 0;  // entries of x owned by this block
};

struct LoweredProblem {
  ConicProblem<double> problem;
  std::vector<BlockLayout> layout;
  Index num_equalities = 0;

  /// Dense Y_j recovered from a solution vector x.
  Matrix<double> block_value(const Vector<double>& x, std::size_t j) const;
};

LoweredProblem split_and_lower(const BlockProblem& bp);

}  // namespace asdp
