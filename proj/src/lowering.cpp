#include "asdp/lowering.hpp"

#include <cmath>

namespace asdp {

Matrix<double> LoweredProblem::block_value(const Vector<double>& x, std::size_t j) const {
  const BlockLayout& blk = layout.at(j);
  const Vector<double> seg = x.segment(blk.offset, blk.length);
  if (blk.diagonal) return seg.asDiagonal();
  return smat_dense(seg);
}

LoweredProblem split_and_lower(const BlockProblem& bp) {
  LoweredProblem out;
  Index offset = 0;
  for (int j = 0; j < bp.num_blocks(); ++j) {
    const int d = bp.block_dims[static_cast<std::size_t>(j)];
    BlockLayout blk;
    blk.block = j + 1;
    blk.dim = std::abs(d);
    blk.diagonal = d < 0;
    blk.offset = offset;
    blk.length = blk.diagonal ? blk.dim : triangular_size(blk.dim);
    offset += blk.length;
    out.layout.push_back(blk);
  }
  const Index k = offset;
  const Index meq = bp.num_constraints;
  out.num_equalities = meq;

  // Position in x of SDPA entry (block, row, col) and its svec weight.
  auto position = [&](const SdpaEntry& e) {
    const BlockLayout& blk = out.layout[static_cast<std::size_t>(e.block - 1)];
    if (blk.diagonal) return std::pair<Index, double>{blk.offset + e.row - 1, 1.0};
    const double w = e.row == e.col ? 1.0 : std::sqrt(2.0);
    return std::pair<Index, double>{blk.offset + packed_index(e.row - 1, e.col - 1), w};
  };

  ConicProblem<double>& prob = out.problem;
  prob.q = Vector<double>::Zero(k);
  std::vector<Eigen::Triplet<double, int>> trips;
  for (const auto& e : bp.entries) {
    auto [pos, w] = position(e);
    if (e.matrix == 0)
      prob.q(pos) -= w * e.value;
    else
      trips.emplace_back(e.matrix - 1, static_cast<int>(pos), w * e.value);
  }
  for (Index i = 0; i < k; ++i) trips.emplace_back(static_cast<int>(meq + i), static_cast<int>(i), 1.0);
  prob.A.resize(meq + k, k);
  prob.A.setFromTriplets(trips.begin(), trips.end());
  prob.A.makeCompressed();
  prob.P.resize(k, k);

  prob.cones.add_zero(Eigen::Map<const Vector<double>>(bp.c.data(), static_cast<Index>(bp.c.size())));
  for (const auto& blk : out.layout) {
    if (blk.diagonal)
      prob.cones.add_nonnegative(blk.dim);
    else
      prob.cones.add_psd(blk.dim);
  }
  prob.objective_scale = -1.0;
  return out;
}

}  // namespace asdp
