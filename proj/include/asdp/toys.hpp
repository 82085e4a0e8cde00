#pragma once

// Built-in problems whose solution or infeasibility is known by construction.

#include <cstdint>

#include "asdp/admm.hpp"
#include "asdp/sdpa.hpp"

namespace asdp::toys {

/// x >= 1 and -x >= 1: two translated nonnegative cones with A = [1; -1].
ConicProblem<double> primal_infeasible();

/// minimize -x subject to x >= 0.
ConicProblem<double> dual_infeasible();

/// minimize x^2 - 2x subject to x >= 0; solution x = 1, objective -1.
ConicProblem<double> scalar_qp();

/// minimize t subject to tI - M PSD; optimal value lambda_max(M).
ConicProblem<double> max_eigenvalue_sdp(const Vector<double>& diag_m);

struct PlantedSdp {
  BlockProblem problem;
  double f_star = 0;
  Matrix<double> y_star;
  Vector<double> x_star;  // optimal multipliers of the equality rows
};

/// SDPA dual-form instance with a single n x n block and m random dense
/// constraints, built from a complementary pair (Y*, S*) with rank(Y*) = rank.
PlantedSdp planted_sdp(int n, int m, int rank, std::uint64_t seed);

/// Diagonal-constraint instance diag(Y) = c with an optimal Y* of the given
/// rank: F_i = e_i e_i', F_0 = diag(x*) - S*.
PlantedSdp planted_diagonal_sdp(int n, int rank, std::uint64_t seed);

/// minimize q'x subject to (1_m' kron I_{m^2}) x = b, x >= 0 with m = ell + 1.
/// f_star receives the optimal value.
ConicProblem<double> bo_structured_lp(Index ell, std::uint64_t seed, double* f_star = nullptr);

}  // namespace asdp::toys
