#pragma once

// Exact and LOBPCG-based projection onto the positive semidefinite cone.

#include <cmath>
#include <optional>
#include <vector>

#include "asdp/eigsolver.hpp"
#include "asdp/linalg.hpp"

namespace asdp {

enum class ProjectionMode { ExactFull, ApproxPositive, ApproxNegative };

inline const char* to_string(ProjectionMode mode) {
  switch (mode) {
    case ProjectionMode::ExactFull: return "exact";
    case ProjectionMode::ApproxPositive: return "approx+";
    case ProjectionMode::ApproxNegative: return "approx-";
  }
  return "?";
}

/// Per-cone memory carried between ADMM iterations. `mode` is the mode
/// planned for the next call; `warm` matches it.
template <typename Scalar>
struct ProjectionContext {
  Index n = 0;
  bool cold = true;
  Index last_pos_count = 0;
  Index last_neg_count = 0;
  ProjectionMode mode = ProjectionMode::ExactFull;
  std::optional<LobpcgState<Scalar>> warm;  // only in the approximate modes
  std::vector<Scalar> error_log;

  // Diagnostics of the most recent call.
  Index last_ritz_count = 0;
  int last_inner_iterations = 0;
  bool last_fell_back = false;
  Scalar last_perp_estimate = 0;

  ProjectionContext() = default;
  explicit ProjectionContext(Index dim) : n(dim) {}
};

template <typename Scalar>
struct ExactProjection {
  Matrix<Scalar> projected;
  Index pos_count = 0;
  Index neg_count = 0;
  EigPairs<Scalar> eig;
};

template <typename Scalar>
Scalar zero_eigenvalue_tolerance(Scalar frobenius) {
  return Scalar(1e-9) * (Scalar(1) + frobenius);
}

/// Frobenius-nearest PSD matrix via a full eigendecomposition. Eigenvalues
/// within 1e-9 (1 + ||A||_F) of zero count as neither sign.
template <typename Derived>
ExactProjection<typename Derived::Scalar> project_exact(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  ExactProjection<Scalar> out;
  out.eig = full_symmetric_eig(a);
  const Index n = a.rows();
  const Scalar zero_tol = zero_eigenvalue_tolerance(a.norm());
  const auto& values = out.eig.values;
  const auto& vectors = out.eig.vectors;
  Index first_positive = n;
  for (Index i = 0; i < n; ++i) {
    if (values(i) > zero_tol) ++out.pos_count;
    if (values(i) < -zero_tol) ++out.neg_count;
    if (values(i) > Scalar(0) && first_positive == n) first_positive = i;
  }
  const Index npos = n - first_positive;
  if (npos <= n - npos) {
    auto v = vectors.rightCols(npos);
    out.projected = v * values.tail(npos).asDiagonal() * v.transpose();
  } else {
    auto v = vectors.leftCols(n - npos);
    out.projected = a - v * values.head(n - npos).asDiagonal() * v.transpose();
  }
  out.projected = (Scalar(0.5) * (out.projected + out.projected.transpose())).eval();
  return out;
}

template <typename Scalar>
SymMatrix<Scalar> project_exact(const SymMatrix<Scalar>& a) {
  return SymMatrix<Scalar>::from_dense(project_exact(a.dense()).projected);
}

/// Side-selection rule: approximate the side holding fewer than a third of
/// the eigenvalues; otherwise decompose fully.
template <typename Scalar>
ProjectionMode select_mode(const ProjectionContext<Scalar>& ctx) {
  if (ctx.cold) return ProjectionMode::ExactFull;
  const double third = static_cast<double>(ctx.n) / 3.0;
  const bool pos_small = static_cast<double>(ctx.last_pos_count) < third;
  const bool neg_small = static_cast<double>(ctx.last_neg_count) < third;
  if (pos_small && neg_small)
    return ctx.last_neg_count < ctx.last_pos_count ? ProjectionMode::ApproxNegative : ProjectionMode::ApproxPositive;
  if (pos_small) return ProjectionMode::ApproxPositive;
  if (neg_small) return ProjectionMode::ApproxNegative;
  return ProjectionMode::ExactFull;
}

template <typename Scalar>
struct ProjectionOptions {
  int max_inner = 50;
  Index expand_by = 0;       // 0: max(ceil(0.05 n), 1)
  int perp_diagnostic_iters = 0;  // > 0 enables the perpendicular-term estimate
};

template <typename Scalar>
struct ApproxProjection {
  Matrix<Scalar> projected;
  Scalar error_bound = 0;
  bool fell_back = false;
  int inner_iterations = 0;
  Index ritz_count = 0;
  Scalar residual_frobenius = 0;
};

namespace detail {

template <typename Scalar>
void seed_from_exact(ProjectionContext<Scalar>& ctx, const ExactProjection<Scalar>& exact) {
  ctx.cold = false;
  ctx.last_pos_count = exact.pos_count;
  ctx.last_neg_count = exact.neg_count;
  ctx.mode = select_mode(ctx);
  ctx.warm.reset();
  const Index n = exact.eig.values.size();
  if (ctx.mode == ProjectionMode::ApproxPositive) {
    ctx.warm = LobpcgState<Scalar>{exact.eig.vectors.rightCols(exact.pos_count), Matrix<Scalar>(n, 0),
                                   SpectralSide::Positive};
  } else if (ctx.mode == ProjectionMode::ApproxNegative) {
    ctx.warm = LobpcgState<Scalar>{exact.eig.vectors.leftCols(exact.neg_count), Matrix<Scalar>(n, 0),
                                   SpectralSide::Negative};
  }
}

}  // namespace detail

/// Exact projection that also refreshes the context counts and warm start.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Matrix<Scalar> project_exact(const Eigen::MatrixBase<Derived>& a, ProjectionContext<Scalar>& ctx) {
  auto exact = project_exact(a);
  detail::seed_from_exact(ctx, exact);
  ctx.last_ritz_count = std::min(exact.pos_count, exact.neg_count);
  ctx.last_inner_iterations = 0;
  ctx.error_log.push_back(Scalar(0));
  return std::move(exact.projected);
}

/// Approximate projection in ctx.mode (ApproxPositive or ApproxNegative).
///
/// Positive side: V diag(lambda+) V^T from the positive Ritz pairs.
/// Negative side: A - V diag(lambda-) V^T from the negative Ritz pairs.
/// error_bound = sqrt(2 ||R||_F^2 + perp^2), where perp is zero unless the
/// diagnostic estimate is enabled. Falls back to the exact projection (zero
/// error) when LOBPCG does not converge within max_inner steps.
template <typename Derived, typename Scalar, typename Rng>
ApproxProjection<Scalar> project_approx(const Eigen::MatrixBase<Derived>& a, ProjectionContext<Scalar>& ctx,
                                        Scalar tol, const ProjectionOptions<Scalar>& options, Rng& rng) {
  const Index n = a.rows();
  if (ctx.n == 0) ctx.n = n;
  if (ctx.n != n) throw FormatError("project_approx: context dimension mismatch");
  if (ctx.mode == ProjectionMode::ExactFull) throw FormatError("project_approx: context is in exact mode");
  const SpectralSide side =
      ctx.mode == ProjectionMode::ApproxPositive ? SpectralSide::Positive : SpectralSide::Negative;

  // Seed block: previous one-sided vectors plus one random column, or a
  // cold random block.
  LobpcgState<Scalar> start;
  start.side = side;
  if (ctx.warm && ctx.warm->side == side && ctx.warm->x.rows() == n) {
    const Index w = std::min<Index>(ctx.warm->x.cols() + 1, n);
    start.x.resize(n, w);
    start.x.leftCols(w - 1) = ctx.warm->x.leftCols(w - 1);
    start.x.col(w - 1) = random_block<Scalar>(n, 1, rng).col(0);
    if (ctx.warm->delta_x.cols() == w) start.delta_x = ctx.warm->delta_x;
  } else {
    start.x = random_block<Scalar>(n, default_cold_width(n), rng);
  }
  start.x = orthonormalize(start.x).basis;

  LobpcgOptions<Scalar> lo;
  lo.tol = tol;
  lo.max_inner = options.max_inner;
  lo.expand_by = options.expand_by;
  auto run = lobpcg(a, std::move(start), lo, rng);

  ApproxProjection<Scalar> out;
  out.inner_iterations = run.iterations;
  ctx.last_inner_iterations = run.iterations;
  if (run.status == LobpcgStatus::NotConverged) {
    out.projected = project_exact(a, ctx);
    out.fell_back = true;
    ctx.last_fell_back = true;
    return out;
  }
  ctx.last_fell_back = false;

  const auto& ritz = run.ritz;
  const Matrix<Scalar>& v = ritz.vectors;
  if (side == SpectralSide::Positive) {
    out.projected = v * ritz.values.asDiagonal() * v.transpose();
  } else {
    out.projected = a - v * ritz.values.asDiagonal() * v.transpose();
  }
  out.projected = (Scalar(0.5) * (out.projected + out.projected.transpose())).eval();
  out.ritz_count = ritz.size();
  out.residual_frobenius = ritz.residual_norms.norm();

  Scalar perp = 0;
  if (options.perp_diagnostic_iters > 0) {
    if (side == SpectralSide::Positive) {
      perp = estimate_perp_term(a, ritz, options.perp_diagnostic_iters, rng);
    } else {
      Matrix<Scalar> neg = -a;
      perp = estimate_perp_term(neg, ritz, options.perp_diagnostic_iters, rng);
    }
  }
  ctx.last_perp_estimate = perp;
  out.error_bound = std::sqrt(Scalar(2) * out.residual_frobenius * out.residual_frobenius + perp * perp);

  ctx.cold = false;
  if (side == SpectralSide::Positive) {
    ctx.last_pos_count = ritz.size();
    ctx.last_neg_count = n - ritz.size();
  } else {
    ctx.last_neg_count = ritz.size();
    ctx.last_pos_count = n - ritz.size();
  }
  ctx.last_ritz_count = ritz.size();
  ctx.mode = select_mode(ctx);
  if (ctx.mode == ProjectionMode::ExactFull)
    ctx.warm.reset();
  else
    ctx.warm = LobpcgState<Scalar>{ritz.vectors, run.state.delta_x, side};
  ctx.error_log.push_back(out.error_bound);
  return out;
}

template <typename Scalar>
struct ContextProjection {
  Matrix<Scalar> projected;
  Scalar error_bound = 0;
  ProjectionMode mode = ProjectionMode::ExactFull;
};

/// One projection driven by the context: pick the mode, project, update.
/// The returned mode is the one used for this call.
template <typename Derived, typename Scalar, typename Rng>
ContextProjection<Scalar> project_with_context(const Eigen::MatrixBase<Derived>& a, ProjectionContext<Scalar>& ctx,
                                               bool allow_approx, Scalar tol,
                                               const ProjectionOptions<Scalar>& options, Rng& rng) {
  if (ctx.n == 0) ctx.n = a.rows();
  ContextProjection<Scalar> out;
  out.mode = allow_approx ? select_mode(ctx) : ProjectionMode::ExactFull;
  ctx.mode = out.mode;
  if (out.mode == ProjectionMode::ExactFull) {
    out.projected = project_exact(a, ctx);
    if (!allow_approx) {
      ctx.mode = ProjectionMode::ExactFull;
      ctx.warm.reset();
    }
    return out;
  }
  auto approx = project_approx(a, ctx, tol, options, rng);
  out.projected = std::move(approx.projected);
  out.error_bound = approx.error_bound;
  return out;
}

}  // namespace asdp
