#pragma once

// Rayleigh-Ritz and a LOBPCG variant that returns every eigenpair on one
// side of zero, growing its block with random columns when needed.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "asdp/linalg.hpp"

namespace asdp {

enum class SpectralSide { Positive, Negative };

template <typename Scalar>
struct RitzSet {
  Vector<Scalar> values;          // ascending
  Matrix<Scalar> vectors;         // orthonormal, one column per value
  Vector<Scalar> residual_norms;  // ||A v_i - lambda_i v_i||_2

  Index size() const { return values.size(); }

  static RitzSet empty(Index n) {
    return {Vector<Scalar>(0), Matrix<Scalar>(n, 0), Vector<Scalar>(0)};
  }
};

template <typename Scalar>
struct LobpcgState {
  Matrix<Scalar> x;        // current block, orthonormal columns
  Matrix<Scalar> delta_x;  // previous search direction; 0 or width() columns
  SpectralSide side = SpectralSide::Positive;

  Index width() const { return x.cols(); }
};

enum class LobpcgStatus { Converged, NotConverged };

template <typename Scalar>
struct LobpcgOptions {
  Scalar tol = Scalar(1e-6);
  int max_inner = 50;
  Index expand_by = 0;  // 0: max(ceil(0.05 n), 1)
  int min_inner = 1;
};

template <typename Scalar>
struct LobpcgResult {
  RitzSet<Scalar> ritz;  // one-sided pairs of the original (unnegated) matrix
  LobpcgState<Scalar> state;
  LobpcgStatus status = LobpcgStatus::NotConverged;
  int iterations = 0;
  int expansions = 0;
  std::vector<Scalar> largest_ritz_trace;  // max Ritz value of the signed operator, per step
};

inline Index default_expand_by(Index n) { return std::max<Index>(static_cast<Index>(std::ceil(0.05 * n)), 1); }
inline Index default_cold_width(Index n) { return std::max<Index>(static_cast<Index>(std::ceil(0.1 * n)), 1); }

template <typename Scalar, typename Rng>
Matrix<Scalar> random_block(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix<Scalar> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = static_cast<Scalar>(normal(rng));
  return m;
}

/// Column 2-norms of A V - V diag(values).
template <typename Derived, typename Scalar>
Vector<Scalar> residual_norms(const Eigen::MatrixBase<Derived>& a, const Vector<Scalar>& values,
                              const Matrix<Scalar>& vectors) {
  if (vectors.rows() != a.rows() || vectors.cols() != values.size())
    throw FormatError("residual_norms: shape mismatch");
  Matrix<Scalar> r = a * vectors - vectors * values.asDiagonal();
  return r.colwise().norm().transpose();
}

template <typename Derived, typename Scalar>
Vector<Scalar> residual_norms(const Eigen::MatrixBase<Derived>& a, const RitzSet<Scalar>& ritz) {
  return residual_norms(a, ritz.values, ritz.vectors);
}

namespace detail {

// Ritz pairs of `op` on an orthonormal basis, given op * basis.
template <typename Scalar>
EigPairs<Scalar> ritz_on_basis(const Matrix<Scalar>& basis, const Matrix<Scalar>& op_basis) {
  Matrix<Scalar> h = basis.transpose() * op_basis;
  h = (Scalar(0.5) * (h + h.transpose())).eval();
  return full_symmetric_eig(h);
}

}  // namespace detail

/// Rayleigh-Ritz of `a` on span(s). Throws SubspaceDegenerateError when s is
/// rank deficient even for the Householder fallback.
template <typename Derived, typename Scalar = typename Derived::Scalar>
RitzSet<Scalar> rayleigh_ritz(const Eigen::MatrixBase<Derived>& a, const Matrix<Scalar>& s) {
  if (s.rows() != a.rows() || s.cols() < 1 || s.cols() > s.rows())
    throw FormatError("rayleigh_ritz: trial block must be n x p with 1 <= p <= n");
  auto ortho = orthonormalize(s);
  if (ortho.rank_deficient) throw SubspaceDegenerateError("rayleigh_ritz: trial subspace is rank deficient");
  Matrix<Scalar> a_basis = a * ortho.basis;
  auto pairs = detail::ritz_on_basis<Scalar>(ortho.basis, a_basis);
  RitzSet<Scalar> out;
  out.values = pairs.values;
  out.vectors = ortho.basis * pairs.vectors;
  Matrix<Scalar> r = a_basis * pairs.vectors - out.vectors * out.values.asDiagonal();
  out.residual_norms = r.colwise().norm().transpose();
  return out;
}

/// LOBPCG for all eigenpairs of `a` on `state.side` of zero.
///
/// The negative side is computed as the positive side of -a. Each step runs
/// Rayleigh-Ritz on span(X, R, dX) and keeps the `width` largest pairs. dX
/// is the component of the new block outside span(X), which spans the same
/// subspace as X_new - X_old once X is included. The block grows by
/// `expand_by` random columns whenever Rayleigh-Ritz sees more positive
/// values than the block width, or when a converged block is saturated
/// (holds no non-positive value). Convergence: every positive pair in the
/// block has residual <= tol, the block is not saturated, and the largest
/// non-positive pair also has residual <= tol. Without that guard a block
/// whose Ritz values are all non-positive would stop at once.
template <typename Derived, typename Scalar, typename Rng>
LobpcgResult<Scalar> lobpcg(const Eigen::MatrixBase<Derived>& a, LobpcgState<Scalar> state,
                            const LobpcgOptions<Scalar>& options, Rng& rng) {
  static_assert(std::is_same_v<Scalar, typename Derived::Scalar>);
  const Index n = a.rows();
  if (a.cols() != n) throw FormatError("lobpcg: matrix is not square");
  if (!(options.tol > Scalar(0))) throw FormatError("lobpcg: tolerance must be positive");
  if (!a.allFinite()) throw NumericError("lobpcg: non-finite input");

  const Scalar sign = state.side == SpectralSide::Positive ? Scalar(1) : Scalar(-1);
  const Index expand_by = options.expand_by > 0 ? options.expand_by : default_expand_by(n);
  const Scalar scale = std::max(a.norm(), Scalar(1));
  auto apply = [&](const Matrix<Scalar>& v) -> Matrix<Scalar> { return sign * (a * v); };

  LobpcgResult<Scalar> result;

  Matrix<Scalar> x = state.x;
  if (x.rows() != n) throw FormatError("lobpcg: block has the wrong number of rows");
  if (x.cols() == 0) x = random_block<Scalar>(n, 1, rng);
  if (x.cols() > n) x = x.leftCols(n).eval();
  if (orthonormality_error(x) > Scalar(1e-6)) {
    auto ortho = orthonormalize(x);
    x = std::move(ortho.basis);
  }

  // Rayleigh-Ritz on the initial block.
  Matrix<Scalar> ax = apply(x);
  Vector<Scalar> lambda;
  {
    auto pairs = detail::ritz_on_basis<Scalar>(x, ax);
    x = (x * pairs.vectors).eval();
    ax = (ax * pairs.vectors).eval();
    lambda = pairs.values;
    result.largest_ritz_trace.push_back(lambda(lambda.size() - 1));
  }
  // A carried search direction is only usable when its width matches.
  Matrix<Scalar> p = state.delta_x.cols() == x.cols() && state.delta_x.rows() == n ? state.delta_x
                                                                                  : Matrix<Scalar>(n, 0);
  {
    auto expand = [&](Vector<Scalar>& lam) {
      const Index extra = std::min(expand_by, n - x.cols());
      if (extra <= 0) return false;
      Matrix<Scalar> z = random_block<Scalar>(n, extra, rng);
      z -= x * (x.transpose() * z);
      z -= x * (x.transpose() * z);
      Matrix<Scalar> basis(n, x.cols() + extra);
      Matrix<Scalar> a_basis(n, x.cols() + extra);
      if (auto qz = cholesky_qr(z)) {
        basis << x, *qz;
        a_basis << ax, apply(*qz);
      } else {
        Matrix<Scalar> joined(n, x.cols() + extra);
        joined << x, z;
        basis = householder_orthonormalize(joined).basis;
        a_basis = apply(basis);
      }
      auto pairs2 = detail::ritz_on_basis<Scalar>(basis, a_basis);
      x = basis * pairs2.vectors;
      ax = a_basis * pairs2.vectors;
      lam = pairs2.values;
      p.resize(n, 0);
      ++result.expansions;
      return true;
    };

    int iter = 0;
    for (;;) {
      const Index m = x.cols();
      Matrix<Scalar> r = ax - x * lambda.asDiagonal();
      Vector<Scalar> res = r.colwise().norm().transpose();
      bool residuals_ok = true;
      Index guard = -1;
      for (Index i = 0; i < m; ++i) {
        if (lambda(i) > Scalar(0) && res(i) > options.tol) residuals_ok = false;
        if (lambda(i) <= Scalar(0)) guard = i;
      }
      if (guard >= 0 && res(guard) > options.tol) residuals_ok = false;
      const bool saturated = m < n && lambda.minCoeff() > Scalar(0);

      if (iter >= options.min_inner && residuals_ok && !saturated) {
        result.status = LobpcgStatus::Converged;
        break;
      }
      if (iter >= options.max_inner) {
        result.status = LobpcgStatus::NotConverged;
        break;
      }
      ++iter;
      if (iter > options.min_inner && residuals_ok && saturated) {
        if (expand(lambda)) {
          result.largest_ritz_trace.push_back(lambda(lambda.size() - 1));
          continue;
        }
      }

      // Search directions: residuals and the previous step, orthogonalized
      // against X and normalized column by column.
      Matrix<Scalar> w(n, r.cols() + p.cols());
      w << r, p;
      w -= x * (x.transpose() * w);
      w -= x * (x.transpose() * w);
      std::vector<Index> keep;
      for (Index j = 0; j < w.cols(); ++j) {
        const Scalar norm = w.col(j).norm();
        if (norm > Scalar(1e-13) * scale) {
          w.col(j) /= norm;
          keep.push_back(j);
        }
      }
      Matrix<Scalar> basis, a_basis;
      const Index wcols = static_cast<Index>(keep.size());
      if (m + wcols >= n) {
        basis = Matrix<Scalar>::Identity(n, n);
        a_basis = sign * a;
      } else if (wcols == 0) {
        basis = x;
        a_basis = ax;
      } else {
        Matrix<Scalar> wk(n, wcols);
        for (Index j = 0; j < wcols; ++j) wk.col(j) = w.col(keep[static_cast<size_t>(j)]);
        // Cholesky QR twice, re-projecting against X in between.
        auto qw = cholesky_qr(wk);
        if (qw) {
          *qw -= x * (x.transpose() * *qw);
          qw = cholesky_qr(*qw);
        }
        if (qw && (x.transpose() * *qw).norm() <= Scalar(1e-12)) {
          basis.resize(n, m + wcols);
          basis << x, *qw;
          a_basis.resize(n, m + wcols);
          a_basis << ax, apply(*qw);
        } else {
          Matrix<Scalar> joined(n, m + wcols);
          joined << x, wk;
          basis = householder_orthonormalize(joined).basis;
          if (!basis.allFinite()) throw SubspaceDegenerateError("lobpcg: orthonormalization failed");
          a_basis = apply(basis);
        }
      }

      auto pairs = detail::ritz_on_basis<Scalar>(basis, a_basis);
      const Index total = pairs.values.size();
      const Index positive_in_rr = (pairs.values.array() > Scalar(0)).count();
      const Index keep_m = std::min(m, total);
      Matrix<Scalar> coeff = pairs.vectors.rightCols(keep_m);
      Matrix<Scalar> x_new = basis * coeff;
      Matrix<Scalar> ax_new = a_basis * coeff;
      if (basis.cols() > m && basis.cols() < n) {
        p = basis.rightCols(basis.cols() - m) * coeff.bottomRows(basis.cols() - m);
      } else {
        p.resize(n, 0);
      }
      x = std::move(x_new);
      ax = std::move(ax_new);
      lambda = pairs.values.tail(keep_m);
      result.largest_ritz_trace.push_back(lambda(keep_m - 1));

      if (positive_in_rr > m) expand(lambda);
    }
    result.iterations = iter;

    // Collect the one-sided pairs.
    Matrix<Scalar> r = ax - x * lambda.asDiagonal();
    Vector<Scalar> res = r.colwise().norm().transpose();
    std::vector<Index> pos;
    for (Index i = 0; i < lambda.size(); ++i)
      if (lambda(i) > Scalar(0)) pos.push_back(i);
    const Index k = static_cast<Index>(pos.size());
    RitzSet<Scalar> ritz{Vector<Scalar>(k), Matrix<Scalar>(n, k), Vector<Scalar>(k)};
    for (Index j = 0; j < k; ++j) {
      // ascending order in the original matrix
      const Index src = sign > 0 ? pos[static_cast<size_t>(j)] : pos[static_cast<size_t>(k - 1 - j)];
      ritz.values(j) = sign * lambda(src);
      ritz.vectors.col(j) = x.col(src);
      ritz.residual_norms(j) = res(src);
    }
    result.ritz = std::move(ritz);
    result.state.x = std::move(x);
    result.state.delta_x = p.cols() == result.state.x.cols() ? p : Matrix<Scalar>(n, 0);
    result.state.side = state.side;
  }
  return result;
}

/// Estimate of lambda_max((I - VV^T) A (I - VV^T)) clamped at zero, from a
/// Krylov subspace of dimension `iters` (fully reorthogonalized Lanczos)
/// started in the complement of V. Diagnostic only.
template <typename Derived, typename Scalar, typename Rng>
Scalar estimate_perp_term(const Eigen::MatrixBase<Derived>& a, const RitzSet<Scalar>& ritz, int iters, Rng& rng) {
  const Index n = a.rows();
  const Matrix<Scalar>& v = ritz.vectors;
  const Index room = n - v.cols();
  const Index dim = std::min<Index>(std::max(iters, 1), room);
  if (dim <= 0) return Scalar(0);
  auto deflate = [&](Vector<Scalar> u) {
    if (v.cols() > 0) {
      u -= v * (v.transpose() * u);
      u -= v * (v.transpose() * u);
    }
    return u;
  };
  Matrix<Scalar> basis(n, dim);
  Vector<Scalar> u = deflate(random_block<Scalar>(n, 1, rng).col(0));
  Index built = 0;
  const Scalar floor = Scalar(1e-12) * std::max(a.norm(), Scalar(1));
  while (built < dim) {
    for (int pass = 0; pass < 2 && built > 0; ++pass) u -= basis.leftCols(built) * (basis.leftCols(built).transpose() * u);
    const Scalar nu = u.norm();
    if (!(nu > floor)) break;
    basis.col(built++) = u / nu;
    u = deflate(a * basis.col(built - 1));
  }
  if (built == 0) return Scalar(0);
  const Matrix<Scalar> q = basis.leftCols(built);
  Matrix<Scalar> h = q.transpose() * (a * q);
  h = (Scalar(0.5) * (h + h.transpose())).eval();
  return std::max(full_symmetric_eig(h).values.maxCoeff(), Scalar(0));
}

}  // namespace asdp
