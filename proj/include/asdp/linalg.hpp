#pragma once

// Dense symmetric kernels: vectorization, eigendecomposition, Cholesky-QR
// and the quasidefinite LDL factorization used for the KKT system.

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "asdp/errors.hpp"

namespace asdp {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;

constexpr Index triangular_size(Index n) { return n * (n + 1) / 2; }

/// Inverse of triangular_size, or nullopt when `len` is not a triangular number.
inline std::optional<Index> triangular_root(Index len) {
  if (len < 0) return std::nullopt;
  auto n = static_cast<Index>(std::floor((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0));
  while (triangular_size(n) < len) ++n;
  while (n > 0 && triangular_size(n) > len) --n;
  if (triangular_size(n) != len) return std::nullopt;
  return n;
}

/// Position of (i, j), i <= j, in column-major upper-triangle storage.
constexpr Index packed_index(Index i, Index j) { return j * (j + 1) / 2 + i; }

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

/// Symmetric matrix held as its upper triangle, column-major.
template <typename Scalar>
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index n) : n_(n), entries_(Vector<Scalar>::Zero(triangular_size(n))) {}

  /// Symmetrizes `m` as (m + m^T)/2 before packing.
  template <typename Derived>
  static SymMatrix from_dense(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) throw FormatError("SymMatrix::from_dense: matrix is not square");
    SymMatrix out(m.rows());
    for (Index j = 0; j < out.n_; ++j)
      for (Index i = 0; i <= j; ++i)
        out.entries_(packed_index(i, j)) = Scalar(0.5) * (m(i, j) + m(j, i));
    return out;
  }

  static SymMatrix from_packed(Vector<Scalar> entries) {
    auto n = triangular_root(entries.size());
    if (!n) throw FormatError("packed length " + std::to_string(entries.size()) + " is not triangular");
    SymMatrix out;
    out.n_ = *n;
    out.entries_ = std::move(entries);
    return out;
  }

  Index dim() const { return n_; }
  const Vector<Scalar>& packed() const { return entries_; }

  Scalar operator()(Index i, Index j) const {
    return i <= j ? entries_(packed_index(i, j)) : entries_(packed_index(j, i));
  }
  Scalar& upper(Index i, Index j) { return entries_(packed_index(i, j)); }

  Matrix<Scalar> dense() const {
    Matrix<Scalar> m(n_, n_);
    for (Index j = 0; j < n_; ++j)
      for (Index i = 0; i <= j; ++i) m(i, j) = m(j, i) = entries_(packed_index(i, j));
    return m;
  }

 private:
  Index n_ = 0;
  Vector<Scalar> entries_;
};

namespace detail {
template <typename Scalar>
inline const Scalar kSqrt2 = std::sqrt(Scalar(2));
}

/// Isometric vectorization of a dense symmetric matrix (upper triangle,
/// off-diagonals scaled by sqrt(2)).
template <typename Derived>
Vector<typename Derived::Scalar> svec(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Index n = m.rows();
  Vector<Scalar> v(triangular_size(n));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) v(packed_index(i, j)) = detail::kSqrt2<Scalar> * m(i, j);
    v(packed_index(j, j)) = m(j, j);
  }
  return v;
}

template <typename Scalar>
Vector<Scalar> svec(const SymMatrix<Scalar>& m) {
  Vector<Scalar> v = m.packed();
  for (Index j = 0; j < m.dim(); ++j)
    for (Index i = 0; i < j; ++i) v(packed_index(i, j)) *= detail::kSqrt2<Scalar>;
  return v;
}

/// Inverse of svec. Throws FormatError on a non-triangular length.
template <typename Derived>
SymMatrix<typename Derived::Scalar> smat(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  auto n = triangular_root(v.size());
  if (!n) throw FormatError("smat: length " + std::to_string(v.size()) + " is not a triangular number");
  Vector<Scalar> packed = v;
  const Scalar inv = Scalar(1) / detail::kSqrt2<Scalar>;
  for (Index j = 0; j < *n; ++j)
    for (Index i = 0; i < j; ++i) packed(packed_index(i, j)) *= inv;
  return SymMatrix<Scalar>::from_packed(std::move(packed));
}

/// smat straight to a dense matrix, skipping the packed intermediate.
template <typename Derived>
Matrix<typename Derived::Scalar> smat_dense(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  auto n = triangular_root(v.size());
  if (!n) throw FormatError("smat: length " + std::to_string(v.size()) + " is not a triangular number");
  const Scalar inv = Scalar(1) / detail::kSqrt2<Scalar>;
  Matrix<Scalar> m(*n, *n);
  for (Index j = 0; j < *n; ++j) {
    for (Index i = 0; i < j; ++i) m(i, j) = m(j, i) = inv * v(packed_index(i, j));
    m(j, j) = v(packed_index(j, j));
  }
  return m;
}

template <typename Scalar>
struct EigPairs {
  Vector<Scalar> values;   // ascending
  Matrix<Scalar> vectors;  // orthonormal columns
};

/// Complete eigendecomposition (Householder tridiagonalization + implicit QR).
template <typename Derived>
EigPairs<typename Derived::Scalar> full_symmetric_eig(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw FormatError("full_symmetric_eig: matrix is not square");
  if (!a.allFinite()) throw NumericError("full_symmetric_eig: non-finite input");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(a.derived(), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericError("full_symmetric_eig: QR iteration failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

template <typename Scalar>
EigPairs<Scalar> full_symmetric_eig(const SymMatrix<Scalar>& a) {
  return full_symmetric_eig(a.dense());
}

template <typename Derived>
typename Derived::Scalar orthonormality_error(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  return (q.transpose() * q - Matrix<Scalar>::Identity(q.cols(), q.cols())).norm();
}

namespace detail {

// Upper factor R with R^T R = G. Fails when a pivot drops to
// 1e-12 * max diag(G) or below.
template <typename Scalar>
bool gram_cholesky(const Matrix<Scalar>& g, Matrix<Scalar>& r) {
  const Index p = g.rows();
  r.setZero(p, p);
  const Scalar threshold = Scalar(1e-12) * std::max(g.diagonal().maxCoeff(), Scalar(0));
  if (!(threshold > Scalar(0))) return p == 0;
  for (Index j = 0; j < p; ++j) {
    Scalar d = g(j, j) - r.col(j).head(j).squaredNorm();
    if (!(d > threshold)) return false;
    r(j, j) = std::sqrt(d);
    for (Index k = j + 1; k < p; ++k)
      r(j, k) = (g(j, k) - r.col(j).head(j).dot(r.col(k).head(j))) / r(j, j);
  }
  return true;
}

template <typename Scalar>
std::optional<Matrix<Scalar>> cholesky_qr_pass(const Matrix<Scalar>& s) {
  Matrix<Scalar> gram = s.transpose() * s;
  Matrix<Scalar> r;
  if (!gram_cholesky(gram, r)) return std::nullopt;
  Matrix<Scalar> q = r.template triangularView<Eigen::Upper>().template solve<Eigen::OnTheRight>(s);
  return q;
}

}  // namespace detail

/// Orthonormal basis of span(s) through the Cholesky factor of s^T s.
/// Returns nullopt (rank-deficiency signal) when the Gram matrix is not
/// numerically positive definite or when the result is not orthonormal to
/// 1e-8; a second pass is made when one pass loses orthogonality.
template <typename Derived>
std::optional<Matrix<typename Derived::Scalar>> cholesky_qr(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if (s.cols() > s.rows()) throw FormatError("cholesky_qr: more columns than rows");
  if (s.cols() == 0) return Matrix<Scalar>(s.rows(), 0);
  auto q = detail::cholesky_qr_pass<Scalar>(s.eval());
  if (!q) return std::nullopt;
  if (orthonormality_error(*q) > Scalar(1e-8)) {
    q = detail::cholesky_qr_pass<Scalar>(*q);
    if (!q || orthonormality_error(*q) > Scalar(1e-8)) return std::nullopt;
  }
  return q;
}

template <typename Scalar>
struct Orthonormalized {
  Matrix<Scalar> basis;
  bool used_householder = false;
  bool rank_deficient = false;
};

/// Thin Q of a Householder QR. When s is rank deficient the extra columns are
/// arbitrary orthonormal directions; `rank_deficient` reports that case.
template <typename Derived>
Orthonormalized<typename Derived::Scalar> householder_orthonormalize(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  const Index n = s.rows(), p = s.cols();
  Eigen::HouseholderQR<Matrix<Scalar>> qr(s.eval());
  Orthonormalized<Scalar> out;
  out.basis = qr.householderQ() * Matrix<Scalar>::Identity(n, p);
  out.used_householder = true;
  if (p > 0) {
    Vector<Scalar> diag = qr.matrixQR().diagonal().head(std::min(n, p)).cwiseAbs();
    const Scalar top = diag.maxCoeff();
    out.rank_deficient = !(top > Scalar(0)) || (diag.array() <= Scalar(1e-12) * top).any();
  }
  return out;
}

/// Cholesky-QR with the Householder fallback.
template <typename Derived>
Orthonormalized<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived>& s) {
  if (auto q = cholesky_qr(s)) return {std::move(*q), false, false};
  return householder_orthonormalize(s);
}

/// LDL^T factor of a symmetric quasidefinite matrix under a fill-reducing
/// symmetric permutation: P Q P^T = L D L^T. The diagonal must have exactly
/// `num_positive` positive and `num_negative` negative entries.
template <typename Scalar>
class QuasidefFactor {
 public:
  using Sparse = SparseMatrix<Scalar>;
  using Solver = Eigen::SimplicialLDLT<Sparse, Eigen::Lower, Eigen::AMDOrdering<int>>;
  using Permutation = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;

  QuasidefFactor(const Sparse& q, Index num_positive, Index num_negative)
      : matrix_(q), positive_(num_positive), negative_(num_negative), solver_(std::make_shared<Solver>()) {
    if (q.rows() != q.cols()) throw FormatError("ldl_factorize: matrix is not square");
    if (num_positive + num_negative != q.rows())
      throw FormatError("ldl_factorize: inertia does not add up to the dimension");
    solver_->compute(matrix_);
    if (solver_->info() != Eigen::Success) throw FactorizationError("ldl_factorize: zero pivot encountered");
    const Vector<Scalar> d = solver_->vectorD();
    const Scalar scale = d.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale)) throw FactorizationError("ldl_factorize: non-finite pivot");
    if ((d.cwiseAbs().array() <= Scalar(1e-24) * scale).any())
      throw FactorizationError("ldl_factorize: pivot below quasidefinite tolerance (check sigma, rho)");
    const Index pos = (d.array() > Scalar(0)).count();
    if (pos != positive_ || d.size() - pos != negative_)
      throw FactorizationError("ldl_factorize: inertia (" + std::to_string(pos) + ", " +
                               std::to_string(d.size() - pos) + ") differs from the expected (" +
                               std::to_string(positive_) + ", " + std::to_string(negative_) + ")");
  }

  Index dim() const { return matrix_.rows(); }
  Index positive_count() const { return positive_; }
  Index negative_count() const { return negative_; }
  const Sparse& matrix() const { return matrix_; }
  const Permutation& permutation() const { return solver_->permutationP(); }
  Sparse factor_l() const { return Sparse(solver_->matrixL()); }
  Vector<Scalar> diagonal() const { return solver_->vectorD(); }

  /// Solve with up to two steps of iterative refinement.
  template <typename Derived>
  Vector<Scalar> solve(const Eigen::MatrixBase<Derived>& b) const {
    if (b.size() != dim()) throw FormatError("ldl_solve: right-hand side has the wrong length");
    Vector<Scalar> x = solver_->solve(b.derived());
    const Scalar target = Scalar(1e-13) * (Scalar(1) + b.norm());
    for (int step = 0; step < 2; ++step) {
      Vector<Scalar> r = b - matrix_.template selfadjointView<Eigen::Lower>() * x;
      if (r.norm() <= target) break;
      x += solver_->solve(r);
    }
    return x;
  }

 private:
  Sparse matrix_;
  Index positive_;
  Index negative_;
  std::shared_ptr<Solver> solver_;
};

template <typename Scalar>
QuasidefFactor<Scalar> ldl_factorize(const SparseMatrix<Scalar>& q, Index num_positive, Index num_negative) {
  return QuasidefFactor<Scalar>(q, num_positive, num_negative);
}

template <typename Scalar, typename Derived>
Vector<Scalar> ldl_solve(const QuasidefFactor<Scalar>& factor, const Eigen::MatrixBase<Derived>& b) {
  return factor.solve(b);
}

}  // namespace asdp
