#pragma once

// Products of translated Zero, Nonnegative and PSD (packed triangle) cones.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "asdp/errors.hpp"
#include "asdp/linalg.hpp"
#include "asdp/psd_projection.hpp"

namespace asdp {

enum class ConeKind { Zero, Nonnegative, PsdTriangle };

inline const char* to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::Zero: return "zero";
    case ConeKind::Nonnegative: return "nonnegative";
    case ConeKind::PsdTriangle: return "psd";
  }
  return "?";
}

template <typename Scalar>
struct ConeBlock {
  ConeKind kind = ConeKind::Zero;
  Index offset = 0;
  Index dim = 0;
  Index matrix_dim = 0;  // PsdTriangle only
  Vector<Scalar> b;
};

template <typename Scalar>
class ConeSet {
 public:
  ConeSet& add_zero(const Vector<Scalar>& b) { return push(ConeKind::Zero, b.size(), 0, b); }
  ConeSet& add_zero(Index dim) { return add_zero(Vector<Scalar>::Zero(dim)); }

  ConeSet& add_nonnegative(const Vector<Scalar>& b) { return push(ConeKind::Nonnegative, b.size(), 0, b); }
  ConeSet& add_nonnegative(Index dim) { return add_nonnegative(Vector<Scalar>::Zero(dim)); }

  ConeSet& add_psd(Index n, const Vector<Scalar>& b) {
    if (n < 1) throw FormatError("psd block dimension must be positive");
    if (b.size() != triangular_size(n)) throw FormatError("psd block translation has wrong length");
    return push(ConeKind::PsdTriangle, b.size(), n, b);
  }
  ConeSet& add_psd(Index n) { return add_psd(n, Vector<Scalar>::Zero(triangular_size(n))); }

  const std::vector<ConeBlock<Scalar>>& blocks() const { return blocks_; }
  Index total_dim() const { return total_dim_; }
  Index psd_block_count() const {
    Index c = 0;
    for (const auto& blk : blocks_) c += blk.kind == ConeKind::PsdTriangle;
    return c;
  }

  /// Concatenated translation vector b.
  Vector<Scalar> translation() const {
    Vector<Scalar> b(total_dim_);
    for (const auto& blk : blocks_) b.segment(blk.offset, blk.dim) = blk.b;
    return b;
  }

  void check_length(Index len, const char* what) const {
    if (len != total_dim_)
      throw FormatError(std::string(what) + ": vector length " + std::to_string(len) + " does not match cone dimension " +
                        std::to_string(total_dim_));
  }

 private:
  ConeSet& push(ConeKind kind, Index dim, Index n, const Vector<Scalar>& b) {
    if (!b.allFinite()) throw FormatError("cone translation is not finite");
    blocks_.push_back(ConeBlock<Scalar>{kind, total_dim_, dim, n, b});
    total_dim_ += dim;
    return *this;
  }

  std::vector<ConeBlock<Scalar>> blocks_;
  Index total_dim_ = 0;
};

namespace detail {

template <typename Scalar, typename Derived>
Matrix<Scalar> symmetric_block(const Eigen::MatrixBase<Derived>& packed) {
  Matrix<Scalar> m = smat_dense(Vector<Scalar>(packed));
  return Scalar(0.5) * (m + m.transpose());
}

}  // namespace detail

template <typename Scalar>
struct ConeProjection {
  Vector<Scalar> projected;
  Scalar error_bound = 0;
  std::vector<ProjectionMode> modes;  // mode used per PSD block
};

/// Projection onto C. contexts holds one entry per PSD block, in block order;
/// pass allow_approx = false to force exact eigendecompositions.
template <typename Scalar, typename Rng>
ConeProjection<Scalar> project(const ConeSet<Scalar>& cs, const Vector<Scalar>& v,
                               std::vector<ProjectionContext<Scalar>>& contexts, bool allow_approx, Scalar tol,
                               const ProjectionOptions<Scalar>& options, Rng& rng) {
  cs.check_length(v.size(), "project");
  if (static_cast<Index>(contexts.size()) != cs.psd_block_count()) {
    contexts.clear();
    for (const auto& blk : cs.blocks())
      if (blk.kind == ConeKind::PsdTriangle) contexts.emplace_back(blk.matrix_dim);
  }
  ConeProjection<Scalar> out;
  out.projected.resize(v.size());
  Scalar err_sq = 0;
  std::size_t psd_index = 0;
  for (const auto& blk : cs.blocks()) {
    auto seg = v.segment(blk.offset, blk.dim);
    auto dst = out.projected.segment(blk.offset, blk.dim);
    switch (blk.kind) {
      case ConeKind::Zero:
        dst = blk.b;
        break;
      case ConeKind::Nonnegative:
        dst = blk.b + (seg - blk.b).cwiseMax(Scalar(0));
        break;
      case ConeKind::PsdTriangle: {
        Matrix<Scalar> m = detail::symmetric_block<Scalar>(seg - blk.b);
        auto res = project_with_context(m, contexts[psd_index++], allow_approx, tol, options, rng);
        dst = blk.b + svec(res.projected);
        err_sq += res.error_bound * res.error_bound;
        out.modes.push_back(res.mode);
        break;
      }
    }
  }
  out.error_bound = std::sqrt(err_sq);
  return out;
}

/// Exact projection onto C without any warm-start bookkeeping.
template <typename Scalar>
Vector<Scalar> project_exact(const ConeSet<Scalar>& cs, const Vector<Scalar>& v) {
  cs.check_length(v.size(), "project_exact");
  Vector<Scalar> out(v.size());
  for (const auto& blk : cs.blocks()) {
    auto seg = v.segment(blk.offset, blk.dim);
    switch (blk.kind) {
      case ConeKind::Zero: out.segment(blk.offset, blk.dim) = blk.b; break;
      case ConeKind::Nonnegative: out.segment(blk.offset, blk.dim) = blk.b + (seg - blk.b).cwiseMax(Scalar(0)); break;
      case ConeKind::PsdTriangle:
        out.segment(blk.offset, blk.dim) =
            blk.b + svec(project_exact(detail::symmetric_block<Scalar>(seg - blk.b)).projected);
        break;
    }
  }
  return out;
}

/// Projection onto the recession cone (translations dropped).
template <typename Scalar>
Vector<Scalar> project_recession(const ConeSet<Scalar>& cs, const Vector<Scalar>& v) {
  cs.check_length(v.size(), "project_recession");
  Vector<Scalar> out(v.size());
  for (const auto& blk : cs.blocks()) {
    auto seg = v.segment(blk.offset, blk.dim);
    auto dst = out.segment(blk.offset, blk.dim);
    switch (blk.kind) {
      case ConeKind::Zero: dst.setZero(); break;
      case ConeKind::Nonnegative: dst = seg.cwiseMax(Scalar(0)); break;
      case ConeKind::PsdTriangle: dst = svec(project_exact(detail::symmetric_block<Scalar>(seg)).projected); break;
    }
  }
  return out;
}

/// Projection onto the polar of the recession cone.
template <typename Scalar>
Vector<Scalar> project_polar(const ConeSet<Scalar>& cs, const Vector<Scalar>& y) {
  cs.check_length(y.size(), "project_polar");
  Vector<Scalar> out(y.size());
  for (const auto& blk : cs.blocks()) {
    auto seg = y.segment(blk.offset, blk.dim);
    auto dst = out.segment(blk.offset, blk.dim);
    switch (blk.kind) {
      case ConeKind::Zero: dst = seg; break;
      case ConeKind::Nonnegative: dst = seg.cwiseMin(Scalar(0)); break;
      case ConeKind::PsdTriangle: {
        Matrix<Scalar> m = detail::symmetric_block<Scalar>(seg);
        dst = svec(m - project_exact(m).projected);
        break;
      }
    }
  }
  return out;
}

template <typename Scalar>
Scalar dist_recession(const ConeSet<Scalar>& cs, const Vector<Scalar>& v) {
  return (v - project_recession(cs, v)).norm();
}

template <typename Scalar>
Scalar dist_polar(const ConeSet<Scalar>& cs, const Vector<Scalar>& y) {
  return (y - project_polar(cs, y)).norm();
}

/// Support function of C at y: b^T y when y lies in the polar cone (to 1e-9),
/// std::nullopt standing for +infinity otherwise.
template <typename Scalar>
std::optional<Scalar> support_value(const ConeSet<Scalar>& cs, const Vector<Scalar>& y) {
  if (dist_polar(cs, y) > Scalar(1e-9)) return std::nullopt;
  return cs.translation().dot(y);
}

template <typename Derived>
bool membership_psd(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar shift) {
  using Scalar = typename Derived::Scalar;
  if (shift < Scalar(0)) throw FormatError("membership_psd: shift must be nonnegative");
  Matrix<Scalar> s = Scalar(0.5) * (m + m.transpose());
  s.diagonal().array() += shift;
  Eigen::LLT<Matrix<Scalar>> llt(s);
  return llt.info() == Eigen::Success;
}

template <typename Scalar>
bool membership_psd(const SymMatrix<Scalar>& m, Scalar shift) {
  return membership_psd(m.dense(), shift);
}

}  // namespace asdp
