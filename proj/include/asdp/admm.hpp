#pragma once

// Inexact ADMM for  minimize 1/2 x'Px + q'x  subject to  Ax = z, z in C.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "asdp/cones.hpp"
#include "asdp/errors.hpp"
#include "asdp/linalg.hpp"
#include "asdp/psd_projection.hpp"

namespace asdp {

template <typename Scalar>
struct ConicProblem {
  SparseMatrix<Scalar> P;  // k x k, both triangles stored
  Vector<Scalar> q;
  SparseMatrix<Scalar> A;  // m x k
  ConeSet<Scalar> cones;
  // Reported objective = objective_scale * (1/2 x'Px + q'x) + objective_offset.
  Scalar objective_scale = 1;
  Scalar objective_offset = 0;

  Index num_vars() const { return q.size(); }
  Index num_constraints() const { return A.rows(); }
};

enum class ProjectionKind { Exact, Lobpcg };
enum class LinsysBackend { Ldl, Cg, StructuredBo };

inline const char* to_string(ProjectionKind kind) { return kind == ProjectionKind::Exact ? "exact" : "lobpcg"; }

inline const char* to_string(LinsysBackend backend) {
  switch (backend) {
    case LinsysBackend::Ldl: return "ldl";
    case LinsysBackend::Cg: return "cg";
    case LinsysBackend::StructuredBo: return "structured-bo";
  }
  return "?";
}

struct Settings {
  double sigma = 1e-6;
  double rho = 0.1;
  double alpha = 1.0;
  double eps_abs = 1e-5;
  double eps_rel = 1e-5;
  double eps_pinf = 1e-4;
  double eps_dinf = 1e-4;
  int max_iter = 2500;
  int check_interval = 40;
  ProjectionKind projection_mode = ProjectionKind::Lobpcg;
  double proj_tol_c = 10.0;
  double proj_tol_exponent = 1.01;
  LinsysBackend linsys_backend = LinsysBackend::Ldl;
  double cg_tol_c = 1.0;
  std::uint64_t seed = 20190417;

  int lobpcg_max_inner = 50;
  Index lobpcg_expand_by = 0;
  int perp_diagnostic_iters = 0;
  bool record_iterations = true;
  bool check_infeasibility = true;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0) || !std::isfinite(v)) throw SetupError(std::string(name) + " must be positive and finite");
    };
    positive(sigma, "sigma");
    positive(rho, "rho");
    positive(eps_abs, "eps_abs");
    positive(eps_rel, "eps_rel");
    positive(eps_pinf, "eps_pinf");
    positive(eps_dinf, "eps_dinf");
    positive(proj_tol_c, "proj_tol_c");
    positive(proj_tol_exponent, "proj_tol_exponent");
    positive(cg_tol_c, "cg_tol_c");
    if (!(alpha > 0 && alpha < 2)) throw SetupError("alpha must lie in (0, 2)");
    if (max_iter < 1) throw SetupError("max_iter must be at least 1");
    if (check_interval < 1) throw SetupError("check_interval must be at least 1");
    if (lobpcg_max_inner < 1) throw SetupError("lobpcg_max_inner must be at least 1");
  }

  double projection_tolerance(int k) const { return proj_tol_c / std::pow(static_cast<double>(k), proj_tol_exponent); }
};

template <typename Scalar>
void validate(const ConicProblem<Scalar>& prob) {
  const Index k = prob.num_vars();
  const Index m = prob.num_constraints();
  if (k < 1) throw SetupError("problem has no variables");
  if (m < 1 || prob.cones.blocks().empty()) throw SetupError("problem has no constraints");
  if (prob.P.rows() != k || prob.P.cols() != k) throw SetupError("P must be k x k");
  if (prob.A.cols() != k) throw SetupError("A must have as many columns as q has entries");
  if (prob.cones.total_dim() != m) throw SetupError("cone dimension does not match the rows of A");
  if (!prob.q.allFinite()) throw SetupError("q is not finite");
  for (Index j = 0; j < prob.A.outerSize(); ++j)
    for (typename SparseMatrix<Scalar>::InnerIterator it(prob.A, j); it; ++it)
      if (!std::isfinite(it.value())) throw SetupError("A is not finite");
  if (prob.P.nonZeros() > 0) {
    SparseMatrix<Scalar> pt = prob.P.transpose();
    const Scalar pnorm = prob.P.norm();
    if (!std::isfinite(pnorm)) throw SetupError("P is not finite");
    if ((prob.P - pt).norm() > Scalar(1e-12) * (Scalar(1) + pnorm)) throw SetupError("P is not symmetric");
    if (k <= 300) {
      Matrix<Scalar> dense(prob.P);
      Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(dense, Eigen::EigenvaluesOnly);
      if (es.eigenvalues()(0) < Scalar(-1e-8)) throw SetupError("P is not positive semidefinite");
    }
  }
}

// ---------------------------------------------------------------------------
// Linear system backends

/// KKT matrix [P + sigma I, rho A'; rho A, -rho I] with both triangles stored,
/// factorized with inertia (k, m).
template <typename Scalar>
SparseMatrix<Scalar> kkt_matrix(const ConicProblem<Scalar>& prob, Scalar sigma, Scalar rho) {
  const Index k = prob.num_vars();
  const Index m = prob.num_constraints();
  std::vector<Eigen::Triplet<Scalar, int>> trips;
  trips.reserve(static_cast<std::size_t>(prob.P.nonZeros() + 2 * prob.A.nonZeros() + k + m));
  for (Index j = 0; j < prob.P.outerSize(); ++j)
    for (typename SparseMatrix<Scalar>::InnerIterator it(prob.P, j); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (Index i = 0; i < k; ++i) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), sigma);
  for (Index j = 0; j < prob.A.outerSize(); ++j)
    for (typename SparseMatrix<Scalar>::InnerIterator it(prob.A, j); it; ++it) {
      const int r = static_cast<int>(k + it.row());
      const int c = static_cast<int>(it.col());
      trips.emplace_back(r, c, rho * it.value());
      trips.emplace_back(c, r, rho * it.value());
    }
  for (Index i = 0; i < m; ++i) trips.emplace_back(static_cast<int>(k + i), static_cast<int>(k + i), -rho);
  SparseMatrix<Scalar> q(k + m, k + m);
  q.setFromTriplets(trips.begin(), trips.end());
  q.makeCompressed();
  return q;
}

template <typename Scalar>
QuasidefFactor<Scalar> assemble_kkt(const ConicProblem<Scalar>& prob, const Settings& settings) {
  try {
    return ldl_factorize(kkt_matrix(prob, Scalar(settings.sigma), Scalar(settings.rho)), prob.num_vars(),
                         prob.num_constraints());
  } catch (const FactorizationError& e) {
    throw SetupError(std::string("KKT factorization failed: ") + e.what());
  }
}

template <typename Scalar>
struct CgResult {
  Vector<Scalar> x;
  int iterations = 0;
  Scalar residual = 0;
  bool converged = false;
};

/// Conjugate gradients for an SPD operator, started from x0. Stops when the
/// residual 2-norm drops to tol or after max_iter steps.
template <typename Scalar, typename Op>
CgResult<Scalar> cg_solve(const Op& apply, const Vector<Scalar>& b, Scalar tol, const Vector<Scalar>& x0,
                          int max_iter) {
  CgResult<Scalar> out;
  out.x = x0;
  Vector<Scalar> r = b - apply(out.x);
  Scalar rr = r.squaredNorm();
  out.residual = std::sqrt(rr);
  if (out.residual <= tol) {
    out.converged = true;
    return out;
  }
  Vector<Scalar> p = r;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector<Scalar> ap = apply(p);
    const Scalar pap = p.dot(ap);
    if (!(pap > Scalar(0))) break;
    const Scalar step = rr / pap;
    out.x += step * p;
    r -= step * ap;
    const Scalar rr_new = r.squaredNorm();
    out.iterations = it;
    out.residual = std::sqrt(rr_new);
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  return out;
}

template <typename Scalar>
CgResult<Scalar> cg_solve(const Matrix<Scalar>& q, const Vector<Scalar>& b, Scalar tol) {
  return cg_solve<Scalar>([&q](const Vector<Scalar>& v) -> Vector<Scalar> { return q * v; }, b, tol,
                          Vector<Scalar>::Zero(b.size()), static_cast<int>(2 * b.size()));
}

/// A1 = 1_m' kron I_{m^2}: sums the m consecutive slices of length m^2.
template <typename Scalar>
Vector<Scalar> bo_apply_a1(Index m, const Vector<Scalar>& v) {
  const Index s = m * m;
  Vector<Scalar> out = Vector<Scalar>::Zero(s);
  for (Index i = 0; i < m; ++i) out += v.segment(i * s, s);
  return out;
}

/// A1' = 1_m kron I_{m^2}: stacks m copies.
template <typename Scalar>
Vector<Scalar> bo_apply_a1t(Index m, const Vector<Scalar>& v) {
  const Index s = m * m;
  Vector<Scalar> out(m * s);
  for (Index i = 0; i < m; ++i) out.segment(i * s, s) = v;
  return out;
}

template <typename Scalar>
struct BoSolution {
  Vector<Scalar> x1, x2, x3;
};

/// Closed-form solve of
///   [sigma I, rho1 A1', rho2 I; rho1 A1, -rho1 I, 0; rho2 I, 0, -rho2 I] x = y
/// with m = ell + 1, x1, x3 of length m^3 and x2 of length m^2.
template <typename Scalar>
BoSolution<Scalar> structured_solve_bo(Index ell, Scalar sigma, Scalar rho1, Scalar rho2, const Vector<Scalar>& y1,
                                       const Vector<Scalar>& y2, const Vector<Scalar>& y3) {
  if (ell < 0) throw FormatError("structured_solve_bo: ell must be nonnegative");
  const Index m = ell + 1;
  const Index s = m * m;
  if (y1.size() != m * s || y2.size() != s || y3.size() != m * s)
    throw FormatError("structured_solve_bo: right-hand side blocks must have lengths m^3, m^2, m^3");
  const Scalar d = sigma + rho2;
  BoSolution<Scalar> out;
  const Vector<Scalar> y13 = y1 + y3;
  out.x2 = (rho1 / d * bo_apply_a1(m, y13) - y2) / (rho1 * rho1 * Scalar(m) / d + rho1);
  out.x1 = (y13 - rho1 * bo_apply_a1t(m, out.x2)) / d;
  out.x3 = out.x1 - y3 / rho2;
  return out;
}

/// Returns m when A = [1_m' kron I_{m^2}; I_{m^3}] and P = 0, otherwise nullopt.
template <typename Scalar>
std::optional<Index> detect_bo_structure(const ConicProblem<Scalar>& prob) {
  const Index k = prob.num_vars();
  Index m = 1;
  while (m * m * m < k) ++m;
  if (m * m * m != k || prob.P.nonZeros() != 0) return std::nullopt;
  const Index s = m * m;
  if (prob.A.rows() != s + k || prob.A.nonZeros() != 2 * k) return std::nullopt;
  for (Index j = 0; j < prob.A.outerSize(); ++j) {
    Index seen = 0;
    for (typename SparseMatrix<Scalar>::InnerIterator it(prob.A, j); it; ++it) {
      const bool top = it.row() == j % s;
      const bool bottom = it.row() == s + j;
      if (!(top || bottom) || it.value() != Scalar(1)) return std::nullopt;
      ++seen;
    }
    if (seen != 2) return std::nullopt;
  }
  return m;
}

/// Solves the KKT system of one ADMM iteration with the configured backend.
template <typename Scalar>
class KktSolver {
 public:
  KktSolver(const ConicProblem<Scalar>& prob, const Settings& settings)
      : prob_(&prob), settings_(settings), backend_(settings.linsys_backend) {
    switch (backend_) {
      case LinsysBackend::Ldl: factor_ = assemble_kkt(prob, settings); break;
      case LinsysBackend::Cg: cg_x_ = Vector<Scalar>::Zero(prob.num_vars()); break;
      case LinsysBackend::StructuredBo: {
        auto m = detect_bo_structure(prob);
        if (!m) throw SetupError("structured-bo backend needs P = 0 and A = [1_m' kron I_{m^2}; I_{m^3}]");
        bo_m_ = *m;
        break;
      }
    }
  }

  LinsysBackend active_backend() const { return backend_; }
  int last_cg_iterations() const { return last_cg_iterations_; }
  bool fell_back_to_ldl() const { return fell_back_; }

  /// rhs_x = sigma x - q + A'(rho z - y); returns (x_tilde, z_tilde). k is the
  /// 1-based ADMM iteration used by the CG tolerance schedule.
  std::pair<Vector<Scalar>, Vector<Scalar>> solve(const Vector<Scalar>& rhs_x, int k) {
    const auto& prob = *prob_;
    const Scalar sigma(settings_.sigma), rho(settings_.rho);
    if (backend_ == LinsysBackend::Cg) {
      auto apply = [&](const Vector<Scalar>& v) -> Vector<Scalar> {
        Vector<Scalar> av = prob.A * v;
        return prob.P * v + sigma * v + rho * (prob.A.transpose() * av);
      };
      const Scalar tol = Scalar(settings_.cg_tol_c) / (Scalar(k) * Scalar(k));
      auto res = cg_solve<Scalar>(apply, rhs_x, tol, cg_x_, static_cast<int>(2 * prob.num_vars()));
      last_cg_iterations_ = res.iterations;
      if (res.converged) {
        cg_x_ = res.x;
        return {res.x, prob.A * res.x};
      }
      backend_ = LinsysBackend::Ldl;
      fell_back_ = true;
      factor_ = assemble_kkt(prob, settings_);
    }
    if (backend_ == LinsysBackend::StructuredBo) {
      const Index s = bo_m_ * bo_m_;
      const Index k3 = s * bo_m_;
      auto sol = structured_solve_bo<Scalar>(bo_m_ - 1, sigma, rho, rho, rhs_x, Vector<Scalar>::Zero(s),
                                             Vector<Scalar>::Zero(k3));
      Vector<Scalar> zt(s + k3);
      zt << sol.x2, sol.x3;
      return {std::move(sol.x1), std::move(zt)};
    }
    const Index n = prob.num_vars();
    Vector<Scalar> rhs = Vector<Scalar>::Zero(n + prob.num_constraints());
    rhs.head(n) = rhs_x;
    Vector<Scalar> sol = factor_->solve(rhs);
    return {sol.head(n), sol.tail(prob.num_constraints())};
  }

 private:
  const ConicProblem<Scalar>* prob_;
  Settings settings_;
  LinsysBackend backend_;
  std::optional<QuasidefFactor<Scalar>> factor_;
  Vector<Scalar> cg_x_;
  Index bo_m_ = 0;
  int last_cg_iterations_ = 0;
  bool fell_back_ = false;
};

// ---------------------------------------------------------------------------
// Iteration

template <typename Scalar>
struct AdmmState {
  Vector<Scalar> x, z, y;
  Vector<Scalar> x_tilde, z_tilde;
  Vector<Scalar> prev_x, prev_y;
  int k = 0;
  std::vector<ProjectionContext<Scalar>> contexts;

  static AdmmState zeros(const ConicProblem<Scalar>& prob) {
    AdmmState s;
    const Index n = prob.num_vars(), m = prob.num_constraints();
    s.x = s.x_tilde = s.prev_x = Vector<Scalar>::Zero(n);
    s.z = s.y = s.z_tilde = s.prev_y = Vector<Scalar>::Zero(m);
    for (const auto& blk : prob.cones.blocks())
      if (blk.kind == ConeKind::PsdTriangle) s.contexts.emplace_back(blk.matrix_dim);
    return s;
  }

  Vector<Scalar> delta_x() const { return x - prev_x; }
  Vector<Scalar> delta_y() const { return y - prev_y; }
};

struct IterationRecord {
  int iteration = 0;
  double r_prim = 0;
  double r_dual = 0;
  double proj_error_bound = 0;
  double proj_tolerance = 0;
  std::vector<ProjectionMode> modes;  // one per PSD block
  Index max_ritz_count = 0;
  int lobpcg_inner_iterations = 0;
};

struct Timings {
  double total = 0;
  double setup = 0;
  double linsys = 0;
  double projection = 0;
};

template <typename Scalar>
struct AdmmWorkspace {
  AdmmWorkspace(const ConicProblem<Scalar>& prob, const Settings& settings)
      : kkt(prob, settings), rng(settings.seed) {}

  KktSolver<Scalar> kkt;
  std::mt19937_64 rng;
  Timings timings;
  IterationRecord last;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Scalar>
bool finite_state(const AdmmState<Scalar>& s) {
  return s.x.allFinite() && s.z.allFinite() && s.y.allFinite();
}

}  // namespace detail

/// One pass of the relaxed, inexact ADMM update. Throws DivergenceError when
/// an iterate becomes non-finite; the state then holds the failed values.
template <typename Scalar>
void admm_iteration(const ConicProblem<Scalar>& prob, const Settings& settings, AdmmState<Scalar>& state,
                    AdmmWorkspace<Scalar>& ws) {
  const Scalar sigma(settings.sigma), rho(settings.rho), alpha(settings.alpha);
  const int k = state.k + 1;
  const Scalar last_norm = std::sqrt(state.x.squaredNorm() + state.z.squaredNorm() + state.y.squaredNorm());

  auto t0 = detail::Clock::now();
  Vector<Scalar> rhs = sigma * state.x - prob.q + prob.A.transpose() * (rho * state.z - state.y);
  auto [xt, zt] = ws.kkt.solve(rhs, k);
  ws.timings.linsys += detail::seconds_since(t0);
  state.x_tilde = std::move(xt);
  state.z_tilde = std::move(zt);

  const Vector<Scalar> z_relaxed = alpha * state.z_tilde + (Scalar(1) - alpha) * state.z;
  const Scalar tol = Scalar(settings.projection_tolerance(k));
  ProjectionOptions<Scalar> popt;
  popt.max_inner = settings.lobpcg_max_inner;
  popt.expand_by = settings.lobpcg_expand_by;
  popt.perp_diagnostic_iters = settings.perp_diagnostic_iters;

  t0 = detail::Clock::now();
  auto proj = project(prob.cones, Vector<Scalar>(z_relaxed + state.y / rho), state.contexts,
                      settings.projection_mode == ProjectionKind::Lobpcg, tol, popt, ws.rng);
  ws.timings.projection += detail::seconds_since(t0);

  state.prev_x = state.x;
  state.prev_y = state.y;
  state.x = alpha * state.x_tilde + (Scalar(1) - alpha) * state.x;
  state.y = state.y + rho * (z_relaxed - proj.projected);
  state.z = std::move(proj.projected);
  state.k = k;

  if (!detail::finite_state(state))
    throw DivergenceError("non-finite iterate at iteration " + std::to_string(k), k - 1,
                          static_cast<double>(last_norm));

  IterationRecord& rec = ws.last;
  rec = IterationRecord{};
  rec.iteration = k;
  rec.proj_error_bound = static_cast<double>(proj.error_bound);
  rec.proj_tolerance = static_cast<double>(tol);
  rec.modes = std::move(proj.modes);
  for (const auto& ctx : state.contexts) {
    rec.max_ritz_count = std::max(rec.max_ritz_count, ctx.last_ritz_count);
    rec.lobpcg_inner_iterations += ctx.last_inner_iterations;
  }
}

// ---------------------------------------------------------------------------
// Termination and infeasibility

template <typename Scalar>
struct Residuals {
  Scalar r_prim = 0, r_dual = 0;
  Scalar eps_prim = 0, eps_dual = 0;
  bool solved() const { return r_prim <= eps_prim && r_dual <= eps_dual; }
};

template <typename Scalar>
Residuals<Scalar> residuals(const ConicProblem<Scalar>& prob, const Settings& settings,
                            const AdmmState<Scalar>& state) {
  const Vector<Scalar> ax = prob.A * state.x;
  const Vector<Scalar> px = prob.P * state.x;
  const Vector<Scalar> aty = prob.A.transpose() * state.y;
  auto inf = [](const Vector<Scalar>& v) { return v.size() ? v.template lpNorm<Eigen::Infinity>() : Scalar(0); };
  Residuals<Scalar> r;
  r.r_prim = inf(ax - state.z);
  r.r_dual = inf(px + prob.q + aty);
  const Scalar ea(settings.eps_abs), er(settings.eps_rel);
  r.eps_prim = ea + er * std::max(inf(ax), inf(state.z));
  r.eps_dual = ea + er * std::max({inf(px), inf(prob.q), inf(aty)});
  return r;
}

template <typename Scalar>
bool check_termination(const ConicProblem<Scalar>& prob, const Settings& settings, const AdmmState<Scalar>& state) {
  return residuals(prob, settings, state).solved();
}

template <typename Scalar>
struct PrimalCertificate {
  Vector<Scalar> y_bar;  // delta y / ||delta y||
  Scalar at_y_norm = 0;  // ||A' y_bar||_inf
  Scalar dist_polar = 0;
  Scalar b_dot_y = 0;
};

template <typename Scalar>
struct DualCertificate {
  Vector<Scalar> x_bar;  // delta x / ||delta x||
  Scalar dist_recession = 0;
  Scalar px_norm = 0;  // ||P x_bar||_inf
  Scalar q_dot_x = 0;
};

template <typename Scalar>
struct InfeasibilityCheck {
  std::optional<PrimalCertificate<Scalar>> primal;
  std::optional<DualCertificate<Scalar>> dual;
  bool any() const { return primal.has_value() || dual.has_value(); }
};

template <typename Scalar>
PrimalCertificate<Scalar> primal_certificate_quantities(const ConicProblem<Scalar>& prob, const Vector<Scalar>& dy) {
  PrimalCertificate<Scalar> c;
  c.y_bar = dy / dy.norm();
  const Vector<Scalar> aty = prob.A.transpose() * c.y_bar;
  c.at_y_norm = aty.size() ? aty.template lpNorm<Eigen::Infinity>() : Scalar(0);
  c.dist_polar = dist_polar(prob.cones, c.y_bar);
  c.b_dot_y = prob.cones.translation().dot(c.y_bar);
  return c;
}

template <typename Scalar>
DualCertificate<Scalar> dual_certificate_quantities(const ConicProblem<Scalar>& prob, const Vector<Scalar>& dx) {
  DualCertificate<Scalar> c;
  c.x_bar = dx / dx.norm();
  c.dist_recession = dist_recession(prob.cones, Vector<Scalar>(prob.A * c.x_bar));
  const Vector<Scalar> px = prob.P * c.x_bar;
  c.px_norm = px.size() ? px.template lpNorm<Eigen::Infinity>() : Scalar(0);
  c.q_dot_x = prob.q.dot(c.x_bar);
  return c;
}

/// Tests the normalized successive differences against the certificate
/// conditions. Differences of norm at most 1e-12 are skipped.
template <typename Scalar>
InfeasibilityCheck<Scalar> check_infeasibility(const ConicProblem<Scalar>& prob, const Settings& settings,
                                               const AdmmState<Scalar>& state) {
  InfeasibilityCheck<Scalar> out;
  const Vector<Scalar> dx = state.delta_x();
  const Vector<Scalar> dy = state.delta_y();
  const Scalar eps_d(settings.eps_dinf), eps_p(settings.eps_pinf);
  if (dx.norm() > Scalar(1e-12)) {
    auto c = dual_certificate_quantities(prob, dx);
    if (c.dist_recession < eps_d && c.px_norm < eps_d && c.q_dot_x < Scalar(0)) out.dual = std::move(c);
  }
  if (dy.norm() > Scalar(1e-12)) {
    auto c = primal_certificate_quantities(prob, dy);
    if (c.at_y_norm < eps_p && c.dist_polar < eps_p && c.b_dot_y < eps_p) out.primal = std::move(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Driver

enum class SolveStatus { Solved, PrimalInfeasible, DualInfeasible, MaxIterations };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "Solved";
    case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::DualInfeasible: return "DualInfeasible";
    case SolveStatus::MaxIterations: return "MaxIterations";
  }
  return "?";
}

inline int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return 0;
    case SolveStatus::PrimalInfeasible: return 2;
    case SolveStatus::DualInfeasible: return 3;
    case SolveStatus::MaxIterations: return 4;
  }
  return 1;
}

template <typename Scalar>
struct SolveResult {
  SolveStatus status = SolveStatus::MaxIterations;
  Scalar objective = 0;
  Vector<Scalar> x, z, y;
  std::optional<PrimalCertificate<Scalar>> primal_certificate;
  std::optional<DualCertificate<Scalar>> dual_certificate;
  int iterations = 0;
  Scalar r_prim = 0, r_dual = 0;
  Index final_ritz_count = 0;  // largest one-sided Ritz count in the last iteration
  int projection_fallbacks = 0;
  bool cg_fell_back = false;
  std::vector<IterationRecord> records;
  Timings timings;
};

template <typename Scalar>
Scalar objective_value(const ConicProblem<Scalar>& prob, const Vector<Scalar>& x) {
  const Scalar f = Scalar(0.5) * x.dot(prob.P * x) + prob.q.dot(x);
  return prob.objective_scale * f + prob.objective_offset;
}

/// Optional per-check hook, called with the state after every check.
template <typename Scalar>
using CheckCallback = std::function<void(const AdmmState<Scalar>&, const Residuals<Scalar>&)>;

template <typename Scalar>
SolveResult<Scalar> solve(const ConicProblem<Scalar>& prob, const Settings& settings, AdmmState<Scalar> state,
                          const CheckCallback<Scalar>& on_check = {}) {
  const auto t_start = detail::Clock::now();
  settings.validate();
  validate(prob);
  if (state.x.size() != prob.num_vars() || state.z.size() != prob.num_constraints() ||
      state.y.size() != prob.num_constraints())
    throw SetupError("initial state does not match the problem dimensions");
  AdmmWorkspace<Scalar> ws(prob, settings);
  ws.timings.setup = detail::seconds_since(t_start);

  SolveResult<Scalar> result;
  for (int it = 0; it < settings.max_iter; ++it) {
    admm_iteration(prob, settings, state, ws);
    for (const auto& ctx : state.contexts) result.projection_fallbacks += ctx.last_fell_back;
    const bool at_check = state.k % settings.check_interval == 0 || state.k == settings.max_iter;
    if (settings.record_iterations) {
      auto res = residuals(prob, settings, state);
      ws.last.r_prim = static_cast<double>(res.r_prim);
      ws.last.r_dual = static_cast<double>(res.r_dual);
      result.records.push_back(ws.last);
    }
    if (!at_check) continue;
    auto res = residuals(prob, settings, state);
    if (on_check) on_check(state, res);
    if (res.solved()) {
      result.status = SolveStatus::Solved;
      break;
    }
    if (settings.check_infeasibility) {
      auto inf = check_infeasibility(prob, settings, state);
      if (inf.any()) {
        result.status = inf.primal ? SolveStatus::PrimalInfeasible : SolveStatus::DualInfeasible;
        result.primal_certificate = std::move(inf.primal);
        result.dual_certificate = std::move(inf.dual);
        break;
      }
    }
  }

  auto res = residuals(prob, settings, state);
  result.r_prim = res.r_prim;
  result.r_dual = res.r_dual;
  result.iterations = state.k;
  result.objective = objective_value(prob, state.x);
  result.final_ritz_count = ws.last.max_ritz_count;
  result.cg_fell_back = ws.kkt.fell_back_to_ldl();
  result.x = std::move(state.x);
  result.z = std::move(state.z);
  result.y = std::move(state.y);
  result.timings = ws.timings;
  result.timings.total = detail::seconds_since(t_start);
  return result;
}

template <typename Scalar>
SolveResult<Scalar> solve(const ConicProblem<Scalar>& prob, const Settings& settings) {
  validate(prob);
  return solve(prob, settings, AdmmState<Scalar>::zeros(prob));
}

}  // namespace asdp
