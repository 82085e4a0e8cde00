#include "asdp/operator_sim.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "asdp/admm.hpp"
#include "asdp/eigsolver.hpp"
#include "asdp/lowering.hpp"
#include "asdp/toys.hpp"

namespace asdp::opsim {
namespace {

double error_norm(ErrorSchedule s, double c, int k) {
  switch (s) {
    case ErrorSchedule::Zero: return 0.0;
    case ErrorSchedule::Summable: return c / std::pow(static_cast<double>(k), 1.5);
    case ErrorSchedule::Nonsummable: return c / static_cast<double>(k);
  }
  return 0.0;
}

Vector<double> random_error(ErrorSchedule s, double c, int k, Index dim, std::mt19937_64& rng) {
  const double norm = error_norm(s, c, k);
  if (norm == 0.0) return Vector<double>::Zero(dim);
  Vector<double> d = random_block<double>(dim, 1, rng).col(0);
  return norm * d / d.norm();
}

template <typename Step>
Result iterate(const std::string& scenario, ErrorSchedule schedule, const Options& options,
               const Vector<double>& target, Step step) {
  std::mt19937_64 rng(options.seed);
  Result out;
  out.scenario = scenario;
  out.schedule = schedule;
  out.target = target;
  Vector<double> x = Vector<double>::Zero(target.size());
  for (int k = 1; k <= options.iterations; ++k) {
    Vector<double> next = step(x) + random_error(schedule, options.c, k, x.size(), rng);
    const Vector<double> dx = next - x;
    x = std::move(next);
    out.final_error = (dx - target).norm();
    if (k == 1 || k % options.trace_every == 0 || k == options.iterations)
      out.trace.push_back({k, out.final_error, dx.norm()});
  }
  if (schedule != ErrorSchedule::Nonsummable) out.passed = out.final_error <= options.tolerance;
  return out;
}

}  // namespace

const char* to_string(ErrorSchedule s) {
  switch (s) {
    case ErrorSchedule::Zero: return "zero";
    case ErrorSchedule::Summable: return "summable";
    case ErrorSchedule::Nonsummable: return "nonsummable";
  }
  return "?";
}

std::optional<ErrorSchedule> parse_schedule(const std::string& name) {
  if (name == "zero") return ErrorSchedule::Zero;
  if (name == "summable") return ErrorSchedule::Summable;
  if (name == "nonsummable") return ErrorSchedule::Nonsummable;
  return std::nullopt;
}

Result run_translation(ErrorSchedule schedule, const Options& options) {
  const Vector<double> t = (Vector<double>(3) << 1.0, -2.0, 0.5).finished();
  return iterate("translation", schedule, options, t, [&](const Vector<double>& x) -> Vector<double> { return x + t; });
}

Result run_rotation_translation(ErrorSchedule schedule, const Options& options) {
  const double theta = 0.7;
  Matrix<double> r = Matrix<double>::Identity(3, 3);
  r(0, 0) = std::cos(theta);
  r(0, 1) = -std::sin(theta);
  r(1, 0) = std::sin(theta);
  r(1, 1) = std::cos(theta);
  const Vector<double> t = (Vector<double>(3) << 0.8, -0.3, 1.0).finished();
  const Vector<double> target = (Vector<double>(3) << 0.0, 0.0, 0.5 * t(2)).finished();
  return iterate("rotation-translation", schedule, options, target,
                 [&](const Vector<double>& x) -> Vector<double> { return 0.5 * (x + r * x + t); });
}

EquivalenceResult run_admm_equivalence(int iterations, std::uint64_t seed, double alpha, double tolerance) {
  const auto planted = toys::planted_sdp(6, 4, 2, seed);
  const auto lowered = split_and_lower(planted.problem);
  const ConicProblem<double>& prob = lowered.problem;
  Settings settings;
  settings.projection_mode = ProjectionKind::Exact;
  settings.alpha = alpha;
  settings.seed = seed;
  AdmmWorkspace<double> ws(prob, settings);
  AdmmState<double> state = AdmmState<double>::zeros(prob);
  const double rho = settings.rho, sigma = settings.sigma;

  EquivalenceResult out;
  for (int k = 0; k < iterations; ++k) {
    const Vector<double> x0 = state.x, z0 = state.z;
    const Vector<double> v0 = state.z + state.y / rho;
    admm_iteration(prob, settings, state, ws);
    const Vector<double> v1 = state.z + state.y / rho;
    const double scale = 1.0 + v0.lpNorm<Eigen::Infinity>();

    EquivalenceRow row;
    row.k = state.k;
    row.relaxation_violation = (v1 - v0 - alpha * (state.z_tilde - z0)).lpNorm<Eigen::Infinity>() / scale;
    row.projection_violation = (state.z - project_exact(prob.cones, v1)).lpNorm<Eigen::Infinity>() / scale;
    // Stationarity of 1/2 x'Px + q'x + sigma/2 |x - x0|^2 + rho/2 |Ax - w|^2 at x~, w = 2 z0 - v0,
    // together with z~ = A x~.
    const Vector<double> w = 2.0 * z0 - v0;
    const Vector<double> grad = prob.P * state.x_tilde + prob.q + sigma * (state.x_tilde - x0) +
                                rho * (prob.A.transpose() * (state.z_tilde - w));
    const double feas = (prob.A * state.x_tilde - state.z_tilde).lpNorm<Eigen::Infinity>();
    const double grad_scale = 1.0 + rho * (prob.A.transpose() * w).lpNorm<Eigen::Infinity>() +
                              prob.q.lpNorm<Eigen::Infinity>() + sigma * x0.lpNorm<Eigen::Infinity>();
    row.prox_violation = std::max(grad.lpNorm<Eigen::Infinity>() / grad_scale, feas / scale);
    out.max_violation =
        std::max({out.max_violation, row.relaxation_violation, row.projection_violation, row.prox_violation});
    out.trace.push_back(row);
  }
  out.passed = out.max_violation <= tolerance;
  return out;
}

std::string trace_csv(const Result& r) {
  std::ostringstream out;
  out << "# scenario=" << r.scenario << " schedule=" << to_string(r.schedule) << "\n";
  out << "k,error,step_norm\n";
  char buf[96];
  for (const auto& row : r.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", row.k, row.error, row.step_norm);
    out << buf;
  }
  return out.str();
}

std::string trace_csv(const EquivalenceResult& r) {
  std::ostringstream out;
  out << "# scenario=admm-equivalence\n";
  out << "k,relaxation_violation,projection_violation,prox_violation\n";
  char buf[128];
  for (const auto& row : r.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.k, row.relaxation_violation,
                  row.projection_violation, row.prox_violation);
    out << buf;
  }
  return out.str();
}

}  // namespace asdp::opsim
