#pragma once

// Fixed-point iterations of averaged operators with injected errors, and a
// replay of ADMM in its operator form.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asdp/linalg.hpp"

namespace asdp::opsim {

enum class ErrorSchedule { Zero, Summable, Nonsummable };

const char* to_string(ErrorSchedule s);
std::optional<ErrorSchedule> parse_schedule(const std::string& name);

struct Options {
  int iterations = 10000;
  double c = 1.0;  // error norm c / k^1.5 (summable) or c / k (nonsummable)
  std::uint64_t seed = 1;
  int trace_every = 100;
  double tolerance = 1e-3;
};

struct TraceRow {
  int k = 0;
  double error = 0;     // ||delta x^k - target||
  double step_norm = 0;  // ||delta x^k||
};

struct Result {
  std::string scenario;
  ErrorSchedule schedule = ErrorSchedule::Zero;
  Vector<double> target;
  std::vector<TraceRow> trace;
  double final_error = 0;
  std::optional<bool> passed;  // unset for nonsummable schedules
};

/// x^{k+1} = x^k + t + e^k in R^3; the minimal displacement is t.
Result run_translation(ErrorSchedule schedule, const Options& options);

/// x^{k+1} = 1/2 (x^k + R x^k + t) + e^k with R a rotation of the xy-plane in
/// R^3; the minimal displacement is half the z-component of t.
Result run_rotation_translation(ErrorSchedule schedule, const Options& options);

struct EquivalenceRow {
  int k = 0;
  double relaxation_violation = 0;  // ||v^{k+1} - v^k - alpha (z~^{k+1} - z^k)||_inf
  double projection_violation = 0;  // ||z^{k+1} - Pi_C(v^{k+1})||_inf
  double prox_violation = 0;        // optimality residual of (x~, z~) = prox_f(x^k, 2 z^k - v^k)
};

struct EquivalenceResult {
  std::vector<EquivalenceRow> trace;
  double max_violation = 0;
  bool passed = false;
};

/// Runs exact-projection ADMM on a small planted SDP, with v^k = z^k + y^k / rho,
/// and measures the operator-form identities each iteration (relative to
/// 1 + ||v^k||_inf).
EquivalenceResult run_admm_equivalence(int iterations, std::uint64_t seed, double alpha = 1.5,
                                       double tolerance = 1e-10);

std::string trace_csv(const Result& r);
std::string trace_csv(const EquivalenceResult& r);

}  // namespace asdp::opsim
