#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entropic/mirror.hpp"

namespace entropic {

// One agent's convex component f_i of the network objective.
struct ComponentObjective {
  std::function<double(const SpectraPoint&)> value;
  std::function<HermitianMatrix(const SpectraPoint&)> subgradient;
  // Upper bound on the spectral norm of any subgradient over the feasible set.
  double lipschitz_bound = 0.0;
};

double total_value(const std::vector<ComponentObjective>& objectives, const SpectraPoint& x);
double total_lipschitz(const std::vector<ComponentObjective>& objectives);

enum class ScheduleKind { constant_horizon, harmonic_sqrt, harmonic };

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& text);

// Non-increasing positive step sizes indexed from t = 0:
//   constant_horizon  eta_t = scale
//   harmonic_sqrt     eta_t = scale / sqrt(t + 1)
//   harmonic          eta_t = scale / (t + 1)
class StepSchedule {
 public:
  StepSchedule(ScheduleKind kind, double scale, std::size_t horizon = 0);

  static StepSchedule constant(double eta, std::size_t horizon = 0) {
    return {ScheduleKind::constant_horizon, eta, horizon};
  }
  static StepSchedule harmonic_sqrt(double scale = 1.0) { return {ScheduleKind::harmonic_sqrt, scale}; }
  static StepSchedule harmonic(double scale = 1.0) { return {ScheduleKind::harmonic, scale}; }

  double operator()(std::size_t t) const;

  ScheduleKind kind() const { return kind_; }
  double scale() const { return scale_; }
  std::size_t horizon() const { return horizon_; }

 private:
  ScheduleKind kind_;
  double scale_;
  std::size_t horizon_;
};

// Constant step minimizing the finite-horizon M-MDIS bound:
// (1 / L_total) sqrt(D0 / (n + 1)) / sqrt(T).
StepSchedule mdis_stepsize(double lipschitz_total, double initial_divergence, Eigen::Index n, std::size_t horizon);

// 2 L_total sqrt(D0 (n + 1) / T).
double rate_bound_mdis(double lipschitz_total, double initial_divergence, Eigen::Index n, std::size_t horizon);

struct MDISState {
  SpectraPoint primal;
  HermitianMatrix dual;
  std::size_t iteration = 0;
  double best_value = 0.0;
  SpectraPoint best_iterate;

  // X0 with its mirror image as the carried dual (log X0 when X0 is
  // positive definite, zero otherwise).
  static MDISState start(const std::vector<ComponentObjective>& objectives, const SpectraPoint& x0);
  static MDISState start(const std::vector<ComponentObjective>& objectives, const SpectraPoint& x0,
                         HermitianMatrix dual);
};

// One outer iteration: a cyclic sweep over agents 1..m, each taking a dual
// subgradient step at the previous agent's Gibbs point. Budgets other than 1
// are handled by projecting onto tr = p.
MDISState mdis_step(const MDISState& state, const std::vector<ComponentObjective>& objectives, double eta);

struct MDISRecord {
  std::size_t t = 0;
  double value = 0.0;       // f(X_t)
  double best_value = 0.0;  // min_{k <= t} f(X_k)
  std::optional<double> suboptimality;
  std::optional<double> bound;
};

struct MDISResult {
  SpectraPoint best_iterate;
  double best_value = 0.0;
  SpectraPoint final_iterate;
  std::vector<MDISRecord> trace;
};

struct MDISOptions {
  std::optional<double> optimal_value;
  // D(X*, X0) used by the bound column; log n for X0 = I/n.
  std::optional<double> initial_divergence;
  std::size_t record_stride = 1;
};

MDISResult mdis_solve(const std::vector<ComponentObjective>& objectives, const StepSchedule& schedule,
                      std::size_t iterations, const SpectraPoint& x0, const MDISOptions& options = {});

// f_i(X) = tr(A_i X) with L = ||A_i||_2.
ComponentObjective make_linear_objective(const HermitianMatrix& a);

// Per-agent sparse inverse covariance objectives
//   f_i(X) = -log det X + tr(S_i X) + (lambda / m) ||P * X||_1
// with eigenvalues floored at `pd_floor` inside the log-det and inverse.
// `penalty_weights` must be real symmetric with nonnegative entries.
std::vector<ComponentObjective> make_covariance_objective(const std::vector<HermitianMatrix>& sample_covariances,
                                                          double penalty, const Eigen::MatrixXd& penalty_weights,
                                                          double pd_floor = 1e-8);

// Sample covariance of the rows of `samples` around their mean.
HermitianMatrix sample_covariance(const Eigen::MatrixXd& samples);

// Scales the S_i so the unpenalized network optimum m (sum S_i)^{-1} has unit
// trace; returns the scaled matrices. That optimum is then feasible for the
// tr X = 1 constraint.
std::vector<HermitianMatrix> normalize_covariances(const std::vector<HermitianMatrix>& sample_covariances);

// Closed-form optimum of the unpenalized network objective after
// normalize_covariances: X* = m (sum S_i)^{-1}.
SpectraPoint covariance_optimum(const std::vector<HermitianMatrix>& normalized_covariances);

}  // namespace entropic
