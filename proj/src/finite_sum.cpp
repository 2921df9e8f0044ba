#include "entropic/finite_sum.hpp"

#include <cmath>
#include <stdexcept>

namespace entropic {

double total_value(const std::vector<ComponentObjective>& objectives, const SpectraPoint& x) {
  double sum = 0.0;
  for (const auto& f : objectives) sum += f.value(x);
  return sum;
}

double total_lipschitz(const std::vector<ComponentObjective>& objectives) {
  double sum = 0.0;
  for (const auto& f : objectives) sum += f.lipschitz_bound;
  return sum;
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant_horizon: return "constant_horizon";
    case ScheduleKind::harmonic_sqrt: return "harmonic_sqrt";
    case ScheduleKind::harmonic: return "harmonic";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(const std::string& text) {
  if (text == "constant_horizon" || text == "constant") return ScheduleKind::constant_horizon;
  if (text == "harmonic_sqrt") return ScheduleKind::harmonic_sqrt;
  if (text == "harmonic") return ScheduleKind::harmonic;
  throw std::invalid_argument("unknown schedule '" + text + "'");
}

StepSchedule::StepSchedule(ScheduleKind kind, double scale, std::size_t horizon)
    : kind_(kind), scale_(scale), horizon_(horizon) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("StepSchedule: scale must be positive");
}

double StepSchedule::operator()(std::size_t t) const {
  const double k = static_cast<double>(t) + 1.0;
  switch (kind_) {
    case ScheduleKind::constant_horizon: return scale_;
    case ScheduleKind::harmonic_sqrt: return scale_ / std::sqrt(k);
    case ScheduleKind::harmonic: return scale_ / k;
  }
  return scale_;
}

StepSchedule mdis_stepsize(double lipschitz_total, double initial_divergence, Eigen::Index n, std::size_t horizon) {
  const double eta = std::sqrt(initial_divergence / (static_cast<double>(n) + 1.0)) /
                     (lipschitz_total * std::sqrt(static_cast<double>(horizon)));
  return StepSchedule::constant(eta, horizon);
}

double rate_bound_mdis(double lipschitz_total, double initial_divergence, Eigen::Index n, std::size_t horizon) {
  return 2.0 * lipschitz_total *
         std::sqrt(initial_divergence * (static_cast<double>(n) + 1.0) / static_cast<double>(horizon));
}

MDISState MDISState::start(const std::vector<ComponentObjective>& objectives, const SpectraPoint& x0,
                           HermitianMatrix dual) {
  const double value = total_value(objectives, x0);
  return MDISState{.primal = x0, .dual = std::move(dual), .iteration = 0, .best_value = value, .best_iterate = x0};
}

MDISState MDISState::start(const std::vector<ComponentObjective>& objectives, const SpectraPoint& x0) {
  const HermitianMatrix normalized = x0.matrix() * (1.0 / x0.trace_budget());
  HermitianMatrix dual = lambda_min(normalized) > 1e-12 ? mat_log(normalized) : HermitianMatrix::zero(x0.dim());
  return start(objectives, x0, std::move(dual));
}

MDISState mdis_step(const MDISState& state, const std::vector<ComponentObjective>& objectives, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("mdis_step: step size must be positive");
  const double budget = state.primal.trace_budget();
  HermitianMatrix dual = state.dual;
  SpectraPoint point = state.primal;
  for (const auto& f : objectives) {
    dual -= eta * f.subgradient(point);
    point = gibbs(dual, budget);
  }
  MDISState next{.primal = point,
                 .dual = std::move(dual),
                 .iteration = state.iteration + 1,
                 .best_value = state.best_value,
                 .best_iterate = state.best_iterate};
  const double value = total_value(objectives, next.primal);
  if (value < next.best_value) {
    next.best_value = value;
    next.best_iterate = next.primal;
  }
  return next;
}

MDISResult mdis_solve(const std::vector<ComponentObjective>& objectives, const StepSchedule& schedule,
                      std::size_t iterations, const SpectraPoint& x0, const MDISOptions& options) {
  MDISState state = MDISState::start(objectives, x0);
  MDISResult result{.best_iterate = x0, .best_value = state.best_value, .final_iterate = x0, .trace = {}};
  if (iterations == 0) return result;

  const double lipschitz = total_lipschitz(objectives);
  const double d0 = options.initial_divergence.value_or(std::log(static_cast<double>(x0.dim())));
  const double n_plus_one = static_cast<double>(x0.dim()) + 1.0;
  const std::size_t stride = std::max<std::size_t>(options.record_stride, 1);
  double eta_sum = 0.0;
  double eta_sq_sum = 0.0;

  for (std::size_t t = 0; t < iterations; ++t) {
    const double eta = schedule(t);
    eta_sum += eta;
    eta_sq_sum += eta * eta;
    state = mdis_step(state, objectives, eta);
    const std::size_t done = t + 1;
    if (done % stride != 0 && done != iterations) continue;

    MDISRecord row{.t = done,
                   .value = total_value(objectives, state.primal),
                   .best_value = state.best_value,
                   .suboptimality = std::nullopt,
                   .bound = std::nullopt};
    if (options.optimal_value) {
      row.suboptimality = state.best_value - *options.optimal_value;
      // Un-optimized rate bound; reduces to 2 L sqrt(D0 (n+1) / T) for the
      // constant horizon step at t = T.
      if (lipschitz > 0.0) row.bound = (d0 + n_plus_one * lipschitz * lipschitz * eta_sq_sum) / eta_sum;
    }
    result.trace.push_back(row);
  }
  result.best_iterate = state.best_iterate;
  result.best_value = state.best_value;
  result.final_iterate = state.primal;
  return result;
}

ComponentObjective make_linear_objective(const HermitianMatrix& a) {
  return ComponentObjective{
      .value = [a](const SpectraPoint& x) { return trace_inner(a, x.matrix()); },
      .subgradient = [a](const SpectraPoint&) { return a; },
      .lipschitz_bound = spectral_norm(a),
  };
}

std::vector<ComponentObjective> make_covariance_objective(const std::vector<HermitianMatrix>& sample_covariances,
                                                          double penalty, const Eigen::MatrixXd& penalty_weights,
                                                          double pd_floor) {
  if (sample_covariances.empty()) throw std::invalid_argument("covariance objective: no agents");
  const Eigen::Index n = sample_covariances.front().dim();
  if (penalty_weights.rows() != n || penalty_weights.cols() != n)
    throw std::invalid_argument("covariance objective: penalty matrix has the wrong shape");
  if ((penalty_weights.array() < 0.0).any())
    throw std::invalid_argument("covariance objective: penalty matrix must be nonnegative");
  if ((penalty_weights - penalty_weights.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("covariance objective: penalty matrix must be symmetric");
  if (penalty < 0.0) throw std::invalid_argument("covariance objective: penalty must be nonnegative");

  const double weight = penalty / static_cast<double>(sample_covariances.size());
  std::vector<ComponentObjective> out;
  out.reserve(sample_covariances.size());
  for (const auto& s : sample_covariances) {
    if (s.dim() != n) throw std::invalid_argument("covariance objective: inconsistent dimensions");
    auto value = [s, weight, penalty_weights, pd_floor](const SpectraPoint& x) {
      const ComplexMatrix& m = x.matrix().matrix();
      const double l1 = (penalty_weights.array() * m.array().abs()).sum();
      return -log_det_floored(x.matrix(), pd_floor) + trace_inner(s, x.matrix()) + weight * l1;
    };
    auto subgradient = [s, weight, penalty_weights, pd_floor](const SpectraPoint& x) {
      const ComplexMatrix& m = x.matrix().matrix();
      ComplexMatrix sign = ComplexMatrix::Zero(m.rows(), m.cols());
      for (Eigen::Index v = 0; v < m.cols(); ++v)
        for (Eigen::Index u = 0; u < m.rows(); ++u) {
          const double mag = std::abs(m(u, v));
          if (mag > 0.0) sign(u, v) = penalty_weights(u, v) * m(u, v) / mag;
        }
      return s - inverse_floored(x.matrix(), pd_floor) + weight * HermitianMatrix::symmetrize(sign);
    };
    const double bound = 1.0 / pd_floor + spectral_norm(s) + weight * penalty_weights.norm();
    out.push_back(ComponentObjective{.value = value, .subgradient = subgradient, .lipschitz_bound = bound});
  }
  return out;
}

HermitianMatrix sample_covariance(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 1) throw std::invalid_argument("sample_covariance: no samples");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  return HermitianMatrix::symmetrize(
      (centered.transpose() * centered / static_cast<double>(samples.rows())).cast<Complex>());
}

std::vector<HermitianMatrix> normalize_covariances(const std::vector<HermitianMatrix>& sample_covariances) {
  if (sample_covariances.empty()) throw std::invalid_argument("normalize_covariances: no agents");
  HermitianMatrix total = HermitianMatrix::zero(sample_covariances.front().dim());
  for (const auto& s : sample_covariances) total += s;
  if (lambda_min(total) <= 0.0) throw std::domain_error("normalize_covariances: pooled covariance is singular");
  const double m = static_cast<double>(sample_covariances.size());
  // tr(m (c S)^{-1}) = 1  =>  c = m tr(S^{-1}).
  const double c = m * inverse_floored(total, 0.0).trace();
  std::vector<HermitianMatrix> out;
  out.reserve(sample_covariances.size());
  for (const auto& s : sample_covariances) out.push_back(s * c);
  return out;
}

SpectraPoint covariance_optimum(const std::vector<HermitianMatrix>& normalized_covariances) {
  HermitianMatrix total = HermitianMatrix::zero(normalized_covariances.front().dim());
  for (const auto& s : normalized_covariances) total += s;
  HermitianMatrix x = inverse_floored(total, 0.0) * static_cast<double>(normalized_covariances.size());
  x *= 1.0 / x.trace();
  return SpectraPoint(std::move(x), 1.0);
}

}  // namespace entropic
