#include "entropic/csvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entropic {

VIOracle make_exact_oracle(std::function<MappingBlocks(const BlockState&)> mapping, std::vector<double> noise_bound) {
  VIOracle oracle;
  oracle.sample = [mapping](const BlockState& x, Rng&) { return mapping(x); };
  oracle.exact = std::move(mapping);
  oracle.noise_bound = std::move(noise_bound);
  return oracle;
}

AveragedState AveragedState::from_duals(std::vector<HermitianMatrix> duals, const std::vector<double>& budgets,
                                        double eta0) {
  if (duals.size() != budgets.size()) throw std::invalid_argument("AveragedState: dims and budgets differ in length");
  AveragedState s;
  s.current.reserve(duals.size());
  for (std::size_t i = 0; i < duals.size(); ++i) s.current.push_back(gibbs(duals[i], budgets[i]));
  s.average = s.current;
  s.gamma = eta0;
  s.duals = std::move(duals);
  return s;
}

AveragedState AveragedState::initial(const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets,
                                     double eta0) {
  std::vector<HermitianMatrix> duals;
  duals.reserve(dims.size());
  for (const auto n : dims) duals.push_back(HermitianMatrix::identity(n) * (1.0 / static_cast<double>(n)));
  return from_duals(std::move(duals), budgets, eta0);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::amsmd: return "amsmd";
    case Variant::msmd: return "msmd";
    case Variant::mel: return "mel";
  }
  return "unknown";
}

Variant parse_variant(const std::string& text) {
  if (text == "amsmd") return Variant::amsmd;
  if (text == "msmd") return Variant::msmd;
  if (text == "mel") return Variant::mel;
  throw std::invalid_argument("unknown variant '" + text + "'");
}

AveragedState amsmd_step(const AveragedState& state, const VIOracle& oracle, double eta_now, double eta_next,
                         Rng& rng, bool averaging, double mel_lambda) {
  if (!(eta_now > 0.0)) throw std::invalid_argument("amsmd_step: step size must be positive");
  const MappingBlocks phi = oracle.sample(state.current, rng);
  if (phi.size() != state.current.size()) throw std::runtime_error("amsmd_step: oracle returned the wrong block count");

  AveragedState next;
  next.iteration = state.iteration + 1;
  next.duals = state.duals;
  next.current.reserve(state.current.size());
  for (std::size_t i = 0; i < state.current.size(); ++i) {
    HermitianMatrix direction = phi[i];
    if (mel_lambda != 0.0) direction += mel_lambda * state.current[i].matrix();
    next.duals[i] -= eta_now * direction;
    next.current.push_back(gibbs(next.duals[i], state.current[i].trace_budget()));
  }

  if (averaging) {
    next.gamma = state.gamma + eta_next;
    next.average.reserve(state.average.size());
    for (std::size_t i = 0; i < state.average.size(); ++i) {
      HermitianMatrix mix = state.average[i].matrix() * state.gamma + next.current[i].matrix() * eta_next;
      mix *= 1.0 / next.gamma;
      next.average.emplace_back(std::move(mix), state.average[i].trace_budget());
    }
  } else {
    next.gamma = state.gamma;
    next.average = state.average;
  }
  return next;
}

double block_inner(const BlockState& x, const MappingBlocks& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += trace_inner(x[i].matrix(), f[i]);
  return sum;
}

double gap(const BlockState& x, const MappingBlocks& mapping) {
  if (x.size() != mapping.size()) throw std::invalid_argument("gap: block count mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    sum += trace_inner(x[i].matrix(), mapping[i]) - x[i].trace_budget() * lambda_min(mapping[i]);
  return std::max(sum, 0.0);
}

double gap(const BlockState& x, const VIOracle& oracle) {
  if (!oracle.has_exact()) throw UnsupportedOperation("gap: the oracle has no exact mapping");
  return gap(x, oracle.exact(x));
}

double log_dim_sum(const std::vector<Eigen::Index>& dims) {
  double sum = 0.0;
  for (const auto n : dims) sum += std::log(static_cast<double>(n) + 1.0);
  return sum;
}

double rate_bound_csvi(double noise_total, const std::vector<Eigen::Index>& dims, std::size_t horizon) {
  return 3.0 * noise_total * std::sqrt(log_dim_sum(dims) / static_cast<double>(horizon));
}

StepSchedule csvi_stepsize(double noise_total, const std::vector<Eigen::Index>& dims, std::size_t horizon) {
  return StepSchedule::constant(std::sqrt(log_dim_sum(dims) / static_cast<double>(horizon)) / noise_total, horizon);
}

double csvi_unoptimized_bound(const std::vector<double>& noise_bound, const std::vector<Eigen::Index>& dims,
                              const std::vector<double>& steps) {
  double c_sq = 0.0;
  for (const double c : noise_bound) c_sq += c * c;
  double eta_sum = 0.0;
  double eta_sq = 0.0;
  for (const double eta : steps) {
    eta_sum += eta;
    eta_sq += eta * eta;
  }
  return 2.0 / eta_sum * (log_dim_sum(dims) + eta_sq * c_sq);
}

namespace {

double total_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (const double x : v) sum += x;
  return sum;
}

}  // namespace

CsviResult amsmd_solve(const VIOracle& oracle, const StepSchedule& schedule, std::size_t iterations,
                       const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets, Variant variant,
                       Rng& rng, const CsviOptions& options) {
  const bool averaging = variant == Variant::amsmd;
  const double mel_lambda = variant == Variant::mel ? options.mel_lambda : 0.0;
  const std::size_t stride = std::max<std::size_t>(options.gap_stride, 1);
  const double noise_total = total_of(oracle.noise_bound);

  AveragedState state = options.init ? *options.init : AveragedState::initial(dims, budgets, schedule(0));
  CsviResult result;
  for (std::size_t t = 0; t < iterations; ++t) {
    state = amsmd_step(state, oracle, schedule(t), schedule(t + 1), rng, averaging, mel_lambda);
    const std::size_t done = t + 1;
    if (done % stride != 0 && done != iterations) continue;
    const BlockState& reported = averaging ? state.average : state.current;
    CsviRecord row;
    row.t = done;
    if (oracle.has_exact()) row.gap = gap(reported, oracle);
    if (noise_total > 0.0) row.bound = rate_bound_csvi(noise_total, dims, done);
    if (options.metrics) row.metrics = options.metrics(reported);
    result.trace.push_back(std::move(row));
  }
  result.solution = averaging ? state.average : state.current;
  result.final_state = std::move(state);
  return result;
}

AveragedState warm_start(const VIOracle& oracle, const StepSchedule& schedule, std::size_t iterations,
                         const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets, Variant variant,
                         Rng& rng, double mel_lambda) {
  const double lambda = variant == Variant::mel ? mel_lambda : 0.0;
  AveragedState state = AveragedState::initial(dims, budgets, schedule(0));
  std::vector<HermitianMatrix> best_duals = state.duals;
  double best_gap = gap(state.current, oracle);
  for (std::size_t t = 0; t < iterations; ++t) {
    state = amsmd_step(state, oracle, schedule(t), schedule(t + 1), rng, false, lambda);
    const double g = gap(state.current, oracle);
    if (g < best_gap) {
      best_gap = g;
      best_duals = state.duals;
    }
  }
  return AveragedState::from_duals(std::move(best_duals), budgets, schedule(0));
}

BlockState random_block_state(Rng& rng, const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets) {
  BlockState x;
  x.reserve(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) x.push_back(random_spectra_point(rng, dims[i], budgets[i]));
  return x;
}

double check_monotone(const std::function<MappingBlocks(const BlockState&)>& mapping,
                      const std::function<BlockState(Rng&)>& sampler, std::size_t trials, Rng& rng) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trials; ++k) {
    const BlockState x = sampler(rng);
    const BlockState y = sampler(rng);
    const MappingBlocks fx = mapping(x);
    const MappingBlocks fy = mapping(y);
    double value = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      value += trace_inner(x[i].matrix() - y[i].matrix(), fx[i] - fy[i]);
    worst = std::min(worst, value);
  }
  return worst;
}

std::vector<double> estimate_noise_bound(const std::function<MappingBlocks(const BlockState&, Rng&)>& sample,
                                         const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets,
                                         std::size_t draws, Rng& rng, double safety) {
  std::vector<double> worst(dims.size(), 0.0);
  for (std::size_t k = 0; k < draws; ++k) {
    const BlockState x = random_block_state(rng, dims, budgets);
    const MappingBlocks phi = sample(x, rng);
    for (std::size_t i = 0; i < dims.size(); ++i) worst[i] = std::max(worst[i], spectral_norm(phi[i]));
  }
  for (auto& w : worst) w *= safety;
  return worst;
}

}  // namespace entropic
