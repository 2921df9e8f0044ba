#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "entropic/finite_sum.hpp"
#include "entropic/random.hpp"

namespace entropic {

// Player blocks X = diag(X_1, ..., X_N); block i lives in its own spectrahedron.
using BlockState = std::vector<SpectraPoint>;
using MappingBlocks = std::vector<HermitianMatrix>;

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct VIOracle {
  // Noisy realization Phi_i(X, xi) per block.
  std::function<MappingBlocks(const BlockState&, Rng&)> sample;
  // Exact mapping F_i(X) per block; empty when unavailable.
  std::function<MappingBlocks(const BlockState&)> exact;
  // C_i with E ||Phi_i||_2^2 <= C_i^2.
  std::vector<double> noise_bound;

  bool has_exact() const { return static_cast<bool>(exact); }
};

// Deterministic oracle: sample == exact.
VIOracle make_exact_oracle(std::function<MappingBlocks(const BlockState&)> mapping, std::vector<double> noise_bound);

struct AveragedState {
  BlockState current;
  BlockState average;
  double gamma = 0.0;  // sum of step sizes carried by the average
  std::vector<HermitianMatrix> duals;
  std::size_t iteration = 0;

  // Y_{i,0} = I / n_i, X_{i,0} = gibbs(Y_{i,0}, p_i) = p_i I / n_i,
  // average = X_0, gamma = eta_0.
  static AveragedState initial(const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets,
                               double eta0);
  // Start from given duals (the primal is their Gibbs image).
  static AveragedState from_duals(std::vector<HermitianMatrix> duals, const std::vector<double>& budgets,
                                  double eta0);
};

enum class Variant { amsmd, msmd, mel };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

// One iteration: Y_i <- Y_i - eta_now (Phi_i(X) + mel_lambda X_i), X_i <-
// gibbs(Y_i, p_i). When averaging, gamma += eta_next and the average absorbs
// X_{t+1} with weight eta_next.
AveragedState amsmd_step(const AveragedState& state, const VIOracle& oracle, double eta_now, double eta_next,
                         Rng& rng, bool averaging, double mel_lambda = 0.0);

struct CsviRecord {
  std::size_t t = 0;
  double gap = 0.0;
  std::optional<double> bound;
  std::vector<double> metrics;
};

struct CsviOptions {
  std::size_t gap_stride = 10;
  double mel_lambda = 0.0;
  // Starting state; AveragedState::initial when absent.
  std::optional<AveragedState> init;
  // Extra per-checkpoint values (e.g. payoffs) of the reported iterate.
  std::function<std::vector<double>(const BlockState&)> metrics;
};

struct CsviResult {
  // Average for amsmd, last iterate for msmd / mel.
  BlockState solution;
  AveragedState final_state;
  std::vector<CsviRecord> trace;
};

// Runs T iterations. Checkpoints at every multiple of gap_stride and at T
// record the gap of the reported iterate and 3 sum C_i sqrt(sum log(n_i+1)/t).
CsviResult amsmd_solve(const VIOracle& oracle, const StepSchedule& schedule, std::size_t iterations,
                       const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets, Variant variant,
                       Rng& rng, const CsviOptions& options = {});

// Runs `iterations` throwaway steps and returns the iterate with the smallest
// gap (earliest on ties) together with its dual as a fresh starting state.
AveragedState warm_start(const VIOracle& oracle, const StepSchedule& schedule, std::size_t iterations,
                         const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets, Variant variant,
                         Rng& rng, double mel_lambda = 0.0);

// sum_i [<X_i, F_i> - p_i lambda_min(F_i)], clamped at 0.
double gap(const BlockState& x, const MappingBlocks& mapping);
double gap(const BlockState& x, const VIOracle& oracle);

// 3 C_total sqrt(sum_i log(n_i + 1) / T).
double rate_bound_csvi(double noise_total, const std::vector<Eigen::Index>& dims, std::size_t horizon);
// (1 / C_total) sqrt(sum_i log(n_i + 1) / T) for all t.
StepSchedule csvi_stepsize(double noise_total, const std::vector<Eigen::Index>& dims, std::size_t horizon);
// 2 / sum eta_t (sum_i log(n_i + 1) + sum eta_t^2 sum_i C_i^2) for an explicit step sequence.
double csvi_unoptimized_bound(const std::vector<double>& noise_bound, const std::vector<Eigen::Index>& dims,
                              const std::vector<double>& steps);

double log_dim_sum(const std::vector<Eigen::Index>& dims);

BlockState random_block_state(Rng& rng, const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets);

// min over sampled pairs of <X - Y, F(X) - F(Y)>; below -1e-8 flags a
// non-monotone mapping.
double check_monotone(const std::function<MappingBlocks(const BlockState&)>& mapping,
                      const std::function<BlockState(Rng&)>& sampler, std::size_t trials, Rng& rng);

// max over random feasible states of ||Phi_i||_2, times `safety`.
std::vector<double> estimate_noise_bound(const std::function<MappingBlocks(const BlockState&, Rng&)>& sample,
                                         const std::vector<Eigen::Index>& dims, const std::vector<double>& budgets,
                                         std::size_t draws, Rng& rng, double safety = 1.5);

double block_inner(const BlockState& x, const MappingBlocks& f);

}  // namespace entropic
