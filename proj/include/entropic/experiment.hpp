#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "entropic/csvi.hpp"
#include "entropic/finite_sum.hpp"
#include "entropic/mimo.hpp"

namespace entropic::experiment {

enum class Problem { mimo, linear_sum, covariance, affine_vi };
enum class Algorithm { amsmd, msmd, mel, mdis };

std::string to_string(Problem p);
std::string to_string(Algorithm a);

struct ExperimentConfig {
  Problem problem = Problem::mimo;
  Algorithm algorithm = Algorithm::amsmd;
  Eigen::Index n = 2;  // transmit antennas, or matrix dimension for the other problems
  Eigen::Index m = 4;  // receive antennas
  double sigma = 1.0;
  std::size_t T = 4000;
  std::size_t paths = 10;
  std::uint64_t seed = 1;
  // Problem instance (channels, data); defaults to `seed`.
  std::optional<std::uint64_t> instance_seed;
  // Unset: harmonic for mel, harmonic_sqrt otherwise.
  std::optional<ScheduleKind> schedule;
  // Unset: 1 for harmonic schedules, the rate-optimal constant for constant_horizon.
  std::optional<double> step_scale;
  double mel_lambda = 0.1;
  std::size_t gap_stride = 10;
  mimo::PowerMode power_mode = mimo::PowerMode::dbm;
  std::string output_path = "trace.csv";
  std::size_t warm_start_iters = 0;
  // Finite-sum problems.
  std::size_t agents = 5;
  std::size_t samples = 50;
  double penalty = 0.0;
  // Overrides the estimated C_i (same value for every player) when set.
  std::optional<double> noise_bound;

  ScheduleKind effective_schedule() const;
  std::uint64_t effective_instance_seed() const { return instance_seed.value_or(seed); }
  // "mel:0.1" for MEL, the algorithm name otherwise.
  std::string label() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Flat key=value text ('#' starts a comment); overrides win over the file.
// Unknown keys and malformed values raise ConfigError naming the key and line.
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});

// Empty when the config is valid.
std::vector<std::string> validate(const ExperimentConfig& config);

// key=value lines, one per key, in a fixed order.
std::string dump_config(const ExperimentConfig& config);

struct TraceRow {
  bool aggregate = false;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t path = 0;
  std::size_t t = 0;
  double gap = 0.0;
  double log10_gap = 0.0;
  std::optional<double> value;
  std::optional<double> bound;
  std::vector<double> payoffs;
};

struct RunTrace {
  std::vector<TraceRow> rows;       // ordered by (path, t)
  std::vector<TraceRow> aggregate;  // per-t means over paths
};

std::uint64_t path_seed(std::uint64_t master, std::size_t path_index);

// Runs every sample path; parallelism capped by ENTROPIC_SPECTRA_THREADS.
RunTrace execute(const ExperimentConfig& config);

inline constexpr const char* kSchemaLine = "#schema=1";
inline constexpr const char* kCsvHeader = "kind,algorithm,seed,path,t,gap,log10_gap,value,bound,payoffs";

std::string to_csv(const ExperimentConfig& config, const RunTrace& trace);

// Exit status: 0 success, 1 invalid config, 2 unwritable output.
int run(const ExperimentConfig& config, std::ostream& err);

struct CompareRow {
  std::string label;
  double final_mean_gap = 0.0;
  double final_mean_log10_gap = 0.0;
  std::optional<double> bound_hold_fraction;
};

// Configs must share problem and T (ConfigError otherwise).
std::vector<CompareRow> compare(const std::vector<ExperimentConfig>& configs);
std::string format_compare(const std::vector<CompareRow>& rows);

}  // namespace entropic::experiment
