#include "entropic/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace entropic::experiment {

std::string to_string(Problem p) {
  switch (p) {
    case Problem::mimo: return "mimo";
    case Problem::linear_sum: return "linear_sum";
    case Problem::covariance: return "covariance";
    case Problem::affine_vi: return "affine_vi";
  }
  return "unknown";
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::amsmd: return "amsmd";
    case Algorithm::msmd: return "msmd";
    case Algorithm::mel: return "mel";
    case Algorithm::mdis: return "mdis";
  }
  return "unknown";
}

namespace {

std::string format_double(double x) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, result.ptr);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

Problem parse_problem(const std::string& v) {
  if (v == "mimo") return Problem::mimo;
  if (v == "linear_sum") return Problem::linear_sum;
  if (v == "covariance") return Problem::covariance;
  if (v == "affine_vi") return Problem::affine_vi;
  throw std::invalid_argument("expected mimo, linear_sum, covariance or affine_vi");
}

Algorithm parse_algorithm(const std::string& v) {
  if (v == "amsmd") return Algorithm::amsmd;
  if (v == "msmd") return Algorithm::msmd;
  if (v == "mel") return Algorithm::mel;
  if (v == "mdis") return Algorithm::mdis;
  throw std::invalid_argument("expected amsmd, msmd, mel or mdis");
}

mimo::PowerMode parse_power_mode(const std::string& v) {
  if (v == "dbm") return mimo::PowerMode::dbm;
  if (v == "unit") return mimo::PowerMode::unit;
  throw std::invalid_argument("expected dbm or unit");
}

template <typename T>
T require_number(const std::string& key, const std::string& value) {
  T out{};
  if (!parse_number(value, out)) throw std::invalid_argument("'" + value + "' is not a valid number for " + key);
  return out;
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& value) {
  using std::size_t;
  if (key == "problem") c.problem = parse_problem(value);
  else if (key == "algorithm") c.algorithm = parse_algorithm(value);
  else if (key == "n") c.n = require_number<Eigen::Index>(key, value);
  else if (key == "m") c.m = require_number<Eigen::Index>(key, value);
  else if (key == "sigma") c.sigma = require_number<double>(key, value);
  else if (key == "T") c.T = require_number<size_t>(key, value);
  else if (key == "paths") c.paths = require_number<size_t>(key, value);
  else if (key == "seed") c.seed = require_number<std::uint64_t>(key, value);
  else if (key == "instance_seed") c.instance_seed = require_number<std::uint64_t>(key, value);
  else if (key == "schedule") c.schedule = parse_schedule_kind(value);
  else if (key == "step_scale") {
    if (value == "auto") c.step_scale.reset();
    else c.step_scale = require_number<double>(key, value);
  } else if (key == "mel_lambda") c.mel_lambda = require_number<double>(key, value);
  else if (key == "gap_stride") c.gap_stride = require_number<size_t>(key, value);
  else if (key == "power_mode") c.power_mode = parse_power_mode(value);
  else if (key == "output_path" || key == "output") c.output_path = value;
  else if (key == "warm_start_iters") c.warm_start_iters = require_number<size_t>(key, value);
  else if (key == "agents") c.agents = require_number<size_t>(key, value);
  else if (key == "samples") c.samples = require_number<size_t>(key, value);
  else if (key == "penalty") c.penalty = require_number<double>(key, value);
  else if (key == "noise_bound") {
    if (value == "auto") c.noise_bound.reset();
    else c.noise_bound = require_number<double>(key, value);
  } else throw std::out_of_range("unknown key");
}

void apply_checked(ExperimentConfig& c, const std::string& key, const std::string& value, const std::string& where) {
  try {
    apply(c, key, value);
  } catch (const std::out_of_range&) {
    throw ConfigError(where + ": unknown key '" + key + "'");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": key " + key + ": " + e.what());
  }
}

}  // namespace

ScheduleKind ExperimentConfig::effective_schedule() const {
  if (schedule) return *schedule;
  return algorithm == Algorithm::mel ? ScheduleKind::harmonic : ScheduleKind::harmonic_sqrt;
}

std::string ExperimentConfig::label() const {
  if (algorithm == Algorithm::mel) return "mel:" + format_double(mel_lambda);
  return to_string(algorithm);
}

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(lineno) + " '" + trim(line) + "'";
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    apply_checked(c, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), where);
  }
  for (const auto& [key, value] : overrides) apply_checked(c, key, value, "flag --" + key);
  return c;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  if (c.T < 1) v.emplace_back("T must be >= 1");
  if (c.paths < 1) v.emplace_back("paths must be >= 1");
  if (!(c.sigma >= 0.0)) v.emplace_back("sigma must be >= 0");
  if (!(c.mel_lambda >= 0.0)) v.emplace_back("mel_lambda must be >= 0");
  if (c.gap_stride < 1) v.emplace_back("gap_stride must be >= 1");
  if (c.n < 1) v.emplace_back("n must be >= 1");
  if (c.m < 1) v.emplace_back("m must be >= 1");
  if (c.step_scale && !(*c.step_scale > 0.0)) v.emplace_back("step_scale must be > 0");
  if (c.noise_bound && !(*c.noise_bound > 0.0)) v.emplace_back("noise_bound must be > 0");
  if (!(c.penalty >= 0.0)) v.emplace_back("penalty must be >= 0");
  const bool finite_sum = c.problem == Problem::linear_sum || c.problem == Problem::covariance;
  if (finite_sum && c.algorithm != Algorithm::mdis)
    v.emplace_back("problem " + to_string(c.problem) + " requires algorithm=mdis");
  if (!finite_sum && c.algorithm == Algorithm::mdis)
    v.emplace_back("algorithm mdis requires problem linear_sum or covariance");
  if (finite_sum && c.agents < 1) v.emplace_back("agents must be >= 1");
  if (c.problem == Problem::covariance && c.samples < 2) v.emplace_back("samples must be >= 2");
  if (finite_sum && c.warm_start_iters > 0) v.emplace_back("warm_start_iters applies to VI problems only");
  return v;
}

std::string dump_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "problem=" << to_string(c.problem) << "\n"
      << "algorithm=" << to_string(c.algorithm) << "\n"
      << "n=" << c.n << "\n"
      << "m=" << c.m << "\n"
      << "sigma=" << format_double(c.sigma) << "\n"
      << "T=" << c.T << "\n"
      << "paths=" << c.paths << "\n"
      << "seed=" << c.seed << "\n"
      << "instance_seed=" << c.effective_instance_seed() << "\n"
      << "schedule=" << to_string(c.effective_schedule()) << "\n"
      << "step_scale=" << (c.step_scale ? format_double(*c.step_scale) : std::string("auto")) << "\n"
      << "mel_lambda=" << format_double(c.mel_lambda) << "\n"
      << "gap_stride=" << c.gap_stride << "\n"
      << "power_mode=" << (c.power_mode == mimo::PowerMode::dbm ? "dbm" : "unit") << "\n"
      << "warm_start_iters=" << c.warm_start_iters << "\n"
      << "agents=" << c.agents << "\n"
      << "samples=" << c.samples << "\n"
      << "penalty=" << format_double(c.penalty) << "\n"
      << "noise_bound=" << (c.noise_bound ? format_double(*c.noise_bound) : std::string("auto")) << "\n";
  return out.str();
}

std::uint64_t path_seed(std::uint64_t master, std::size_t path_index) {
  return mix_seed(master + static_cast<std::uint64_t>(path_index));
}

namespace {

constexpr std::uint64_t kNoiseBoundStream = 0xC0FFEE;
constexpr std::size_t kReferenceFactor = 50;

struct CsviInstance {
  VIOracle oracle;
  std::vector<Eigen::Index> dims;
  std::vector<double> budgets;
  std::function<std::vector<double>(const BlockState&)> metrics;
};

CsviInstance make_csvi_instance(const ExperimentConfig& c) {
  CsviInstance inst;
  Rng estimator(mix_seed(c.effective_instance_seed() ^ kNoiseBoundStream));
  if (c.problem == Problem::mimo) {
    const auto net = mimo::build_hex_network(c.n, c.m, c.sigma, c.effective_instance_seed(), c.power_mode);
    inst.oracle = mimo::noisy_oracle(net, estimator);
    inst.dims = net.tx_antennas;
    inst.budgets = net.power;
    inst.metrics = [net](const BlockState& x) { return mimo::payoffs(x, net); };
  } else {
    Rng rng(c.effective_instance_seed());
    const HermitianMatrix a = random_hermitian(rng, c.n);
    const double sigma = c.sigma;
    const Eigen::Index n = c.n;
    inst.oracle.exact = [a](const BlockState& x) { return MappingBlocks{x[0].matrix() - a}; };
    inst.oracle.sample = [a, sigma, n](const BlockState& x, Rng& r) {
      MappingBlocks phi{x[0].matrix() - a};
      if (sigma > 0.0) phi[0] += HermitianMatrix::symmetrize(complex_gaussian_matrix(r, n, n, sigma));
      return phi;
    };
    inst.dims = {c.n};
    inst.budgets = {1.0};
    inst.oracle.noise_bound = estimate_noise_bound(inst.oracle.sample, inst.dims, inst.budgets, 2000, estimator);
  }
  if (c.noise_bound) inst.oracle.noise_bound.assign(inst.dims.size(), *c.noise_bound);
  return inst;
}

double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

StepSchedule csvi_schedule(const ExperimentConfig& c, const CsviInstance& inst) {
  const ScheduleKind kind = c.effective_schedule();
  if (c.step_scale) return StepSchedule(kind, *c.step_scale, c.T);
  if (kind == ScheduleKind::constant_horizon) return csvi_stepsize(sum_of(inst.oracle.noise_bound), inst.dims, c.T);
  return StepSchedule(kind, 1.0, c.T);
}

std::vector<TraceRow> run_csvi_path(const ExperimentConfig& c, const CsviInstance& inst, std::size_t path) {
  const std::uint64_t seed = path_seed(c.seed, path);
  Rng rng(seed);
  const StepSchedule schedule = csvi_schedule(c, inst);
  const Variant variant = c.algorithm == Algorithm::amsmd  ? Variant::amsmd
                          : c.algorithm == Algorithm::msmd ? Variant::msmd
                                                           : Variant::mel;
  CsviOptions options;
  options.gap_stride = c.gap_stride;
  options.mel_lambda = c.mel_lambda;
  options.metrics = inst.metrics;
  if (c.warm_start_iters > 0)
    options.init = warm_start(inst.oracle, schedule, c.warm_start_iters, inst.dims, inst.budgets, variant, rng,
                              c.mel_lambda);
  const CsviResult result = amsmd_solve(inst.oracle, schedule, c.T, inst.dims, inst.budgets, variant, rng, options);

  std::vector<TraceRow> rows;
  rows.reserve(result.trace.size());
  for (const auto& r : result.trace) {
    TraceRow row;
    row.algorithm = c.label();
    row.seed = seed;
    row.path = path;
    row.t = r.t;
    row.gap = r.gap;
    row.log10_gap = std::log10(std::max(r.gap, 1e-300));
    row.bound = r.bound;
    row.payoffs = r.metrics;
    if (!r.metrics.empty()) row.value = sum_of(r.metrics);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct FiniteSumInstance {
  std::vector<ComponentObjective> objectives;
  SpectraPoint x0 = SpectraPoint::uniform(1);
  double optimal_value = 0.0;
};

FiniteSumInstance make_finite_sum_instance(const ExperimentConfig& c) {
  Rng rng(c.effective_instance_seed());
  FiniteSumInstance inst;
  inst.x0 = SpectraPoint::uniform(c.n);
  if (c.problem == Problem::linear_sum) {
    HermitianMatrix total = HermitianMatrix::zero(c.n);
    for (std::size_t i = 0; i < c.agents; ++i) {
      const HermitianMatrix a = random_density(rng, c.n).matrix();
      total += a;
      inst.objectives.push_back(make_linear_objective(a));
    }
    inst.optimal_value = lambda_min(total);
    return inst;
  }

  // Gaussian samples around a random SPD covariance, split across agents.
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(c.n, c.n);
  for (Eigen::Index v = 0; v < c.n; ++v)
    for (Eigen::Index u = 0; u < c.n; ++u) g(u, v) = normal(rng);
  const Eigen::MatrixXd truth = g * g.transpose() / static_cast<double>(c.n) + Eigen::MatrixXd::Identity(c.n, c.n);
  const Eigen::MatrixXd chol = truth.llt().matrixL();
  std::vector<HermitianMatrix> covariances;
  for (std::size_t i = 0; i < c.agents; ++i) {
    Eigen::MatrixXd z(static_cast<Eigen::Index>(c.samples), c.n);
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      Eigen::VectorXd e(c.n);
      for (Eigen::Index k = 0; k < c.n; ++k) e(k) = normal(rng);
      z.row(r) = (chol * e).transpose();
    }
    covariances.push_back(sample_covariance(z));
  }
  covariances = normalize_covariances(covariances);
  Eigen::MatrixXd weights = Eigen::MatrixXd::Ones(c.n, c.n) - Eigen::MatrixXd::Identity(c.n, c.n);
  inst.objectives = make_covariance_objective(covariances, c.penalty, weights);
  if (c.penalty == 0.0) inst.optimal_value = total_value(inst.objectives, covariance_optimum(covariances));
  return inst;
}

StepSchedule mdis_schedule(const ExperimentConfig& c, const FiniteSumInstance& inst);

// With a penalty there is no closed form; the same deterministic trajectory
// run 50x longer supplies the reference value.
void attach_reference_value(const ExperimentConfig& c, FiniteSumInstance& inst) {
  if (c.problem != Problem::covariance || c.penalty == 0.0) return;
  MDISOptions options;
  options.record_stride = kReferenceFactor * c.T;
  inst.optimal_value =
      mdis_solve(inst.objectives, mdis_schedule(c, inst), kReferenceFactor * c.T, inst.x0, options).best_value;
}

StepSchedule mdis_schedule(const ExperimentConfig& c, const FiniteSumInstance& inst) {
  const ScheduleKind kind = c.effective_schedule();
  if (c.step_scale) return StepSchedule(kind, *c.step_scale, c.T);
  if (kind == ScheduleKind::constant_horizon)
    return mdis_stepsize(total_lipschitz(inst.objectives), std::log(static_cast<double>(c.n)), c.n, c.T);
  return StepSchedule(kind, 1.0, c.T);
}

std::vector<TraceRow> run_mdis_path(const ExperimentConfig& c, const FiniteSumInstance& inst, std::size_t path) {
  MDISOptions options;
  options.optimal_value = inst.optimal_value;
  options.initial_divergence = std::log(static_cast<double>(c.n));
  options.record_stride = c.gap_stride;
  const MDISResult result = mdis_solve(inst.objectives, mdis_schedule(c, inst), c.T, inst.x0, options);
  std::vector<TraceRow> rows;
  for (const auto& r : result.trace) {
    TraceRow row;
    row.algorithm = c.label();
    row.seed = path_seed(c.seed, path);
    row.path = path;
    row.t = r.t;
    row.gap = std::max(r.suboptimality.value_or(0.0), 0.0);
    row.log10_gap = std::log10(std::max(row.gap, 1e-300));
    row.value = r.value;
    row.bound = r.bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t thread_cap(std::size_t paths) {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ENTROPIC_SPECTRA_THREADS")) {
    std::size_t parsed = 0;
    if (parse_number(std::string(env), parsed) && parsed > 0) cap = parsed;
  }
  return std::min(cap, paths);
}

std::vector<TraceRow> aggregate_rows(const ExperimentConfig& c, const std::vector<std::vector<TraceRow>>& per_path) {
  std::vector<TraceRow> out;
  if (per_path.empty()) return out;
  const double count = static_cast<double>(per_path.size());
  for (std::size_t k = 0; k < per_path.front().size(); ++k) {
    const TraceRow& first = per_path.front()[k];
    TraceRow mean;
    mean.aggregate = true;
    mean.algorithm = first.algorithm;
    mean.seed = c.seed;
    mean.t = first.t;
    mean.payoffs.assign(first.payoffs.size(), 0.0);
    double gap = 0.0, log_gap = 0.0, value = 0.0, bound = 0.0;
    for (const auto& path : per_path) {
      const TraceRow& r = path[k];
      gap += r.gap;
      log_gap += r.log10_gap;
      value += r.value.value_or(0.0);
      bound += r.bound.value_or(0.0);
      for (std::size_t i = 0; i < mean.payoffs.size(); ++i) mean.payoffs[i] += r.payoffs[i];
    }
    mean.gap = gap / count;
    mean.log10_gap = log_gap / count;
    if (first.value) mean.value = value / count;
    if (first.bound) mean.bound = bound / count;
    for (auto& p : mean.payoffs) p /= count;
    out.push_back(std::move(mean));
  }
  return out;
}

}  // namespace

RunTrace execute(const ExperimentConfig& c) {
  const auto violations = validate(c);
  if (!violations.empty()) throw ConfigError("invalid config: " + violations.front());

  std::vector<std::vector<TraceRow>> per_path(c.paths);
  std::function<std::vector<TraceRow>(std::size_t)> run_path;
  std::optional<CsviInstance> csvi;
  std::optional<FiniteSumInstance> finite;
  if (c.algorithm == Algorithm::mdis) {
    finite = make_finite_sum_instance(c);
    attach_reference_value(c, *finite);
    run_path = [&](std::size_t p) { return run_mdis_path(c, *finite, p); };
  } else {
    csvi = make_csvi_instance(c);
    run_path = [&](std::size_t p) { return run_csvi_path(c, *csvi, p); };
  }

  const std::size_t workers = thread_cap(c.paths);
  if (workers <= 1) {
    for (std::size_t p = 0; p < c.paths; ++p) per_path[p] = run_path(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t p = next++; p < c.paths; p = next++) per_path[p] = run_path(p);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  RunTrace trace;
  for (auto& rows : per_path)
    for (auto& r : rows) trace.rows.push_back(r);
  trace.aggregate = aggregate_rows(c, per_path);
  return trace;
}

namespace {

void write_row(std::ostream& out, const TraceRow& r) {
  out << (r.aggregate ? "mean" : "path") << ',' << r.algorithm << ',' << r.seed << ',';
  if (!r.aggregate) out << r.path;
  out << ',' << r.t << ',' << format_double(r.gap) << ',' << format_double(r.log10_gap) << ',';
  if (r.value) out << format_double(*r.value);
  out << ',';
  if (r.bound) out << format_double(*r.bound);
  out << ',';
  for (std::size_t i = 0; i < r.payoffs.size(); ++i) out << (i ? ";" : "") << format_double(r.payoffs[i]);
  out << '\n';
}

}  // namespace

std::string to_csv(const ExperimentConfig& c, const RunTrace& trace) {
  std::ostringstream out;
  out << kSchemaLine << '\n';
  std::istringstream cfg(dump_config(c));
  std::string line;
  while (std::getline(cfg, line)) out << "#config " << line << '\n';
  out << kCsvHeader << '\n';
  for (const auto& r : trace.rows) write_row(out, r);
  for (const auto& r : trace.aggregate) write_row(out, r);
  return out.str();
}

int run(const ExperimentConfig& c, std::ostream& err) {
  const auto violations = validate(c);
  if (!violations.empty()) {
    err << "invalid config:\n";
    for (const auto& v : violations) err << "  " << v << '\n';
    return 1;
  }
  std::ofstream out(c.output_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    err << "cannot write output file '" << c.output_path << "'\n";
    return 2;
  }
  const RunTrace trace = execute(c);
  out << to_csv(c, trace);
  out.close();
  if (!out) {
    err << "failed writing output file '" << c.output_path << "'\n";
    return 2;
  }
  return 0;
}

std::vector<CompareRow> compare(const std::vector<ExperimentConfig>& configs) {
  if (configs.empty()) throw ConfigError("compare: no configs given");
  for (const auto& c : configs) {
    if (c.problem != configs.front().problem) throw ConfigError("compare: configs use different problems");
    if (c.T != configs.front().T) throw ConfigError("compare: configs use different T");
  }
  std::vector<CompareRow> out;
  for (const auto& c : configs) {
    const RunTrace trace = execute(c);
    CompareRow row;
    row.label = c.label();
    if (!trace.aggregate.empty()) {
      row.final_mean_gap = trace.aggregate.back().gap;
      row.final_mean_log10_gap = trace.aggregate.back().log10_gap;
    }
    std::size_t with_bound = 0, held = 0;
    for (const auto& r : trace.rows)
      if (r.bound) {
        ++with_bound;
        if (r.gap <= *r.bound) ++held;
      }
    if (with_bound > 0) row.bound_hold_fraction = static_cast<double>(held) / static_cast<double>(with_bound);
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_compare(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "label,final_mean_gap,final_mean_log10_gap,bound_hold_fraction\n";
  for (const auto& r : rows) {
    out << r.label << ',' << format_double(r.final_mean_gap) << ',' << format_double(r.final_mean_log10_gap) << ',';
    if (r.bound_hold_fraction) out << format_double(*r.bound_hold_fraction);
    out << '\n';
  }
  return out.str();
}

}  // namespace entropic::experiment
