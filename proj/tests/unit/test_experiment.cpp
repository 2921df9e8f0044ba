#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "entropic/experiment.hpp"

using namespace entropic;
using namespace entropic::experiment;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream in(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(split(line, ','));
  }
  return rows;
}

ExperimentConfig small_mimo() {
  return parse_config("T=60\npaths=3\nsigma=1\ngap_stride=20\nseed=3\n");
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("defaults and precedence") {
  const auto c = parse_config("");
  CHECK(c.T == 4000);
  CHECK(c.paths == 10);
  CHECK(c.sigma == 1.0);
  CHECK(c.effective_schedule() == ScheduleKind::harmonic_sqrt);
  CHECK(c.gap_stride == 10);
  CHECK(c.power_mode == mimo::PowerMode::dbm);
  CHECK(c.problem == Problem::mimo);
  CHECK(parse_config("sigma=1\n", {{"sigma", "5"}}).sigma == 5.0);
  CHECK(parse_config("# comment\n  T = 12  # trailing\n").T == 12);
  CHECK(parse_config("algorithm=mel\n").effective_schedule() == ScheduleKind::harmonic);
  CHECK(parse_config("algorithm=mel\nmel_lambda=0.5\n").label() == "mel:0.5");
}

TEST_CASE("parse errors name the key and line") {
  try {
    parse_config("n=2\nT=abc\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("T") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("colour=red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("justtext\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("", {{"paths", "-1"}}), ConfigError);
}

TEST_CASE("validation") {
  CHECK(validate(parse_config("")).empty());
  CHECK_FALSE(validate(parse_config("T=0\n")).empty());
  CHECK_FALSE(validate(parse_config("paths=0\n")).empty());
  CHECK_FALSE(validate(parse_config("sigma=-1\n")).empty());
  CHECK_FALSE(validate(parse_config("mel_lambda=-0.1\n")).empty());
  CHECK_FALSE(validate(parse_config("problem=linear_sum\nalgorithm=amsmd\n")).empty());
  CHECK_FALSE(validate(parse_config("problem=mimo\nalgorithm=mdis\n")).empty());
  CHECK(validate(parse_config("problem=covariance\nalgorithm=mdis\n")).empty());
}

TEST_CASE("dumped config parses back to the same dump") {
  const auto c = parse_config("algorithm=mel\nmel_lambda=0.25\nsigma=0.5\nstep_scale=0.3\nseed=99\n");
  const std::string dumped = dump_config(c);
  CHECK(dump_config(parse_config(dumped)) == dumped);
}

TEST_CASE("single row run") {
  const auto c = parse_config("T=1\npaths=1\n");
  const std::string csv = to_csv(c, execute(c));
  CHECK(csv.rfind(std::string(kSchemaLine) + "\n", 0) == 0);
  CHECK(csv.find(std::string(kCsvHeader) + "\n") != std::string::npos);
  const auto rows = data_rows(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "path");
  CHECK(rows[1][0] == "mean");
  CHECK(rows[0][4] == "1");
}

TEST_CASE("trace invariants") {
  const auto c = small_mimo();
  const RunTrace trace = execute(c);
  REQUIRE(trace.rows.size() == 9);
  REQUIRE(trace.aggregate.size() == 3);
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    const auto& r = trace.rows[k];
    CHECK(r.gap >= 0.0);
    CHECK(r.log10_gap == std::log10(std::max(r.gap, 1e-300)));
    CHECK(r.path == k / 3);
    CHECK(r.seed == path_seed(c.seed, r.path));
    CHECK(r.payoffs.size() == 7);
    if (k % 3 > 0) CHECK(r.t > trace.rows[k - 1].t);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    double gap = 0.0, lg = 0.0;
    for (std::size_t p = 0; p < 3; ++p) {
      gap += trace.rows[p * 3 + k].gap;
      lg += trace.rows[p * 3 + k].log10_gap;
    }
    CHECK(std::abs(trace.aggregate[k].gap - gap / 3.0) <= 1e-12);
    CHECK(std::abs(trace.aggregate[k].log10_gap - lg / 3.0) <= 1e-12);
  }
}

TEST_CASE("csv is deterministic and independent of thread count") {
  const auto c = small_mimo();
  setenv("ENTROPIC_SPECTRA_THREADS", "1", 1);
  const std::string serial = to_csv(c, execute(c));
  setenv("ENTROPIC_SPECTRA_THREADS", "3", 1);
  const std::string parallel = to_csv(c, execute(c));
  unsetenv("ENTROPIC_SPECTRA_THREADS");
  CHECK(serial == parallel);
  CHECK(to_csv(c, execute(c)) == serial);
}

TEST_CASE("path seeds are distinct") {
  std::map<std::uint64_t, int> seen;
  for (std::size_t p = 0; p < 1000; ++p) ++seen[path_seed(7, p)];
  CHECK(seen.size() == 1000);
  CHECK(path_seed(7, 0) == mix_seed(7));
}

TEST_CASE("finite-sum problems") {
  const auto lin = parse_config("problem=linear_sum\nalgorithm=mdis\nn=4\nagents=5\nT=200\npaths=1\ngap_stride=50\nschedule=constant_horizon\n");
  const auto trace = execute(lin);
  REQUIRE(trace.rows.size() == 4);
  for (const auto& r : trace.rows) {
    REQUIRE(r.bound);
    CHECK(r.gap <= *r.bound);
    REQUIRE(r.value);
  }
  const auto cov = parse_config("problem=covariance\nalgorithm=mdis\nn=3\nagents=3\nT=100\npaths=1\ngap_stride=50\n");
  const auto ct = execute(cov);
  CHECK(ct.rows.back().gap >= 0.0);
  CHECK(ct.rows.back().payoffs.empty());
}

TEST_CASE("affine VI problem and warm start") {
  const auto c = parse_config("problem=affine_vi\nn=3\nsigma=0.2\nT=100\npaths=2\ngap_stride=50\nwarm_start_iters=30\n");
  const auto trace = execute(c);
  CHECK(trace.rows.size() == 4);
  CHECK_FALSE(trace.rows.front().value);
}

TEST_CASE("run exit codes") {
  std::ostringstream err;
  auto bad = parse_config("T=0\n");
  CHECK(run(bad, err) == 1);
  CHECK(err.str().find("T must be") != std::string::npos);
  auto c = parse_config("T=1\npaths=1\noutput_path=/nonexistent-dir/out.csv\n");
  CHECK(run(c, err) == 2);
  c.output_path = "experiment_run_test.csv";
  CHECK(run(c, err) == 0);
  std::ifstream in(c.output_path);
  CHECK(in.good());
  std::remove(c.output_path.c_str());
}

TEST_CASE("compare") {
  const auto base = small_mimo();
  const auto one = compare({base});
  REQUIRE(one.size() == 1);
  CHECK(one[0].label == "amsmd");
  REQUIRE(one[0].bound_hold_fraction);

  auto msmd = base;
  msmd.algorithm = Algorithm::msmd;
  auto mel0 = base;
  mel0.algorithm = Algorithm::mel;
  mel0.mel_lambda = 0.0;
  mel0.schedule = ScheduleKind::harmonic_sqrt;
  const auto rows = compare({msmd, mel0});
  CHECK(rows[0].label == "msmd");
  CHECK(rows[1].label == "mel:0");
  CHECK(rows[0].final_mean_gap == rows[1].final_mean_gap);
  CHECK(rows[0].final_mean_log10_gap == rows[1].final_mean_log10_gap);
  CHECK(rows[0].bound_hold_fraction == rows[1].bound_hold_fraction);

  auto other = base;
  other.problem = Problem::affine_vi;
  CHECK_THROWS_AS(compare({base, other}), ConfigError);
  auto longer = base;
  longer.T = 61;
  CHECK_THROWS_AS(compare({base, longer}), ConfigError);
  CHECK(format_compare(one).find("amsmd,") != std::string::npos);
}

}  // TEST_SUITE
