#include <array>
#include <cmath>

#include "doctest.h"
#include "entropic/csvi.hpp"
#include "oracles.hpp"

using namespace entropic;

namespace {

VIOracle constant_oracle(const HermitianMatrix& a) {
  return make_exact_oracle([a](const BlockState&) { return MappingBlocks{a}; }, {spectral_norm(a)});
}

VIOracle affine_oracle(const HermitianMatrix& a, double c) {
  return make_exact_oracle([a](const BlockState& x) { return MappingBlocks{x[0].matrix() - a}; }, {c});
}

}  // namespace

TEST_SUITE("csvi") {

TEST_CASE("initial state") {
  const auto s = AveragedState::initial({2, 3}, {1.0, 2.0}, 0.5);
  CHECK(frobenius_norm(s.current[0].matrix() - SpectraPoint::uniform(2).matrix()) < 1e-15);
  CHECK(frobenius_norm(s.current[1].matrix() - SpectraPoint::uniform(3, 2.0).matrix()) < 1e-15);
  CHECK(s.duals[1](0, 0).real() == doctest::Approx(1.0 / 3.0));
  CHECK(s.gamma == 0.5);
}

TEST_CASE("zero mapping is a fixed point") {
  const auto oracle = make_exact_oracle([](const BlockState&) {
    return MappingBlocks{HermitianMatrix::zero(2), HermitianMatrix::zero(4)};
  }, {1.0, 1.0});
  Rng rng(1);
  const auto r = amsmd_solve(oracle, StepSchedule::harmonic_sqrt(), 50, {2, 4}, {1.0, 3.0}, Variant::amsmd, rng);
  CHECK(frobenius_norm(r.solution[0].matrix() - SpectraPoint::uniform(2).matrix()) < 1e-14);
  CHECK(frobenius_norm(r.solution[1].matrix() - SpectraPoint::uniform(4, 3.0).matrix()) < 1e-14);
}

TEST_CASE("constant mapping telescopes") {
  Rng rng(2);
  const HermitianMatrix a = random_hermitian(rng, 3);
  const auto oracle = constant_oracle(a);
  const auto schedule = StepSchedule::harmonic_sqrt(0.7);
  auto state = AveragedState::from_duals({HermitianMatrix::zero(3)}, {2.0}, schedule(0));
  double eta_sum = 0.0;
  for (std::size_t t = 0; t < 30; ++t) {
    state = amsmd_step(state, oracle, schedule(t), schedule(t + 1), rng, true);
    eta_sum += schedule(t);
  }
  CHECK(frobenius_norm(state.duals[0] + eta_sum * a) <= 1e-12);
  CHECK(frobenius_norm(state.current[0].matrix() - gibbs(-eta_sum * a, 2.0).matrix()) <= 1e-12);
}

TEST_CASE("averaging matches an explicit weighted sum") {
  Rng rng(3);
  const HermitianMatrix a = random_hermitian(rng, 3);
  const auto oracle = affine_oracle(a, 3.0);
  for (const auto& schedule : {StepSchedule::constant(0.2), StepSchedule::harmonic_sqrt(1.0)}) {
    auto state = AveragedState::initial({3}, {1.0}, schedule(0));
    ComplexMatrix weighted = schedule(0) * state.current[0].matrix().matrix();
    double weight = schedule(0);
    for (std::size_t t = 0; t < 200; ++t) {
      state = amsmd_step(state, oracle, schedule(t), schedule(t + 1), rng, true);
      weighted += schedule(t + 1) * state.current[0].matrix().matrix();
      weight += schedule(t + 1);
      CHECK(std::abs(state.gamma - weight) <= 1e-12 * weight);
      CHECK((state.average[0].matrix().matrix() - weighted / weight).norm() <= 1e-10);
    }
  }
}

TEST_CASE("constant step average is the arithmetic mean") {
  Rng rng(4);
  const auto oracle = affine_oracle(random_hermitian(rng, 2), 3.0);
  auto state = AveragedState::initial({2}, {1.0}, 0.3);
  ComplexMatrix sum = state.current[0].matrix().matrix();
  for (int t = 1; t <= 25; ++t) {
    state = amsmd_step(state, oracle, 0.3, 0.3, rng, true);
    sum += state.current[0].matrix().matrix();
  }
  CHECK((state.average[0].matrix().matrix() - sum / 26.0).norm() <= 1e-12);
}

TEST_CASE("single iteration matches one step") {
  Rng rng(5);
  const auto oracle = affine_oracle(random_hermitian(rng, 3), 3.0);
  const auto schedule = StepSchedule::harmonic_sqrt();
  for (Variant v : {Variant::amsmd, Variant::msmd, Variant::mel}) {
    Rng r1(9), r2(9);
    CsviOptions options;
    options.mel_lambda = 0.4;
    const auto res = amsmd_solve(oracle, schedule, 1, {3}, {1.0}, v, r1, options);
    const auto manual = amsmd_step(AveragedState::initial({3}, {1.0}, schedule(0)), oracle, schedule(0), schedule(1), r2,
                                   v == Variant::amsmd, v == Variant::mel ? 0.4 : 0.0);
    CHECK(res.final_state.current[0].matrix() == manual.current[0].matrix());
    CHECK(res.trace.size() == 1);
  }
}

TEST_CASE("mel with zero lambda reproduces msmd bitwise") {
  Rng rng(6);
  const HermitianMatrix a = random_hermitian(rng, 3);
  const double sigma = 0.5;
  VIOracle oracle;
  oracle.exact = [a](const BlockState& x) { return MappingBlocks{x[0].matrix() - a}; };
  oracle.sample = [a, sigma](const BlockState& x, Rng& r) {
    return MappingBlocks{x[0].matrix() - a + HermitianMatrix::symmetrize(complex_gaussian_matrix(r, 3, 3, sigma))};
  };
  oracle.noise_bound = {4.0};
  CsviOptions options;
  options.mel_lambda = 0.0;
  Rng r1(77), r2(77);
  const auto m1 = amsmd_solve(oracle, StepSchedule::harmonic_sqrt(), 300, {3}, {1.0}, Variant::msmd, r1, options);
  const auto m2 = amsmd_solve(oracle, StepSchedule::harmonic_sqrt(), 300, {3}, {1.0}, Variant::mel, r2, options);
  REQUIRE(m1.trace.size() == m2.trace.size());
  for (std::size_t k = 0; k < m1.trace.size(); ++k) CHECK(m1.trace[k].gap == m2.trace[k].gap);
  CHECK(m1.solution[0].matrix() == m2.solution[0].matrix());
}

TEST_CASE("gap closed form") {
  Rng rng(7);
  const HermitianMatrix a = random_hermitian(rng, 3);
  const auto e = eig(a);
  const ComplexMatrix v = e.eigenvectors.col(0);
  const SpectraPoint vmin(HermitianMatrix::symmetrize(2.0 * v * v.adjoint()), 2.0);
  CHECK(gap({vmin}, MappingBlocks{a}) <= 1e-10);

  const std::array<double, 2> d{0.0, 1.0};
  CHECK(gap({SpectraPoint::uniform(2)}, MappingBlocks{HermitianMatrix::diagonal(d)}) == doctest::Approx(0.5));

  for (int trial = 0; trial < 100; ++trial) {
    const BlockState x = random_block_state(rng, {2, 3}, {1.0, 1.5});
    CHECK(gap(x, MappingBlocks{random_hermitian(rng, 2), random_hermitian(rng, 3)}) >= 0.0);
  }

  VIOracle sample_only;
  sample_only.sample = [](const BlockState&, Rng&) { return MappingBlocks{}; };
  CHECK_THROWS_AS(gap({SpectraPoint::uniform(2)}, sample_only), UnsupportedOperation);
}

TEST_CASE("gap agrees with a Bloch-sphere search") {
  Rng rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    const HermitianMatrix f = random_hermitian(rng, 2);
    const SpectraPoint x = random_spectra_point(rng, 2);
    const double brute = (x.matrix().matrix() * f.matrix()).trace().real() - oracle::bloch_min_linear(f.matrix(), 400, 400);
    CHECK(std::abs(gap({x}, MappingBlocks{f}) - brute) <= 1e-3);
  }
}

TEST_CASE("bound arithmetic") {
  CHECK(rate_bound_csvi(1.0, {1}, 9) == doctest::Approx(std::sqrt(std::log(2.0))));
  CHECK(rate_bound_csvi(2.0, {2, 4}, 100) / rate_bound_csvi(2.0, {2, 4}, 400) == doctest::Approx(2.0));
  CHECK(csvi_stepsize(2.0, {3}, 16)(5) == doctest::Approx(std::sqrt(std::log(4.0) / 16.0) / 2.0));
}

TEST_CASE("un-optimized bound with the constant step is four thirds of the closed form") {
  // With eta = sqrt(L/T)/C: 2/(T eta) (L + T eta^2 C^2) = 4 C sqrt(L/T), against 3 C sqrt(L/T).
  const double c = 1.7;
  const std::vector<Eigen::Index> dims{3};
  const std::size_t T = 250;
  const double eta = csvi_stepsize(c, dims, T)(0);
  const double log_term = std::log(4.0);
  CHECK(eta == doctest::Approx(std::sqrt(log_term / T) / c));
  const double expected = 2.0 / (T * eta) * (log_term + T * eta * eta * c * c);
  const double unopt = csvi_unoptimized_bound({c}, dims, std::vector<double>(T, eta));
  CHECK(unopt == doctest::Approx(expected));
  CHECK(unopt == doctest::Approx(4.0 * c * std::sqrt(log_term / T)));
  CHECK(unopt / rate_bound_csvi(c, dims, T) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("noise-free affine VI stays under the bound") {
  Rng rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const HermitianMatrix a = random_hermitian(rng, 2);
    double c = 0.0;
    for (int k = 0; k < 2000; ++k) c = std::max(c, spectral_norm(random_spectra_point(rng, 2).matrix() - a));
    const auto oracle = affine_oracle(a, c);
    for (std::size_t T : {100u, 1000u}) {
      Rng run(1);
      const auto r = amsmd_solve(oracle, csvi_stepsize(c, {2}, T), T, {2}, {1.0}, Variant::amsmd, run);
      CHECK(r.trace.back().gap <= rate_bound_csvi(c, {2}, T));
    }
  }
}

TEST_CASE("check_monotone separates monotone and anti-monotone maps") {
  Rng rng(10);
  const HermitianMatrix a = random_hermitian(rng, 3);
  auto sampler = [](Rng& r) { return random_block_state(r, {3}, {1.0}); };
  const double up = check_monotone([a](const BlockState& x) { return MappingBlocks{x[0].matrix() + a}; }, sampler, 200, rng);
  const double down = check_monotone([](const BlockState& x) { return MappingBlocks{-x[0].matrix()}; }, sampler, 200, rng);
  CHECK(up >= 0.0);
  CHECK(down < -1e-8);
}

TEST_CASE("warm start keeps the best iterate") {
  Rng rng(11);
  const auto oracle = affine_oracle(random_hermitian(rng, 3), 3.0);
  const auto schedule = StepSchedule::harmonic_sqrt();
  Rng r1(5);
  const auto init = warm_start(oracle, schedule, 100, {3}, {1.0}, Variant::amsmd, r1);
  const double g0 = gap(AveragedState::initial({3}, {1.0}, 1.0).current, oracle);
  CHECK(gap(init.current, oracle) <= g0);
  CHECK(init.average[0].matrix() == init.current[0].matrix());
  CsviOptions options;
  options.init = init;
  Rng r2(5);
  const auto res = amsmd_solve(oracle, schedule, 20, {3}, {1.0}, Variant::amsmd, r2, options);
  CHECK(res.trace.back().t == 20);
}

TEST_CASE("noise bound estimate covers sampled norms") {
  Rng rng(12);
  const HermitianMatrix a = random_hermitian(rng, 2);
  const auto oracle = affine_oracle(a, 1.0);
  const auto c = estimate_noise_bound(oracle.sample, {2}, {1.0}, 500, rng);
  for (int k = 0; k < 200; ++k) {
    const BlockState x = random_block_state(rng, {2}, {1.0});
    CHECK(spectral_norm(oracle.exact(x)[0]) <= c[0]);
  }
}

}  // TEST_SUITE
