#include "entropic/random.hpp"

#include <cmath>

namespace entropic {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Complex complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

ComplexMatrix complex_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double variance) {
  ComplexMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_gaussian(rng, variance);
  return m;
}

HermitianMatrix random_hermitian(Rng& rng, Eigen::Index n, double scale) {
  return HermitianMatrix::symmetrize(complex_gaussian_matrix(rng, n, n, 2.0) * scale);
}

HermitianMatrix random_symmetric(Rng& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) g(r, c) = normal(rng);
  return HermitianMatrix::symmetrize((g * scale).cast<Complex>());
}

namespace {

SpectraPoint density_of_rank(Rng& rng, Eigen::Index n, Eigen::Index rank, double trace_budget) {
  const ComplexMatrix g = complex_gaussian_matrix(rng, n, rank, 1.0);
  HermitianMatrix x = HermitianMatrix::symmetrize(g * g.adjoint());
  x *= trace_budget / x.trace();
  return SpectraPoint(std::move(x), trace_budget);
}

}  // namespace

SpectraPoint random_spectra_point(Rng& rng, Eigen::Index n, double trace_budget) {
  std::uniform_int_distribution<Eigen::Index> rank(1, n);
  return density_of_rank(rng, n, rank(rng), trace_budget);
}

SpectraPoint random_density(Rng& rng, Eigen::Index n, double trace_budget) {
  return density_of_rank(rng, n, n, trace_budget);
}

}  // namespace entropic
