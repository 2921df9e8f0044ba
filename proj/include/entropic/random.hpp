#pragma once

#include <cstdint>
#include <random>

#include "entropic/mirror.hpp"

namespace entropic {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; per-path seeds are mix_seed(master + path_index).
std::uint64_t mix_seed(std::uint64_t x);

// Circularly symmetric complex Gaussian with E|z|^2 = variance
// (real and imaginary parts each variance / 2).
Complex complex_gaussian(Rng& rng, double variance);

// rows x cols matrix of i.i.d. complex_gaussian entries, drawn column-major.
ComplexMatrix complex_gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double variance);

HermitianMatrix random_hermitian(Rng& rng, Eigen::Index n, double scale = 1.0);
// Real symmetric variant (zero imaginary parts).
HermitianMatrix random_symmetric(Rng& rng, Eigen::Index n, double scale = 1.0);

// G G^dagger normalized to trace p, where G is n x r complex Gaussian and the
// rank r is drawn uniformly from 1..n. Covers interior and boundary points.
SpectraPoint random_spectra_point(Rng& rng, Eigen::Index n, double trace_budget = 1.0);
// Same with full rank r = n.
SpectraPoint random_density(Rng& rng, Eigen::Index n, double trace_budget = 1.0);

}  // namespace entropic
