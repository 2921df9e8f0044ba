#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "entropic/csvi.hpp"

namespace entropic::mimo {

inline constexpr std::size_t kHexCells = 7;
inline constexpr double kDirectLinkDistance = 0.8944;

// Transmitter-to-receiver distances in km, indexed [transmitter][receiver].
using DistanceMatrix = std::vector<std::vector<double>>;

// Seven-cell hexagonal layout, one link per cell.
DistanceMatrix hex_cell_distances();

// channels[j][i] = H_ji, the m_i x n_j matrix from transmitter j to receiver i.
using ChannelSet = std::vector<std::vector<ComplexMatrix>>;

struct MimoNetwork {
  std::vector<Eigen::Index> tx_antennas;  // n_i
  std::vector<Eigen::Index> rx_antennas;  // m_i
  ChannelSet channels;
  std::vector<double> power;  // trace budget p_i
  double noise_variance = 0.0;

  std::size_t players() const { return tx_antennas.size(); }
  // Throws std::invalid_argument on inconsistent shapes or budgets.
  void validate() const;
};

enum class PowerMode { dbm, unit };

// 1 dBm as a linear trace budget (10^0.1), or 1.
double power_budget(PowerMode mode);

// Each entry of H_ji is CN(0, 1 / dhat^2) with dhat = d(j, i) / 0.8944.
// Draw order: transmitter j, then receiver i, then entries column-major.
ChannelSet generate_channels(const DistanceMatrix& distances, Eigen::Index n, Eigen::Index m, Rng& rng);

// Receiver i covariance I + sum_j H_ji X_j H_ji^dagger, optionally skipping
// transmitter `skip`.
HermitianMatrix receiver_covariance(std::size_t i, const BlockState& x, const MimoNetwork& net,
                                    std::size_t skip = static_cast<std::size_t>(-1));

// R_i = log det(I + sum_j H_ji X_j H_ji^dagger) - log det(W_{-i}).
double payoff(std::size_t i, const BlockState& x, const MimoNetwork& net);
std::vector<double> payoffs(const BlockState& x, const MimoNetwork& net);

// F_i(X) = -H_ii^dagger W_i^{-1} H_ii.
MappingBlocks exact_mapping(const BlockState& x, const MimoNetwork& net);

// Phi_i = F_i(X) + (Z_i + Z_i^dagger) / 2 with Z_i entries CN(0, sigma).
// noise_bound is estimated from `draws` random feasible states.
VIOracle noisy_oracle(const MimoNetwork& net, Rng& rng, std::size_t draws = 200);

// Seven players with n transmit / m receive antennas over the seven-cell layout.
MimoNetwork build_hex_network(Eigen::Index n, Eigen::Index m, double sigma, std::uint64_t seed,
                                PowerMode power_mode = PowerMode::dbm);

}  // namespace entropic::mimo
