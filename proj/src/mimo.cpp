#include "entropic/mimo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace entropic::mimo {

namespace {

constexpr double kDeterminantFloor = 1e-12;

// clang-format off
constexpr std::array<std::array<double, kHexCells>, kHexCells> kDistances{{
    //  R1      R2      R3      R4      R5      R6      R7
    {0.8944, 1.0143, 1.0568, 1.1020, 1.0143, 1.0568, 1.1020},  // T1
    {1.0143, 0.8944, 1.0568, 2.1079, 2.6940, 2.6677, 1.9964},  // T2
    {1.1020, 1.9011, 0.8944, 1.0143, 2.1079, 2.7265, 2.7203},  // T3
    {1.9964, 2.6159, 1.9493, 0.8944, 1.1020, 2.1056, 2.7620},  // T4
    {2.5635, 2.6940, 2.6677, 1.9964, 0.8944, 1.0568, 2.1079},  // T5
    {2.5270, 2.1079, 2.7265, 2.7203, 1.9011, 0.8944, 1.0143},  // T6
    {1.9011, 1.1020, 2.1056, 2.7620, 2.6159, 1.9493, 0.8944},  // T7
}};
// clang-format on

}  // namespace

DistanceMatrix hex_cell_distances() {
  DistanceMatrix d(kHexCells, std::vector<double>(kHexCells));
  for (std::size_t j = 0; j < kHexCells; ++j)
    for (std::size_t i = 0; i < kHexCells; ++i) d[j][i] = kDistances[j][i];
  return d;
}

void MimoNetwork::validate() const {
  const std::size_t n = players();
  if (rx_antennas.size() != n || power.size() != n || channels.size() != n)
    throw std::invalid_argument("MimoNetwork: per-player arrays differ in length");
  if (!(noise_variance >= 0.0)) throw std::invalid_argument("MimoNetwork: noise variance must be nonnegative");
  for (std::size_t j = 0; j < n; ++j) {
    if (!(power[j] > 0.0)) throw std::invalid_argument("MimoNetwork: power budget must be positive");
    if (channels[j].size() != n) throw std::invalid_argument("MimoNetwork: channel set is not N x N");
    for (std::size_t i = 0; i < n; ++i)
      if (channels[j][i].rows() != rx_antennas[i] || channels[j][i].cols() != tx_antennas[j])
        throw std::invalid_argument("MimoNetwork: channel H_" + std::to_string(j) + std::to_string(i) +
                                    " has the wrong shape");
  }
}

double power_budget(PowerMode mode) { return mode == PowerMode::dbm ? std::pow(10.0, 0.1) : 1.0; }

ChannelSet generate_channels(const DistanceMatrix& distances, Eigen::Index n, Eigen::Index m, Rng& rng) {
  if (n < 1 || m < 1) throw std::invalid_argument("generate_channels: antenna counts must be positive");
  const std::size_t players = distances.size();
  ChannelSet h(players, std::vector<ComplexMatrix>(players));
  for (std::size_t j = 0; j < players; ++j) {
    if (distances[j].size() != players) throw std::invalid_argument("generate_channels: distance matrix is not square");
    for (std::size_t i = 0; i < players; ++i) {
      const double d = distances[j][i];
      if (!(d > 0.0)) throw std::invalid_argument("generate_channels: distances must be positive");
      const double normalized = d / kDirectLinkDistance;
      h[j][i] = complex_gaussian_matrix(rng, m, n, 1.0 / (normalized * normalized));
    }
  }
  return h;
}

HermitianMatrix receiver_covariance(std::size_t i, const BlockState& x, const MimoNetwork& net, std::size_t skip) {
  HermitianMatrix w = HermitianMatrix::identity(net.rx_antennas[i]);
  for (std::size_t j = 0; j < net.players(); ++j) {
    if (j == skip) continue;
    w += congruence(net.channels[j][i], x[j].matrix());
  }
  return w;
}

double payoff(std::size_t i, const BlockState& x, const MimoNetwork& net) {
  return log_det_floored(receiver_covariance(i, x, net), kDeterminantFloor) -
         log_det_floored(receiver_covariance(i, x, net, i), kDeterminantFloor);
}

std::vector<double> payoffs(const BlockState& x, const MimoNetwork& net) {
  std::vector<double> out(net.players());
  for (std::size_t i = 0; i < net.players(); ++i) out[i] = payoff(i, x, net);
  return out;
}

MappingBlocks exact_mapping(const BlockState& x, const MimoNetwork& net) {
  MappingBlocks out;
  out.reserve(net.players());
  for (std::size_t i = 0; i < net.players(); ++i) {
    const ComplexMatrix& hii = net.channels[i][i];
    const HermitianMatrix w_inv = inverse_floored(receiver_covariance(i, x, net), kDeterminantFloor);
    out.push_back(-HermitianMatrix::symmetrize(hii.adjoint() * w_inv.matrix() * hii));
  }
  return out;
}

VIOracle noisy_oracle(const MimoNetwork& net, Rng& rng, std::size_t draws) {
  net.validate();
  VIOracle oracle;
  oracle.exact = [net](const BlockState& x) { return exact_mapping(x, net); };
  oracle.sample = [net](const BlockState& x, Rng& r) {
    MappingBlocks phi = exact_mapping(x, net);
    if (net.noise_variance > 0.0)
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const Eigen::Index n = net.tx_antennas[i];
        phi[i] += HermitianMatrix::symmetrize(complex_gaussian_matrix(r, n, n, net.noise_variance));
      }
    return phi;
  };
  oracle.noise_bound = estimate_noise_bound(oracle.sample, net.tx_antennas, net.power, draws, rng);
  return oracle;
}

MimoNetwork build_hex_network(Eigen::Index n, Eigen::Index m, double sigma, std::uint64_t seed,
                                PowerMode power_mode) {
  if (sigma < 0.0) throw std::invalid_argument("build_hex_network: sigma must be nonnegative");
  Rng rng(seed);
  MimoNetwork net;
  net.tx_antennas.assign(kHexCells, n);
  net.rx_antennas.assign(kHexCells, m);
  net.channels = generate_channels(hex_cell_distances(), n, m, rng);
  net.power.assign(kHexCells, power_budget(power_mode));
  net.noise_variance = sigma;
  net.validate();
  return net;
}

}  // namespace entropic::mimo
