#pragma once

#include <cstdint>
#include <vector>

#include "sudas/model.hpp"
#include "sudas/numerics.hpp"

namespace sudas {

// Noise-normalized channel draws for one trial. Uplink hops are the
// conjugate transposes of the downlink hops.
struct ChannelRealization {
  std::vector<ComplexMatrix> h_bs;                 // [i], M x N, BS -> SUDAS
  std::vector<std::vector<ComplexMatrix>> h_sue;   // [i][k], M x M diagonal, SUDAS -> UE k
  std::vector<std::vector<ComplexMatrix>> h_direct;// [i][k], N x N, BS -> N-antenna UE k (baselines)
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index);

// Mean |h|^2 per entry after noise normalization.
double mean_gain_bs(const SystemConfig& cfg);
double mean_gain_sudac(const SystemConfig& cfg);

ChannelRealization generate(const SystemConfig& cfg, std::uint64_t seed);

// Stream count: min(N, M, numerical ranks of all hops, cap).
std::size_t stream_count(const ChannelRealization& ch, const SystemConfig& cfg);

EffectiveChannels effective_cnrs(const ChannelRealization& ch, const SystemConfig& cfg);

}  // namespace sudas
