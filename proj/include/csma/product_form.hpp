#pragma once

#include <cstdint>
#include <vector>

#include "csma/config.hpp"

namespace csma {

// Closed-form stationary analysis for T = 2, where the chain is reversible
// and the stationary weight of a binary state factorizes per node. Serves as
// a fast path and as an independent oracle for the chain engine.

struct ProductFormWeight {
    std::vector<int> g1;  // {i : s_i = 1}
    std::vector<int> g2;  // {i : s_i = 0 and some neighbor j has s_j = 1}
    double weight = 1.0;  // prod_{G1} p_i * prod_{G2} (1 - p_i)
};

// Unnormalized stationary weight of binary state s. Requires cfg.T == 2.
ProductFormWeight state_weight(const std::vector<std::uint8_t>& s, const NetworkConfig& cfg);

// Z = sum of state_weight over all 2^n binary states (every binary state is
// reachable for T = 2). Hard cap n <= 24; refuses above.
double partition_function(const NetworkConfig& cfg);

// S_i = 2 * sum_s [weight(s)/Z] * R_i(s). Requires cfg.T == 2.
std::vector<double> throughput_closed_form(const NetworkConfig& cfg);

} // namespace csma
