#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csma/config.hpp"

namespace csma {

// One Markov-chain state: per-node counters a_i in {0,...,T-1}, the number of
// remaining busy slots of node i's current packet.
using StateView = std::span<const std::uint16_t>;

// Nodes that may start a transmission in state a: a_i == 0 and a_j == 0 for
// every neighbor j. Returned ids ascending.
std::vector<int> eligible_nodes(StateView a, const ConflictGraph& g);

// Deterministic slot update: a'_i = T-1 if tx_i, else max(0, a_i - 1).
// Throws std::invalid_argument when tx_i is set for a non-eligible node.
std::vector<std::uint16_t> next_state(StateView a, const std::vector<std::uint8_t>& tx, int T,
                                      const ConflictGraph& g);

// Probability that node i's transmission starting in state a succeeds:
// p_i times the probability no eligible neighbor also starts. Zero when i is
// not eligible. Neighbors stay blocked for the whole packet, so success is
// decided in the start slot.
double start_success_prob(int i, StateView a, const NetworkConfig& cfg);

struct ChainLimits {
    std::size_t max_states = 2'000'000;
};

// Reachable state space (BFS closure from the all-zeros state), row-stochastic
// transition matrix in CSR form, and per-state success probabilities
// R[s,i] = P(node i transmits successfully out of state s).
struct ChainModel {
    int n = 0;
    int T = 1;
    std::vector<double> p;

    std::size_t num_states = 0;
    std::vector<std::uint16_t> phases; // num_states * n, row-major
    std::size_t zero_state_index = 0;  // always 0: BFS root

    std::vector<std::size_t> row_ptr; // CSR transitions, num_states + 1
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::vector<double> success; // num_states * n, row-major

    StateView state(std::size_t s) const {
        return StateView(phases.data() + s * static_cast<std::size_t>(n),
                         static_cast<std::size_t>(n));
    }
    double success_prob(std::size_t s, int i) const {
        return success[s * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
    }
};

// Enumerates the chain per the slot dynamics. Requires cfg.sigma == 1.
// Throws cap_exceeded_error when the reachable space exceeds lim.max_states.
ChainModel build_chain(const NetworkConfig& cfg, const ChainLimits& lim = {});

// gcd-of-cycle-lengths period of the (irreducible) chain; 1 means aperiodic.
int chain_period(const ChainModel& chain);

struct SolverOptions {
    std::size_t dense_limit = 4096;  // direct solve at or below, power iteration above
    double tol = 1e-12;              // successive-iterate inf-norm (iterative path)
    std::size_t max_iters = 1'000'000;
};

struct StationaryDistribution {
    std::vector<double> pi;
    double residual = 0.0; // ||pi P - pi||_inf, recomputed after the solve
    std::size_t iterations = 0;
    bool direct = false;
};

// Solves pi P = pi, sum(pi) = 1. Periodic chains (possible only when some
// p_i == 1) are rejected with periodic_chain_error; perturb p away from 1.
StationaryDistribution stationary(const ChainModel& chain, const SolverOptions& opts = {});

// S_i = T * sum_s pi[s] * R[s,i].
std::vector<double> throughput(const ChainModel& chain, const StationaryDistribution& pi);

// build_chain -> stationary -> throughput.
std::vector<double> exact_throughput(const NetworkConfig& cfg, const ChainLimits& lim = {},
                                     const SolverOptions& opts = {});

// Debug dump: {"T":..., "p":[...], "states":[[a...],...],
//              "transitions":[[s, s', prob],...]}.
std::string chain_to_json(const ChainModel& chain);

} // namespace csma
