#pragma once

#include <vector>

#include "csma/graph.hpp"

namespace csma {

// A conflict graph plus per-node access probabilities and the packet
// transmission duration T in slots. sigma is the idle slot duration; the
// renewal formulas honor it, the exact chain requires sigma == 1 (T is then
// measured in units of sigma).
struct NetworkConfig {
    ConflictGraph graph;
    std::vector<double> p;
    int T = 2;
    double sigma = 1.0;

    // Throws std::invalid_argument when len(p) != n, p_i outside [0,1],
    // T < 1 or sigma <= 0.
    void validate() const;
};

} // namespace csma
