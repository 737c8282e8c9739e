#pragma once

#include <vector>

#include "csma/config.hpp"

namespace csma {

// Renewal-theory throughput baselines. The classic formula assumes complete
// contention (it ignores the graph and is exact only on complete graphs); the
// extended one plugs in each node's neighborhood and is an approximation.
// Empty products are 1, so an isolated node under the extended formula yields
// p*T/(sigma*(1-p)), which can exceed 1 for large T. Values are returned raw;
// the formulas' errors are the point, callers clamp for display if they care.

std::vector<double> renewal_classic(const NetworkConfig& cfg);
std::vector<double> renewal_extended(const NetworkConfig& cfg);

} // namespace csma
