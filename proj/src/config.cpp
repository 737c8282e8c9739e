#include "csma/config.hpp"

#include <stdexcept>
#include <string>

namespace csma {

void NetworkConfig::validate() const {
    if (graph.n < 1) throw std::invalid_argument("config: graph has no nodes");
    if (static_cast<int>(p.size()) != graph.n)
        throw std::invalid_argument("config: p has " + std::to_string(p.size()) +
                                    " entries for " + std::to_string(graph.n) + " nodes");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!(p[i] >= 0.0 && p[i] <= 1.0))
            throw std::invalid_argument("config: p[" + std::to_string(i) + "] outside [0,1]");
    if (T < 1) throw std::invalid_argument("config: T must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be > 0");
}

} // namespace csma
