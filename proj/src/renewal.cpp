#include "csma/renewal.hpp"

namespace csma {

std::vector<double> renewal_classic(const NetworkConfig& cfg) {
    cfg.validate();
    const int n = cfg.graph.n;
    const double T = static_cast<double>(cfg.T);
    double all_idle = 1.0;
    for (double pi : cfg.p) all_idle *= 1.0 - pi;

    std::vector<double> S(static_cast<std::size_t>(n));
    const double denom = cfg.sigma * all_idle + (1.0 - all_idle) * T;
    for (int i = 0; i < n; ++i) {
        double others_idle = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) others_idle *= 1.0 - cfg.p[static_cast<std::size_t>(j)];
        S[static_cast<std::size_t>(i)] = cfg.p[static_cast<std::size_t>(i)] * others_idle * T / denom;
    }
    return S;
}

std::vector<double> renewal_extended(const NetworkConfig& cfg) {
    cfg.validate();
    const int n = cfg.graph.n;
    const double T = static_cast<double>(cfg.T);
    std::vector<double> S(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double pi = cfg.p[static_cast<std::size_t>(i)];
        double nbrs_idle = 1.0; // empty product is 1
        for (int j : cfg.graph.adj[static_cast<std::size_t>(i)])
            nbrs_idle *= 1.0 - cfg.p[static_cast<std::size_t>(j)];
        const double denom = cfg.sigma * (1.0 - pi) * nbrs_idle + (1.0 - nbrs_idle) * T;
        // denom can be 0 only for an isolated node with pi == 1, where the raw
        // formula diverges; IEEE +inf is the faithful raw value.
        S[static_cast<std::size_t>(i)] = pi * nbrs_idle * T / denom;
    }
    return S;
}

} // namespace csma
