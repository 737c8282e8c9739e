#include "csma/product_form.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "csma/chain.hpp"
#include "csma/errors.hpp"

namespace csma {

namespace {

constexpr int kMaxProductFormNodes = 24;
constexpr double kLogSpaceGuard = 1e-12;

void require_t2(const NetworkConfig& cfg, const char* who) {
    cfg.validate();
    if (cfg.T != 2)
        throw std::invalid_argument(std::string(who) + ": the product form holds for T == 2 only");
}

bool needs_log_space(const std::vector<double>& p) {
    for (double v : p)
        if (v < kLogSpaceGuard || v > 1.0 - kLogSpaceGuard) return true;
    return false;
}

// Deterministic binary-cascade pairwise summation; keeps 2^n-term sums
// bit-stable regardless of future partitioning of the enumeration.
class PairwiseSum {
public:
    void add(double x) {
        std::uint64_t c = count_++;
        std::size_t k = 0;
        while (c & 1u) {
            x += levels_[k];
            c >>= 1;
            ++k;
        }
        if (k == levels_.size())
            levels_.push_back(x);
        else
            levels_[k] = x;
    }
    double total() const {
        double acc = 0.0;
        std::uint64_t c = count_;
        for (std::size_t k = 0; k < levels_.size(); ++k, c >>= 1)
            if (c & 1u) acc += levels_[k];
        return acc;
    }

private:
    std::vector<double> levels_;
    std::uint64_t count_ = 0;
};

double weight_of(std::uint32_t mask, const NetworkConfig& cfg, bool log_space) {
    const auto& g = cfg.graph;
    double w = 1.0;
    double log_w = 0.0;
    bool zero = false;
    for (int i = 0; i < g.n && !zero; ++i) {
        double factor;
        if ((mask >> i) & 1u) {
            factor = cfg.p[static_cast<std::size_t>(i)];
        } else {
            bool busy_neighbor = false;
            for (int j : g.adj[static_cast<std::size_t>(i)]) {
                if ((mask >> j) & 1u) {
                    busy_neighbor = true;
                    break;
                }
            }
            if (!busy_neighbor) continue;
            factor = 1.0 - cfg.p[static_cast<std::size_t>(i)];
        }
        if (factor == 0.0)
            zero = true;
        else if (log_space)
            log_w += std::log(factor);
        else
            w *= factor;
    }
    if (zero) return 0.0;
    return log_space ? std::exp(log_w) : w;
}

} // namespace

ProductFormWeight state_weight(const std::vector<std::uint8_t>& s, const NetworkConfig& cfg) {
    require_t2(cfg, "state_weight");
    if (static_cast<int>(s.size()) != cfg.graph.n)
        throw std::invalid_argument("state_weight: state length mismatch");
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] > 1) throw std::invalid_argument("state_weight: state must be binary");
        if (s[i]) mask |= (1u << i);
    }
    ProductFormWeight out;
    for (int i = 0; i < cfg.graph.n; ++i) {
        if ((mask >> i) & 1u) {
            out.g1.push_back(i);
        } else {
            for (int j : cfg.graph.adj[static_cast<std::size_t>(i)]) {
                if ((mask >> j) & 1u) {
                    out.g2.push_back(i);
                    break;
                }
            }
        }
    }
    out.weight = weight_of(mask, cfg, needs_log_space(cfg.p));
    return out;
}

double partition_function(const NetworkConfig& cfg) {
    require_t2(cfg, "partition_function");
    const int n = cfg.graph.n;
    if (n > kMaxProductFormNodes)
        throw cap_exceeded_error(static_cast<std::size_t>(1) << kMaxProductFormNodes,
                                 std::pow(2.0, n),
                                 "partition_function: 2^n enumeration refused for n > 24; use the "
                                 "chain engine or the simulator");
    const bool log_space = needs_log_space(cfg.p);
    PairwiseSum z;
    const std::uint32_t total = 1u << n;
    for (std::uint32_t mask = 0; mask < total; ++mask) z.add(weight_of(mask, cfg, log_space));
    return z.total();
}

std::vector<double> throughput_closed_form(const NetworkConfig& cfg) {
    require_t2(cfg, "throughput_closed_form");
    const int n = cfg.graph.n;
    if (n > kMaxProductFormNodes)
        throw cap_exceeded_error(static_cast<std::size_t>(1) << kMaxProductFormNodes,
                                 std::pow(2.0, n),
                                 "throughput_closed_form: 2^n enumeration refused for n > 24; use "
                                 "the chain engine or the simulator");
    const bool log_space = needs_log_space(cfg.p);

    PairwiseSum z;
    std::vector<PairwiseSum> rate(static_cast<std::size_t>(n));
    std::vector<std::uint16_t> state(static_cast<std::size_t>(n));
    const std::uint32_t total = 1u << n;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        const double w = weight_of(mask, cfg, log_space);
        z.add(w);
        if (w == 0.0) continue;
        for (int i = 0; i < n; ++i)
            state[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>((mask >> i) & 1u);
        for (int i = 0; i < n; ++i) {
            double r = start_success_prob(i, StateView(state), cfg);
            if (r != 0.0) rate[static_cast<std::size_t>(i)].add(w * r);
        }
    }
    const double Z = z.total();
    std::vector<double> S(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) S[static_cast<std::size_t>(i)] = 2.0 * rate[static_cast<std::size_t>(i)].total() / Z;
    return S;
}

} // namespace csma
