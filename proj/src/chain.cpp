#include "csma/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "csma/errors.hpp"

namespace csma {

std::vector<int> eligible_nodes(StateView a, const ConflictGraph& g) {
    std::vector<int> out;
    for (int i = 0; i < g.n; ++i) {
        if (a[static_cast<std::size_t>(i)] != 0) continue;
        bool clear = true;
        for (int j : g.adj[static_cast<std::size_t>(i)]) {
            if (a[static_cast<std::size_t>(j)] != 0) {
                clear = false;
                break;
            }
        }
        if (clear) out.push_back(i);
    }
    return out;
}

std::vector<std::uint16_t> next_state(StateView a, const std::vector<std::uint8_t>& tx, int T,
                                      const ConflictGraph& g) {
    if (tx.size() != a.size())
        throw std::invalid_argument("next_state: tx length mismatch");
    auto eligible = eligible_nodes(a, g);
    std::vector<std::uint16_t> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (tx[i]) {
            if (!std::binary_search(eligible.begin(), eligible.end(), static_cast<int>(i)))
                throw std::invalid_argument("next_state: tx set for non-eligible node " +
                                            std::to_string(i));
            out[i] = static_cast<std::uint16_t>(T - 1);
        } else {
            out[i] = a[i] > 0 ? static_cast<std::uint16_t>(a[i] - 1) : 0;
        }
    }
    return out;
}

double start_success_prob(int i, StateView a, const NetworkConfig& cfg) {
    const auto& g = cfg.graph;
    if (a[static_cast<std::size_t>(i)] != 0) return 0.0;
    for (int j : g.adj[static_cast<std::size_t>(i)])
        if (a[static_cast<std::size_t>(j)] != 0) return 0.0;
    double prob = cfg.p[static_cast<std::size_t>(i)];
    for (int j : g.adj[static_cast<std::size_t>(i)]) {
        // a_j == 0 here; j can only interfere if it is itself eligible
        bool j_eligible = true;
        for (int k : g.adj[static_cast<std::size_t>(j)]) {
            if (a[static_cast<std::size_t>(k)] != 0) {
                j_eligible = false;
                break;
            }
        }
        if (j_eligible) prob *= 1.0 - cfg.p[static_cast<std::size_t>(j)];
    }
    return prob;
}

namespace {

using u128 = unsigned __int128;

struct U128Hash {
    std::size_t operator()(u128 v) const noexcept {
        auto lo = static_cast<std::uint64_t>(v);
        auto hi = static_cast<std::uint64_t>(v >> 64);
        std::uint64_t h = lo * 0x9E3779B97F4A7C15ull;
        h ^= (hi + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2));
        return static_cast<std::size_t>(h);
    }
};

ChainModel single_state_chain(const NetworkConfig& cfg) {
    // T == 1: counters are identically zero, every node is eligible each slot.
    const int n = cfg.graph.n;
    ChainModel m;
    m.n = n;
    m.T = 1;
    m.p = cfg.p;
    m.num_states = 1;
    m.phases.assign(static_cast<std::size_t>(n), 0);
    m.row_ptr = {0, 1};
    m.col = {0};
    m.val = {1.0};
    m.success.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double prob = cfg.p[static_cast<std::size_t>(i)];
        for (int j : cfg.graph.adj[static_cast<std::size_t>(i)])
            prob *= 1.0 - cfg.p[static_cast<std::size_t>(j)];
        m.success[static_cast<std::size_t>(i)] = prob;
    }
    return m;
}

} // namespace

ChainModel build_chain(const NetworkConfig& cfg, const ChainLimits& lim) {
    cfg.validate();
    if (cfg.sigma != 1.0)
        throw std::invalid_argument("build_chain: requires sigma == 1 (interpret T in units of "
                                    "sigma); renewal formulas honor sigma directly");
    if (cfg.T > 65535) throw std::invalid_argument("build_chain: T above 65535 unsupported");

    const int n = cfg.graph.n;
    const int T = cfg.T;
    if (T == 1) return single_state_chain(cfg);

    ChainLimits eff = lim;
    eff.max_states = std::min<std::size_t>(lim.max_states, 0xFFFFFFFFu); // uint32 column ids
    const double raw_grid = std::pow(static_cast<double>(T), n);
    if (n * std::log2(static_cast<double>(T)) > 127.0) {
        // The reachable set alone already dwarfs any sane cap at this size.
        throw cap_exceeded_error(eff.max_states, raw_grid,
                                 "build_chain: raw state grid T^n is astronomically large (" +
                                     std::to_string(raw_grid) + " states); cap is " +
                                     std::to_string(eff.max_states) +
                                     "; use the simulator instead");
    }

    std::vector<u128> radix(static_cast<std::size_t>(n));
    u128 r = 1;
    for (int i = 0; i < n; ++i) {
        radix[static_cast<std::size_t>(i)] = r;
        r *= static_cast<u128>(T);
    }

    ChainModel m;
    m.n = n;
    m.T = T;
    m.p = cfg.p;

    std::unordered_map<u128, std::uint32_t, U128Hash> index;
    index.reserve(1024);
    m.phases.assign(static_cast<std::size_t>(n), 0); // all-zeros root
    index.emplace(0, 0);
    std::size_t count = 1;

    m.row_ptr.push_back(0);
    std::vector<std::uint16_t> cur(static_cast<std::size_t>(n));
    std::vector<std::uint16_t> nxt(static_cast<std::size_t>(n));
    std::vector<double> succ_row(static_cast<std::size_t>(n));
    std::vector<std::pair<std::uint32_t, double>> row;

    auto cap_error = [&](std::size_t at_least) {
        return cap_exceeded_error(eff.max_states, std::min(raw_grid, static_cast<double>(at_least)),
                                  "build_chain: reachable state space exceeds the cap of " +
                                      std::to_string(eff.max_states) + " states (raw grid T^n = " +
                                      std::to_string(raw_grid) +
                                      "); raise the cap or use the simulator");
    };

    for (std::size_t s = 0; s < count; ++s) {
        std::memcpy(cur.data(), m.phases.data() + s * static_cast<std::size_t>(n),
                    static_cast<std::size_t>(n) * sizeof(std::uint16_t));
        auto elig = eligible_nodes(StateView(cur), cfg.graph);
        const int k = static_cast<int>(elig.size());

        // Every tx subset of the eligible set reaches a distinct successor
        // (T >= 2), so 2^k states are already unavoidable from here.
        if (k > 30 || (std::size_t{1} << k) > eff.max_states)
            throw cap_error(std::size_t{1} << std::min(k, 62));

        // Positions (within elig) of each eligible node's eligible neighbors.
        std::vector<std::uint32_t> nbr_mask(static_cast<std::size_t>(k), 0);
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                if (a != b && cfg.graph.has_edge(elig[static_cast<std::size_t>(a)],
                                                 elig[static_cast<std::size_t>(b)]))
                    nbr_mask[static_cast<std::size_t>(a)] |= (1u << b);
            }
        }

        row.clear();
        std::fill(succ_row.begin(), succ_row.end(), 0.0);

        for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
            double prob = 1.0;
            for (int a = 0; a < k; ++a) {
                double pa = cfg.p[static_cast<std::size_t>(elig[static_cast<std::size_t>(a)])];
                prob *= (mask >> a) & 1u ? pa : 1.0 - pa;
            }
            if (prob == 0.0) continue; // zero-probability branch, not a real transition

            for (int i = 0; i < n; ++i)
                nxt[static_cast<std::size_t>(i)] =
                    cur[static_cast<std::size_t>(i)] > 0
                        ? static_cast<std::uint16_t>(cur[static_cast<std::size_t>(i)] - 1)
                        : 0;
            for (int a = 0; a < k; ++a) {
                if ((mask >> a) & 1u)
                    nxt[static_cast<std::size_t>(elig[static_cast<std::size_t>(a)])] =
                        static_cast<std::uint16_t>(T - 1);
            }
            u128 key = 0;
            for (int i = 0; i < n; ++i)
                key += radix[static_cast<std::size_t>(i)] *
                       static_cast<u128>(nxt[static_cast<std::size_t>(i)]);

            auto [it, inserted] = index.emplace(key, static_cast<std::uint32_t>(count));
            if (inserted) {
                if (count >= eff.max_states) throw cap_error(count + 1);
                m.phases.insert(m.phases.end(), nxt.begin(), nxt.end());
                ++count;
            }
            row.emplace_back(it->second, prob);

            for (int a = 0; a < k; ++a) {
                if (((mask >> a) & 1u) && (mask & nbr_mask[static_cast<std::size_t>(a)]) == 0)
                    succ_row[static_cast<std::size_t>(elig[static_cast<std::size_t>(a)])] += prob;
            }
        }

        std::sort(row.begin(), row.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [c, v] : row) {
            if (m.col.size() > m.row_ptr.back() && m.col.back() == c)
                m.val.back() += v; // duplicate column (cannot occur for T >= 2)
            else {
                m.col.push_back(c);
                m.val.push_back(v);
            }
        }
        m.row_ptr.push_back(m.col.size());
        m.success.insert(m.success.end(), succ_row.begin(), succ_row.end());
    }

    m.num_states = count;
    return m;
}

int chain_period(const ChainModel& chain) {
    const std::size_t N = chain.num_states;
    std::vector<std::int64_t> level(N, -1);
    std::vector<std::uint32_t> queue;
    queue.reserve(N);
    queue.push_back(0);
    level[0] = 0;
    std::size_t head = 0;
    std::int64_t g = 0;
    while (head < queue.size()) {
        std::uint32_t u = queue[head++];
        for (std::size_t e = chain.row_ptr[u]; e < chain.row_ptr[u + 1]; ++e) {
            std::uint32_t v = chain.col[e];
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, level[u] + 1 - level[v]);
            }
        }
    }
    return g == 0 ? 1 : static_cast<int>(std::llabs(g));
}

namespace {

double stationary_residual(const ChainModel& chain, const std::vector<double>& pi) {
    std::vector<double> pip(pi.size(), 0.0);
    for (std::size_t s = 0; s < chain.num_states; ++s) {
        for (std::size_t e = chain.row_ptr[s]; e < chain.row_ptr[s + 1]; ++e)
            pip[chain.col[e]] += pi[s] * chain.val[e];
    }
    double res = 0.0;
    for (std::size_t s = 0; s < pi.size(); ++s) res = std::max(res, std::fabs(pip[s] - pi[s]));
    return res;
}

// Direct route: solve (P^T - I) x = 0 with the last balance equation replaced
// by the normalization sum(x) = 1. Plain partial-pivot elimination.
std::vector<double> solve_dense(const ChainModel& chain) {
    const std::size_t N = chain.num_states;
    std::vector<double> A(N * N, 0.0);
    for (std::size_t s = 0; s < N; ++s) {
        for (std::size_t e = chain.row_ptr[s]; e < chain.row_ptr[s + 1]; ++e)
            A[static_cast<std::size_t>(chain.col[e]) * N + s] += chain.val[e];
        A[s * N + s] -= 1.0;
    }
    std::vector<double> b(N, 0.0);
    for (std::size_t j = 0; j < N; ++j) A[(N - 1) * N + j] = 1.0;
    b[N - 1] = 1.0;

    for (std::size_t c = 0; c < N; ++c) {
        std::size_t piv = c;
        double best = std::fabs(A[c * N + c]);
        for (std::size_t r = c + 1; r < N; ++r) {
            double v = std::fabs(A[r * N + c]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) throw convergence_error("stationary: singular transition system");
        if (piv != c) {
            for (std::size_t j = c; j < N; ++j) std::swap(A[piv * N + j], A[c * N + j]);
            std::swap(b[piv], b[c]);
        }
        const double inv = 1.0 / A[c * N + c];
        for (std::size_t r = c + 1; r < N; ++r) {
            double f = A[r * N + c] * inv;
            if (f == 0.0) continue;
            A[r * N + c] = 0.0;
            for (std::size_t j = c + 1; j < N; ++j) A[r * N + j] -= f * A[c * N + j];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(N, 0.0);
    for (std::size_t ri = N; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t j = ri + 1; j < N; ++j) acc -= A[ri * N + j] * x[j];
        x[ri] = acc / A[ri * N + ri];
    }
    return x;
}

std::vector<double> solve_power(const ChainModel& chain, const SolverOptions& opts,
                                std::size_t& iterations) {
    const std::size_t N = chain.num_states;
    std::vector<double> x(N, 1.0 / static_cast<double>(N));
    std::vector<double> y(N);
    for (std::size_t it = 1; it <= opts.max_iters; ++it) {
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t s = 0; s < N; ++s) {
            const double xs = x[s];
            if (xs == 0.0) continue;
            for (std::size_t e = chain.row_ptr[s]; e < chain.row_ptr[s + 1]; ++e)
                y[chain.col[e]] += xs * chain.val[e];
        }
        double sum = std::accumulate(y.begin(), y.end(), 0.0);
        double diff = 0.0;
        for (std::size_t s = 0; s < N; ++s) {
            y[s] /= sum;
            diff = std::max(diff, std::fabs(y[s] - x[s]));
        }
        x.swap(y);
        if (diff < opts.tol) {
            iterations = it;
            return x;
        }
    }
    throw convergence_error("stationary: power iteration did not converge within " +
                            std::to_string(opts.max_iters) + " iterations");
}

} // namespace

StationaryDistribution stationary(const ChainModel& chain, const SolverOptions& opts) {
    if (int period = chain_period(chain); period > 1)
        throw periodic_chain_error(period,
                                   "stationary: chain is periodic with period " +
                                       std::to_string(period) +
                                       " (some p_i == 1); perturb p away from 1");
    StationaryDistribution out;
    if (chain.num_states <= opts.dense_limit) {
        out.pi = solve_dense(chain);
        out.direct = true;
        out.iterations = 0;
    } else {
        out.pi = solve_power(chain, opts, out.iterations);
        out.direct = false;
    }
    double sum = 0.0;
    for (double& v : out.pi) {
        if (v < 0.0) v = 0.0; // clip solver round-off
        sum += v;
    }
    for (double& v : out.pi) v /= sum;
    out.residual = stationary_residual(chain, out.pi);
    return out;
}

std::vector<double> throughput(const ChainModel& chain, const StationaryDistribution& dist) {
    if (dist.pi.size() != chain.num_states)
        throw std::invalid_argument("throughput: distribution does not match chain");
    std::vector<double> S(static_cast<std::size_t>(chain.n), 0.0);
    for (std::size_t s = 0; s < chain.num_states; ++s) {
        const double ps = dist.pi[s];
        if (ps == 0.0) continue;
        const double* row = chain.success.data() + s * static_cast<std::size_t>(chain.n);
        for (int i = 0; i < chain.n; ++i) S[static_cast<std::size_t>(i)] += ps * row[i];
    }
    for (double& v : S) v *= static_cast<double>(chain.T);
    return S;
}

std::vector<double> exact_throughput(const NetworkConfig& cfg, const ChainLimits& lim,
                                     const SolverOptions& opts) {
    ChainModel chain = build_chain(cfg, lim);
    StationaryDistribution dist = stationary(chain, opts);
    return throughput(chain, dist);
}

std::string chain_to_json(const ChainModel& chain) {
    nlohmann::json doc;
    doc["T"] = chain.T;
    doc["p"] = chain.p;
    auto states = nlohmann::json::array();
    for (std::size_t s = 0; s < chain.num_states; ++s) {
        auto st = nlohmann::json::array();
        for (auto v : chain.state(s)) st.push_back(v);
        states.push_back(std::move(st));
    }
    doc["states"] = std::move(states);
    auto trans = nlohmann::json::array();
    for (std::size_t s = 0; s < chain.num_states; ++s) {
        for (std::size_t e = chain.row_ptr[s]; e < chain.row_ptr[s + 1]; ++e)
            trans.push_back({s, chain.col[e], chain.val[e]});
    }
    doc["transitions"] = std::move(trans);
    return doc.dump();
}

} // namespace csma
