#include "csma/sim.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace csma {

namespace {

constexpr int kBatches = 30;
constexpr double kT29_975 = 2.045230; // Student t, 29 dof, two-sided 95%

// One slot of the p-CSMA dynamics. Eligible nodes draw in ascending id order,
// which pins the random stream for a given seed.
class Stepper {
public:
    Stepper(const NetworkConfig& cfg, std::uint64_t seed)
        : cfg_(cfg), rng_(seed), a_(static_cast<std::size_t>(cfg.graph.n), 0),
          ok_(static_cast<std::size_t>(cfg.graph.n), 0),
          started_(static_cast<std::size_t>(cfg.graph.n), 0) {}

    const std::vector<std::uint16_t>& phases() const { return a_; }
    const std::vector<std::uint8_t>& started() const { return started_; }
    bool packet_ok(int i) const { return ok_[static_cast<std::size_t>(i)] != 0; }

    void step() {
        const auto& g = cfg_.graph;
        const int n = g.n;
        for (int i = 0; i < n; ++i) {
            started_[static_cast<std::size_t>(i)] = 0;
            if (a_[static_cast<std::size_t>(i)] != 0) continue;
            bool clear = true;
            for (int j : g.adj[static_cast<std::size_t>(i)]) {
                if (a_[static_cast<std::size_t>(j)] != 0) {
                    clear = false;
                    break;
                }
            }
            if (!clear) continue;
            const double u = static_cast<double>(rng_() >> 11) * 0x1p-53;
            if (u < cfg_.p[static_cast<std::size_t>(i)]) started_[static_cast<std::size_t>(i)] = 1;
        }
        for (int i = 0; i < n; ++i) {
            if (!started_[static_cast<std::size_t>(i)]) continue;
            bool success = true;
            for (int j : g.adj[static_cast<std::size_t>(i)]) {
                if (started_[static_cast<std::size_t>(j)]) {
                    success = false;
                    break;
                }
            }
            ok_[static_cast<std::size_t>(i)] = success ? 1 : 0;
        }
        for (int i = 0; i < n; ++i) {
            auto& ai = a_[static_cast<std::size_t>(i)];
            if (started_[static_cast<std::size_t>(i)])
                ai = static_cast<std::uint16_t>(cfg_.T - 1);
            else if (ai > 0)
                --ai;
        }
    }

private:
    const NetworkConfig& cfg_;
    std::mt19937_64 rng_;
    std::vector<std::uint16_t> a_;
    std::vector<std::uint8_t> ok_; // success flag of each node's current packet
    std::vector<std::uint8_t> started_;
};

} // namespace

SimResult simulate(const SimConfig& sim) {
    sim.cfg.validate();
    if (sim.cfg.sigma != 1.0)
        throw std::invalid_argument("simulate: slots have unit duration; requires sigma == 1");
    if (sim.cfg.T > 65535) throw std::invalid_argument("simulate: T above 65535 unsupported");
    const std::uint64_t warmup = sim.effective_warmup();
    if (sim.slots <= warmup)
        throw std::invalid_argument("simulate: slots must exceed warmup (" +
                                    std::to_string(warmup) + ")");
    const int n = sim.cfg.graph.n;
    const std::uint64_t counted = sim.slots - warmup;
    const std::uint64_t batch_len = counted / kBatches;

    Stepper st(sim.cfg, sim.seed);
    SimResult out;
    out.attempts.assign(static_cast<std::size_t>(n), 0);
    out.successes.assign(static_cast<std::size_t>(n), 0);

    std::vector<std::vector<std::uint64_t>> batch_succ(
        kBatches, std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));

    for (std::uint64_t t = 0; t < sim.slots; ++t) {
        st.step();
        if (t < warmup) continue;
        const std::uint64_t offset = t - warmup;
        const std::uint64_t batch = batch_len == 0 ? kBatches : offset / batch_len;
        for (int i = 0; i < n; ++i) {
            if (!st.started()[static_cast<std::size_t>(i)]) continue;
            ++out.attempts[static_cast<std::size_t>(i)];
            if (st.packet_ok(i)) {
                ++out.successes[static_cast<std::size_t>(i)];
                if (batch < kBatches) ++batch_succ[batch][static_cast<std::size_t>(i)];
            }
        }
    }

    const double T = static_cast<double>(sim.cfg.T);
    out.S_hat.resize(static_cast<std::size_t>(n));
    out.collisions.resize(static_cast<std::size_t>(n));
    out.ci_halfwidth.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out.S_hat[idx] = T * static_cast<double>(out.successes[idx]) / static_cast<double>(counted);
        out.collisions[idx] = out.attempts[idx] - out.successes[idx];
        if (batch_len == 0) {
            out.ci_halfwidth[idx] = std::numeric_limits<double>::infinity();
            continue;
        }
        double mean = 0.0;
        for (int b = 0; b < kBatches; ++b)
            mean += T * static_cast<double>(batch_succ[static_cast<std::size_t>(b)][idx]) /
                    static_cast<double>(batch_len);
        mean /= kBatches;
        double var = 0.0;
        for (int b = 0; b < kBatches; ++b) {
            const double m = T * static_cast<double>(batch_succ[static_cast<std::size_t>(b)][idx]) /
                             static_cast<double>(batch_len);
            var += (m - mean) * (m - mean);
        }
        var /= kBatches - 1;
        out.ci_halfwidth[idx] = kT29_975 * std::sqrt(var / kBatches);
    }
    return out;
}

char slot_event_char(SlotEvent e) {
    switch (e) {
    case SlotEvent::Idle: return 'I';
    case SlotEvent::SuccessStart:
    case SlotEvent::SuccessCont: return 'S';
    case SlotEvent::CollisionStart:
    case SlotEvent::CollisionCont: return 'C';
    }
    return '?';
}

SimTrace trace(const SimConfig& sim, std::size_t max_slots) {
    sim.cfg.validate();
    if (sim.cfg.sigma != 1.0)
        throw std::invalid_argument("trace: slots have unit duration; requires sigma == 1");
    if (max_slots > 10'000) throw std::invalid_argument("trace: max_slots above 10^4");
    const int n = sim.cfg.graph.n;
    Stepper st(sim.cfg, sim.seed);
    SimTrace tr;
    tr.bits.assign(static_cast<std::size_t>(n), "");
    for (std::size_t t = 0; t < max_slots; ++t) {
        tr.phase.push_back(st.phases());
        st.step();
        std::vector<SlotEvent> ev(static_cast<std::size_t>(n), SlotEvent::Idle);
        for (int i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            if (st.started()[idx])
                ev[idx] = st.packet_ok(i) ? SlotEvent::SuccessStart : SlotEvent::CollisionStart;
            else if (tr.phase.back()[idx] > 0)
                ev[idx] = st.packet_ok(i) ? SlotEvent::SuccessCont : SlotEvent::CollisionCont;
            tr.bits[idx] +=
                (ev[idx] == SlotEvent::SuccessStart || ev[idx] == SlotEvent::SuccessCont) ? '1'
                                                                                          : '0';
        }
        tr.events.push_back(std::move(ev));
    }
    return tr;
}

std::string trace_to_jsonl(const SimTrace& tr) {
    std::ostringstream out;
    for (std::size_t t = 0; t < tr.events.size(); ++t) {
        nlohmann::json rec;
        rec["t"] = t;
        auto events = nlohmann::json::array();
        for (SlotEvent e : tr.events[t]) events.push_back(std::string(1, slot_event_char(e)));
        rec["events"] = std::move(events);
        rec["phase"] = tr.phase[t];
        out << rec.dump() << '\n';
    }
    return out.str();
}

} // namespace csma
