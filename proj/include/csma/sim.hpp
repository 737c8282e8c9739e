#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csma/config.hpp"

namespace csma {

// Slot-level Monte Carlo simulation of the p-CSMA dynamics, used as an
// independent oracle for the chain engine. Deterministic given the seed
// (mt19937_64; eligible nodes drawn in ascending id order each slot).

struct SimConfig {
    NetworkConfig cfg;
    std::uint64_t slots = 1'000'000;
    std::uint64_t seed = 1;
    // Slots discarded before counting; sentinel means the default 10*T.
    std::uint64_t warmup = kWarmupAuto;

    static constexpr std::uint64_t kWarmupAuto = ~std::uint64_t{0};
    std::uint64_t effective_warmup() const {
        return warmup == kWarmupAuto ? 10 * static_cast<std::uint64_t>(cfg.T) : warmup;
    }
};

struct SimResult {
    std::vector<double> S_hat;                // T * successful starts / counted slots
    std::vector<std::uint64_t> attempts;      // transmission starts after warmup
    std::vector<std::uint64_t> successes;
    std::vector<std::uint64_t> collisions;    // attempts - successes
    std::vector<double> ci_halfwidth;         // 95% batch-means half-width (30 batches)
};

SimResult simulate(const SimConfig& sim);

// Per-node slot outcome. A collision still occupies the channel for T slots
// for every involved transmitter.
enum class SlotEvent : std::uint8_t {
    Idle,
    SuccessStart,
    SuccessCont,
    CollisionStart,
    CollisionCont,
};

char slot_event_char(SlotEvent e); // 'I', 'S' or 'C'

struct SimTrace {
    // events[t][i], phase[t][i] = a_i at the start of slot t
    std::vector<std::vector<SlotEvent>> events;
    std::vector<std::vector<std::uint16_t>> phase;
    // one '0'/'1' stream per node: '1' on slots of a successful transmission
    std::vector<std::string> bits;
};

// First max_slots slots of a seeded run (no warmup); max_slots <= 10^4.
SimTrace trace(const SimConfig& sim, std::size_t max_slots);

// JSON lines, one record per slot:
// {"t": int, "events": ["I"|"S"|"C", ...], "phase": [a_i...]}
std::string trace_to_jsonl(const SimTrace& tr);

} // namespace csma
