#ifndef AOIMC_SIMULATE_HPP
#define AOIMC_SIMULATE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aoimc/aoi.hpp"
#include "aoimc/channel.hpp"

namespace aoimc {

/// Monte Carlo run description. Identical configs produce bit-identical
/// results on every platform (see rng.hpp).
struct SimConfig {
    SchemeConfig scheme;
    ChannelSet channels;
    std::int64_t horizon = 0;    ///< total simulated symbols
    std::uint64_t seed = 1;
    std::int64_t warmup = -1;    ///< symbols before measurement; -1 selects 10*n
};

/// The horizon ended before a single complete renewal interval was observed.
struct NoDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimResult {
    double avg_aoi = 0.0;        ///< empirical time average, symbols
    std::int64_t renewal_count = 0;  ///< complete inter-reception intervals measured
    double ci_halfwidth = 0.0;   ///< 95%, normal approximation over 100 batch means
    std::vector<std::int64_t> attempts_per_channel;
    std::vector<std::int64_t> successes_per_channel;
    double measured_time = 0.0;  ///< symbols covered by the measurement window
};

/// Event-driven simulation of the configured scheme: at every transmission
/// completion a Bernoulli draw with the analytic per-decode error probability
/// decides success; on success the age drops to the update delay n; the
/// sawtooth area is integrated exactly (rectangle + triangle per interval).
SimResult simulate(const SimConfig& config);

/// Per-channel moment estimates for the MP scheme: each renewal interval is
/// tagged by the channel of the success that started it.
struct MpMomentEstimate {
    std::vector<double> first;
    std::vector<double> second;
    std::vector<std::int64_t> counts;
};
MpMomentEstimate simulate_mp_moments(const SimConfig& config);

}  // namespace aoimc

#endif
