#include "aoimc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aoimc/rng.hpp"

namespace aoimc {

namespace {

constexpr int kBatchCount = 100;
constexpr double kNormal975 = 1.959963984540054;  // Phi^-1(0.975)

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

struct Cycle {
    double start = 0.0;
    double length = 0.0;
    int start_channel = 0;
};

struct RunData {
    std::vector<Cycle> cycles;
    std::vector<std::int64_t> attempts;
    std::vector<std::int64_t> successes;
    double window_start = 0.0;
    double window_end = 0.0;
    int period = 1;
};

/// One decode opportunity within a period: completes `offset` symbols after
/// the period start. For MP the epoch belongs to one channel; for the
/// renewal schemes a single epoch carries all per-channel draws.
struct Epoch {
    double offset = 0.0;
    int mp_channel = -1;
};

RunData run(const SimConfig& config) {
    const SchemeConfig& sc = config.scheme;
    const ChannelSet& channels = config.channels;
    const int n = sc.n;
    const int n_ch = static_cast<int>(channels.size());
    require(n >= 1, "simulate: blocklength must be >= 1");
    require(n_ch >= 1, "simulate: need at least one channel");
    require(config.horizon > 0, "simulate: horizon must be positive");
    const std::int64_t warmup = config.warmup < 0 ? 10 * static_cast<std::int64_t>(n) : config.warmup;
    require(warmup >= 0 && warmup < config.horizon, "simulate: need horizon > warmup >= 0");

    // Analytic per-decode error probabilities, per channel where the scheme
    // draws per channel.
    std::vector<double> eps(n_ch, 1.0);
    std::vector<Epoch> epochs;
    switch (sc.scheme) {
        case Scheme::sc:
            eps.assign(1, epsilon_single(n, sc.k, channels.snrs.front()).value);
            epochs.push_back({static_cast<double>(n), -1});
            break;
        case Scheme::cs:
            eps.assign(1, epsilon_cs(n, sc.k, channels).value);
            epochs.push_back({static_cast<double>(n), -1});
            break;
        case Scheme::pd:
            for (int i = 0; i < n_ch; ++i) eps[i] = epsilon_single(n, sc.k, channels.snrs[i]).value;
            epochs.push_back({static_cast<double>(n), -1});
            break;
        case Scheme::ms: {
            require(sc.splits.size() == channels.size(), "simulate: MS splits/channel mismatch");
            bool any_used = false;
            for (int i = 0; i < n_ch; ++i) {
                if (sc.splits[i] > 0) {
                    eps[i] = epsilon_single(n, sc.splits[i], channels.snrs[i]).value;
                    any_used = true;
                }
            }
            require(any_used, "simulate: MS needs at least one nonzero split");
            epochs.push_back({static_cast<double>(n), -1});
            break;
        }
        case Scheme::mp: {
            const Schedule schedule = sc.shifts.empty() ? Schedule::uniform(n, n_ch)
                                                        : Schedule(n, sc.shifts);
            for (int i = 0; i < n_ch; ++i) {
                eps[i] = epsilon_single(n, sc.k, channels.snrs[i]).value;
                epochs.push_back({schedule.shifts[i] + n, i});
            }
            break;
        }
    }

    const int n_streams = static_cast<int>(eps.size());
    std::vector<Xoshiro256pp> streams;
    streams.reserve(n_streams);
    for (int i = 0; i < n_streams; ++i) streams.emplace_back(config.seed, static_cast<std::uint64_t>(i));

    RunData data;
    data.period = n;
    data.attempts.assign(n_streams, 0);
    data.successes.assign(n_streams, 0);

    const auto horizon = static_cast<double>(config.horizon);
    const auto warmup_t = static_cast<double>(warmup);
    double prev_success_time = -1.0;
    int prev_success_channel = 0;
    bool anchored = false;

    for (std::int64_t m = 0;; ++m) {
        const double base = static_cast<double>(m) * n;
        if (base + epochs.front().offset > horizon) break;
        for (const Epoch& ep : epochs) {
            const double t = base + ep.offset;
            if (t > horizon) break;

            bool success = false;
            int channel = 0;
            if (ep.mp_channel >= 0) {
                channel = ep.mp_channel;
                ++data.attempts[channel];
                success = streams[channel].next_double() >= eps[channel];
                if (success) ++data.successes[channel];
            } else if (sc.scheme == Scheme::pd) {
                for (int i = 0; i < n_ch; ++i) {
                    ++data.attempts[i];
                    const bool ok = streams[i].next_double() >= eps[i];
                    if (ok) ++data.successes[i];
                    success = success || ok;
                }
            } else if (sc.scheme == Scheme::ms) {
                success = true;
                for (int i = 0; i < n_ch; ++i) {
                    if (sc.splits[i] <= 0) continue;
                    ++data.attempts[i];
                    const bool ok = streams[i].next_double() >= eps[i];
                    if (ok) ++data.successes[i];
                    success = success && ok;
                }
            } else {  // SC and CS: one aggregate decode
                ++data.attempts[0];
                success = streams[0].next_double() >= eps[0];
                if (success) ++data.successes[0];
            }

            if (!success) continue;
            if (!anchored) {
                if (t >= warmup_t) {
                    anchored = true;
                    data.window_start = t;
                    prev_success_time = t;
                    prev_success_channel = channel;
                }
            } else {
                data.cycles.push_back({prev_success_time, t - prev_success_time, prev_success_channel});
                prev_success_time = t;
                prev_success_channel = channel;
            }
        }
    }

    if (data.cycles.empty())
        throw NoDataError("simulate: horizon contains no complete renewal interval after warmup");
    data.window_end = prev_success_time;
    return data;
}

}  // namespace

SimResult simulate(const SimConfig& config) {
    const RunData data = run(config);
    const double n = data.period;

    SimResult result;
    result.renewal_count = static_cast<std::int64_t>(data.cycles.size());
    result.attempts_per_channel = data.attempts;
    result.successes_per_channel = data.successes;

    // Exact sawtooth area: each interval contributes a rectangle n*L plus a
    // triangle L^2/2.
    double total_area = 0.0;
    for (const Cycle& c : data.cycles) total_area += n * c.length + 0.5 * c.length * c.length;
    const double window = data.window_end - data.window_start;
    result.measured_time = window;
    result.avg_aoi = total_area / window;

    // 95% CI via batch means over equal-time slices of the window.
    std::vector<double> batch_area(kBatchCount, 0.0);
    const double slice = window / kBatchCount;
    for (const Cycle& c : data.cycles) {
        double a = c.start;
        const double b = c.start + c.length;
        while (a < b) {
            auto j = static_cast<int>((a - data.window_start) / slice);
            j = std::clamp(j, 0, kBatchCount - 1);
            const double boundary = data.window_start + (j + 1) * slice;
            // the last batch absorbs boundary rounding at the window end
            double y = j >= kBatchCount - 1 ? b : std::min(b, boundary);
            if (y <= a) y = b;
            batch_area[j] += n * (y - a) + 0.5 * ((y - c.start) * (y - c.start) -
                                                  (a - c.start) * (a - c.start));
            if (y >= b) break;
            a = y;
        }
    }
    double mean = 0.0;
    for (double area : batch_area) mean += area / slice;
    mean /= kBatchCount;
    double var = 0.0;
    for (double area : batch_area) {
        const double d = area / slice - mean;
        var += d * d;
    }
    var /= (kBatchCount - 1);
    result.ci_halfwidth = kNormal975 * std::sqrt(var / kBatchCount);
    return result;
}

MpMomentEstimate simulate_mp_moments(const SimConfig& config) {
    require(config.scheme.scheme == Scheme::mp, "simulate_mp_moments: MP scheme required");
    const RunData data = run(config);
    const auto n_ch = config.channels.size();

    MpMomentEstimate est;
    est.first.assign(n_ch, 0.0);
    est.second.assign(n_ch, 0.0);
    est.counts.assign(n_ch, 0);
    for (const Cycle& c : data.cycles) {
        est.first[c.start_channel] += c.length;
        est.second[c.start_channel] += c.length * c.length;
        ++est.counts[c.start_channel];
    }
    for (std::size_t i = 0; i < n_ch; ++i) {
        if (est.counts[i] == 0) continue;
        est.first[i] /= static_cast<double>(est.counts[i]);
        est.second[i] /= static_cast<double>(est.counts[i]);
    }
    return est;
}

}  // namespace aoimc
