#ifndef AOIMC_OPTIMIZE_HPP
#define AOIMC_OPTIMIZE_HPP

#include <string>
#include <vector>

#include "aoimc/aoi.hpp"
#include "aoimc/channel.hpp"

namespace aoimc {

/// Per-channel message-bit allocation for the MS scheme. `continuous` marks
/// pre-rounding real values from the KKT solve.
struct SplitAllocation {
    std::vector<double> splits;
    bool continuous = false;

    std::vector<int> as_integers() const;
};

struct BlocklengthRange {
    int n_min = 1;
    int n_max = 1;
};

/// Default integer search range: n_min = ceil(k / sum of channel capacities)
/// (below it the matched scheme cannot beat coin flipping) and n_max = 50*k.
BlocklengthRange default_blocklength_range(int k, const ChannelSet& channels);

struct TracePoint {
    int n = 0;
    double aoi = 0.0;
};

struct OptimumReport {
    Scheme scheme = Scheme::sc;
    int best_n = 0;
    double best_aoi = 0.0;
    SplitAllocation best_splits;  ///< MS only
    Schedule best_shifts;         ///< MP only
    bool shifts_exhaustive = true;  ///< MP heterogeneous: search mode of best_shifts
    std::vector<TracePoint> trace;
    bool boundary_minimum = false;
    std::vector<std::string> warnings;
};

/// Exhaustive integer scan of the average AoI over n in [n_min, n_max] for
/// SC, PD, CS and MP (MS needs the split optimizer, see optimize_ms).
/// Equal-SNR MP uses the uniform-schedule closed form; heterogeneous MP
/// optimizes integer shifts per candidate n and, unless full_trace is set,
/// stops the scan once n >= best AoI so far (no larger n can win since
/// AoI(n) > n), which truncates the trace but not the optimum.
OptimumReport optimize_blocklength(Scheme scheme, int k, const ChannelSet& channels, int n_min,
                                   int n_max, bool full_trace = true);

/// Continuous KKT-optimal allocation of k bits over the channels for fixed n:
/// maximizes sum_i log Phi(A_i (B_i - k_i/n)) subject to sum k_i = k,
/// k_i >= 0, by bisection on the shared marginal derivative.
SplitAllocation optimize_split(int n, double k, const ChannelSet& channels);

/// Joint (n, splits) optimization of the MS scheme: per candidate n the
/// continuous KKT solve is rounded (largest remainder) and refined by a
/// local search over single-bit transfers and whole-channel drops, seeded
/// from both the KKT and the capacity-proportional roundings. Unless
/// full_trace is set the scan stops once 3n/2 >= best AoI so far.
OptimumReport optimize_ms(int k, const ChannelSet& channels, int n_min, int n_max,
                          bool full_trace = false);

/// Best multiplexing schedule for N equal-SNR channels: uniform offsets
/// i*n/N (rounded per coordinate when integer_offsets is set).
Schedule optimal_shifts(int n, int num_channels, bool integer_offsets = false);

struct ShiftSearchResult {
    Schedule schedule;
    bool exhaustive = false;  ///< true: integer-shift optimum; false: coordinate descent
    double aoi = 0.0;
};

/// Best integer-shift schedule for per-channel error probabilities.
/// Exhaustive enumeration when N <= 4 and the ordered-tuple count is
/// manageable, cyclic coordinate descent from the uniform schedule otherwise.
ShiftSearchResult optimize_shifts_heterogeneous(int n, const std::vector<ErrorProbability>& eps);

/// Baseline split: bits proportional to the per-channel Shannon capacities,
/// rounded by largest remainder.
SplitAllocation capacity_proportional_split(int k, const ChannelSet& channels);

/// Convention-aware MS error probability for integer splits.
ErrorProbability ms_split_epsilon(int n, const std::vector<int>& splits,
                                  const ChannelSet& channels);

/// Integer MS optimum for fixed n: largest-remainder rounding of `start`
/// followed by the local search described at optimize_ms.
std::vector<int> refine_integer_splits(int n, int k, const ChannelSet& channels,
                                       const std::vector<double>& start);

struct SchemeComparison {
    OptimumReport sc;
    OptimumReport pd;
    OptimumReport mp;
    OptimumReport cs;
    OptimumReport ms;
    /// For equal-SNR channels the CS <= MP <= PD ordering is asserted; any
    /// violation is recorded here instead of being silently accepted.
    std::vector<std::string> defects;
};

/// Optimizes every scheme over the same blocklength range side by side.
SchemeComparison compare_schemes(int k, const ChannelSet& channels, int n_min, int n_max);

}  // namespace aoimc

#endif
