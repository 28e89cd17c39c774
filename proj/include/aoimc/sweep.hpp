#ifndef AOIMC_SWEEP_HPP
#define AOIMC_SWEEP_HPP

#include <string>
#include <vector>

#include "json.hpp"

namespace aoimc {

enum class SweepKind { equal_snr, two_channel_heterogeneity, three_channel_split };

const char* sweep_kind_name(SweepKind kind);
SweepKind parse_sweep_kind(const std::string& name);

/// Grid description for the three built-in experiment families. The
/// heterogeneity sweeps hold the SNR sum fixed while moving gamma0.
struct SweepSpec {
    SweepKind kind = SweepKind::equal_snr;
    int k = 16;
    std::vector<int> num_channels = {2};           ///< equal-snr sweep
    std::vector<double> gammas = {1, 2, 3, 4, 5};  ///< equal-snr sweep
    double sum_snr = 4.0;                          ///< heterogeneity sweeps
    double gamma0_start = 2.0;
    double gamma0_stop = 3.9;
    double gamma0_step = 0.1;
    double gamma2 = 2.8;  ///< three-channel sweep, fixed third channel
    int n_min = -1;       ///< -1 selects the default range per cell
    int n_max = -1;

    nlohmann::json to_json() const;
    static SweepSpec from_json(const nlohmann::json& j);
};

/// One output row: values aligned with SweepResult::columns. Failed cells
/// hold NaN and the reason lands in `error`; divergent optima hold +inf.
struct SweepRow {
    std::vector<double> values;
    std::string error;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<std::string> columns;
    std::vector<SweepRow> rows;
};

/// Evaluates the grid; rows are computed concurrently and assembled in grid
/// order, so serialization is byte-deterministic.
SweepResult run_sweep(const SweepSpec& spec);

/// CSV with a header row, 9-significant-digit numbers, "inf" for divergent
/// values, empty cells for failures and a trailing `error` column.
std::string sweep_to_csv(const SweepResult& result);

/// JSON document with the echoed spec; non-finite values become null with a
/// per-column flag.
nlohmann::json sweep_to_json(const SweepResult& result);

/// Fixed-format numeric cell used by all machine-readable output.
std::string format_number(double v);

}  // namespace aoimc

#endif
