#include "aoimc/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "aoimc/aoi.hpp"
#include "aoimc/optimize.hpp"

namespace aoimc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void parallel_rows(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

BlocklengthRange cell_range(const SweepSpec& spec, int k, const ChannelSet& channels) {
    BlocklengthRange r = default_blocklength_range(k, channels);
    if (spec.n_min > 0) r.n_min = spec.n_min;
    if (spec.n_max > 0) r.n_max = spec.n_max;
    return r;
}

std::vector<double> gamma0_grid(const SweepSpec& spec) {
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double g0 = spec.gamma0_start + i * spec.gamma0_step;
        if (g0 > spec.gamma0_stop + 0.5 * spec.gamma0_step) break;
        grid.push_back(g0);
    }
    return grid;
}

/// Minimum AoI over n with a fixed (n-independent) integer split.
double optimize_fixed_split(int k, const ChannelSet& channels, const std::vector<int>& splits,
                            const BlocklengthRange& range, int& best_n) {
    double best = std::numeric_limits<double>::infinity();
    best_n = 0;
    for (int n = range.n_min; n <= range.n_max; ++n) {
        if (1.5 * n >= best) break;
        const double aoi = aoi_renewal(n, ms_split_epsilon(n, splits, channels)).avg_aoi;
        if (aoi < best) {
            best = aoi;
            best_n = n;
        }
    }
    if (!std::isfinite(best)) throw std::runtime_error("fixed-split scan: every blocklength diverges");
    (void)k;
    return best;
}

SweepResult sweep_equal_snr(const SweepSpec& spec) {
    SweepResult out;
    out.spec = spec;
    out.columns = {"N",      "gamma",  "k",      "aoi_sc", "n_sc",   "aoi_pd", "n_pd",
                   "aoi_mp", "n_mp",   "aoi_cs", "n_cs",   "aoi_ms", "n_ms"};
    struct Point {
        int n_ch;
        double gamma;
    };
    std::vector<Point> grid;
    for (int n_ch : spec.num_channels)
        for (double g : spec.gammas) grid.push_back({n_ch, g});
    out.rows.resize(grid.size());

    parallel_rows(grid.size(), [&](std::size_t i) {
        SweepRow& row = out.rows[i];
        row.values.assign(out.columns.size(), kNaN);
        row.values[0] = grid[i].n_ch;
        row.values[1] = grid[i].gamma;
        row.values[2] = spec.k;
        try {
            const ChannelSet channels(std::vector<double>(grid[i].n_ch, grid[i].gamma));
            const BlocklengthRange r = cell_range(spec, spec.k, channels);
            const SchemeComparison cmp = compare_schemes(spec.k, channels, r.n_min, r.n_max);
            row.values[3] = cmp.sc.best_aoi;
            row.values[4] = cmp.sc.best_n;
            row.values[5] = cmp.pd.best_aoi;
            row.values[6] = cmp.pd.best_n;
            row.values[7] = cmp.mp.best_aoi;
            row.values[8] = cmp.mp.best_n;
            row.values[9] = cmp.cs.best_aoi;
            row.values[10] = cmp.cs.best_n;
            row.values[11] = cmp.ms.best_aoi;
            row.values[12] = cmp.ms.best_n;
            for (const std::string& d : cmp.defects) row.error += (row.error.empty() ? "" : "; ") + d;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return out;
}

SweepResult sweep_two_channel(const SweepSpec& spec) {
    SweepResult out;
    out.spec = spec;
    out.columns = {"gamma0", "gamma1", "k",      "aoi_sc0", "n_sc0", "aoi_pd", "n_pd",  "aoi_mp",
                   "n_mp",   "aoi_cs", "n_cs",   "aoi_ms",  "n_ms",  "ms_k0",  "ms_k1"};
    const std::vector<double> grid = gamma0_grid(spec);
    out.rows.resize(grid.size());

    parallel_rows(grid.size(), [&](std::size_t i) {
        SweepRow& row = out.rows[i];
        row.values.assign(out.columns.size(), kNaN);
        const double g0 = grid[i];
        const double g1 = spec.sum_snr - g0;
        row.values[0] = g0;
        row.values[1] = g1;
        row.values[2] = spec.k;
        try {
            const ChannelSet strong({g0});
            const ChannelSet pair({g0, g1});
            const BlocklengthRange r_sc = cell_range(spec, spec.k, strong);
            const BlocklengthRange r = cell_range(spec, spec.k, pair);

            const OptimumReport sc = optimize_blocklength(Scheme::sc, spec.k, strong, r_sc.n_min, r_sc.n_max);
            const OptimumReport pd = optimize_blocklength(Scheme::pd, spec.k, pair, r.n_min, r.n_max);
            const OptimumReport mp =
                optimize_blocklength(Scheme::mp, spec.k, pair, r.n_min, r.n_max, /*full_trace=*/false);
            const OptimumReport cs = optimize_blocklength(Scheme::cs, spec.k, pair, r.n_min, r.n_max);
            const OptimumReport ms = optimize_ms(spec.k, pair, r.n_min, r.n_max);

            row.values[3] = sc.best_aoi;
            row.values[4] = sc.best_n;
            row.values[5] = pd.best_aoi;
            row.values[6] = pd.best_n;
            row.values[7] = mp.best_aoi;
            row.values[8] = mp.best_n;
            row.values[9] = cs.best_aoi;
            row.values[10] = cs.best_n;
            row.values[11] = ms.best_aoi;
            row.values[12] = ms.best_n;
            row.values[13] = ms.best_splits.splits.at(0);
            row.values[14] = ms.best_splits.splits.at(1);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return out;
}

SweepResult sweep_three_channel_split(const SweepSpec& spec) {
    SweepResult out;
    out.spec = spec;
    out.columns = {"gamma0",     "gamma1", "gamma2",          "k",
                   "aoi_ms_kkt", "n_ms_kkt", "aoi_ms_capacity", "n_ms_capacity",
                   "aoi_sc0",    "n_sc0"};
    const std::vector<double> grid = gamma0_grid(spec);
    out.rows.resize(grid.size());

    parallel_rows(grid.size(), [&](std::size_t i) {
        SweepRow& row = out.rows[i];
        row.values.assign(out.columns.size(), kNaN);
        const double g0 = grid[i];
        const double g1 = spec.sum_snr - g0;
        row.values[0] = g0;
        row.values[1] = g1;
        row.values[2] = spec.gamma2;
        row.values[3] = spec.k;
        try {
            const ChannelSet triple({g0, g1, spec.gamma2});
            const ChannelSet strong({g0});
            const BlocklengthRange r = cell_range(spec, spec.k, triple);
            const BlocklengthRange r_sc = cell_range(spec, spec.k, strong);

            const OptimumReport kkt = optimize_ms(spec.k, triple, r.n_min, r.n_max);
            const SplitAllocation proportional = capacity_proportional_split(spec.k, triple);
            int n_capacity = 0;
            const double aoi_capacity =
                optimize_fixed_split(spec.k, triple, proportional.as_integers(), r, n_capacity);
            const OptimumReport sc = optimize_blocklength(Scheme::sc, spec.k, strong, r_sc.n_min, r_sc.n_max);

            row.values[4] = kkt.best_aoi;
            row.values[5] = kkt.best_n;
            row.values[6] = aoi_capacity;
            row.values[7] = n_capacity;
            row.values[8] = sc.best_aoi;
            row.values[9] = sc.best_n;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return out;
}

}  // namespace

const char* sweep_kind_name(SweepKind kind) {
    switch (kind) {
        case SweepKind::equal_snr: return "equal-snr";
        case SweepKind::two_channel_heterogeneity: return "two-channel-heterogeneity";
        case SweepKind::three_channel_split: return "three-channel-split";
    }
    return "?";
}

SweepKind parse_sweep_kind(const std::string& name) {
    if (name == "equal-snr") return SweepKind::equal_snr;
    if (name == "two-channel-heterogeneity") return SweepKind::two_channel_heterogeneity;
    if (name == "three-channel-split") return SweepKind::three_channel_split;
    throw std::invalid_argument("unknown sweep kind: " + name);
}

nlohmann::json SweepSpec::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = sweep_kind_name(kind);
    j["k"] = k;
    j["num_channels"] = num_channels;
    j["gammas"] = gammas;
    j["sum_snr"] = sum_snr;
    j["gamma0_start"] = gamma0_start;
    j["gamma0_stop"] = gamma0_stop;
    j["gamma0_step"] = gamma0_step;
    j["gamma2"] = gamma2;
    j["n_min"] = n_min;
    j["n_max"] = n_max;
    return j;
}

SweepSpec SweepSpec::from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 1) != 1)
        throw std::invalid_argument("sweep config: unsupported schema_version");
    SweepSpec spec;
    spec.kind = parse_sweep_kind(j.at("kind").get<std::string>());
    spec.k = j.value("k", spec.k);
    if (j.contains("num_channels")) spec.num_channels = j["num_channels"].get<std::vector<int>>();
    if (j.contains("gammas")) spec.gammas = j["gammas"].get<std::vector<double>>();
    spec.sum_snr = j.value("sum_snr", spec.sum_snr);
    spec.gamma0_start = j.value("gamma0_start", spec.gamma0_start);
    spec.gamma0_stop = j.value("gamma0_stop", spec.gamma0_stop);
    spec.gamma0_step = j.value("gamma0_step", spec.gamma0_step);
    spec.gamma2 = j.value("gamma2", spec.gamma2);
    spec.n_min = j.value("n_min", spec.n_min);
    spec.n_max = j.value("n_max", spec.n_max);
    return spec;
}

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.k < 1) throw std::invalid_argument("sweep: k must be >= 1");
    switch (spec.kind) {
        case SweepKind::equal_snr:
            if (spec.gammas.empty() || spec.num_channels.empty())
                throw std::invalid_argument("sweep: empty grid");
            return sweep_equal_snr(spec);
        case SweepKind::two_channel_heterogeneity:
            return sweep_two_channel(spec);
        case SweepKind::three_channel_split:
            return sweep_three_channel_split(spec);
    }
    throw std::invalid_argument("sweep: unknown kind");
}

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string sweep_to_csv(const SweepResult& result) {
    std::string csv;
    for (std::size_t c = 0; c < result.columns.size(); ++c) {
        csv += result.columns[c];
        csv += ',';
    }
    csv += "error\n";
    for (const SweepRow& row : result.rows) {
        for (double v : row.values) {
            csv += format_number(v);
            csv += ',';
        }
        csv += row.error;
        csv += '\n';
    }
    return csv;
}

nlohmann::json sweep_to_json(const SweepResult& result) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["spec"] = result.spec.to_json();
    j["columns"] = result.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const SweepRow& row : result.rows) {
        nlohmann::json obj;
        nlohmann::json flags = nlohmann::json::object();
        for (std::size_t c = 0; c < result.columns.size(); ++c) {
            const double v = row.values[c];
            if (std::isfinite(v)) {
                obj[result.columns[c]] = v;
            } else {
                obj[result.columns[c]] = nullptr;
                flags[result.columns[c]] = std::isinf(v) ? "divergent" : "failed";
            }
        }
        if (!flags.empty()) obj["flags"] = flags;
        if (!row.error.empty()) obj["error"] = row.error;
        rows.push_back(obj);
    }
    j["rows"] = rows;
    return j;
}

}  // namespace aoimc
