#include "aoimc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace aoimc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool equal_snr(const ChannelSet& channels) {
    for (double g : channels.snrs)
        if (g != channels.snrs.front()) return false;
    return true;
}

/// Inverse of the Mills-ratio reciprocal: the unique x with
/// phi(x)/Phi(x) = rho (rho > 0). Safeguarded Newton; the function is
/// strictly decreasing with derivative -r(x)(x + r(x)).
double invert_phi_ratio(double rho) {
    double lo, hi;
    const double r0 = std::sqrt(2.0 / std::numbers::pi);
    if (rho >= r0) {
        lo = -(rho + 2.0);  // r(x) > -x for x < 0, so r(lo) > rho
        hi = 0.0;
    } else {
        lo = 0.0;
        hi = 1.0;
        while (phi_over_big_phi(hi) > rho && hi < 1e12) {
            lo = hi;
            hi *= 2.0;
        }
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double r = phi_over_big_phi(x);
        const double f = r - rho;
        if (f > 0.0)
            lo = x;
        else
            hi = x;
        const double fp = -r * (x + r);
        double next = x - f / fp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

struct SplitProblem {
    int n = 1;
    double k = 0.0;
    std::vector<double> a;
    std::vector<double> b;

    /// Marginal derivative of log Phi(A_i(B_i - k_i/n)) w.r.t. k_i.
    double derivative(std::size_t i, double bits) const {
        const double x = a[i] * (b[i] - bits / n);
        return -(a[i] / n) * phi_over_big_phi(x);
    }

    /// Allocation at multiplier nu: k_i solving derivative == nu, clamped
    /// into [0, k]. nu must be negative (all derivatives are).
    double allocation(std::size_t i, double nu) const {
        const double rho = -nu * n / a[i];
        const double x = invert_phi_ratio(rho);
        return std::clamp(n * (b[i] - x / a[i]), 0.0, k);
    }
};

std::vector<int> round_largest_remainder(const std::vector<double>& cont, int k) {
    const std::size_t n_ch = cont.size();
    std::vector<int> out(n_ch, 0);
    std::vector<double> rem(n_ch, 0.0);
    long long assigned = 0;
    for (std::size_t i = 0; i < n_ch; ++i) {
        const double floor_i = std::floor(cont[i]);
        out[i] = static_cast<int>(floor_i);
        rem[i] = cont[i] - floor_i;
        assigned += out[i];
    }
    long long leftover = k - assigned;
    std::vector<std::size_t> order(n_ch);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return rem[l] > rem[r]; });
    for (std::size_t idx = 0; leftover > 0 && idx < n_ch; ++idx, --leftover) ++out[order[idx]];
    for (std::size_t idx = n_ch; leftover < 0 && idx-- > 0;) {
        if (out[order[idx]] > 0) {
            --out[order[idx]];
            ++leftover;
        }
    }
    return out;
}

/// Strict-improvement local search on the true (convention-aware) MS error:
/// single-bit transfers plus whole-channel drops.
std::vector<int> local_search_splits(int n, std::vector<int> splits, const ChannelSet& channels) {
    double cur = ms_split_epsilon(n, splits, channels).value;
    const std::size_t n_ch = splits.size();
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i < n_ch; ++i) {
            if (splits[i] == 0) continue;
            for (std::size_t j = 0; j < n_ch; ++j) {
                if (j == i) continue;
                --splits[i];
                ++splits[j];
                double cand = ms_split_epsilon(n, splits, channels).value;
                if (cand < cur) {
                    cur = cand;
                    improved = true;
                } else {
                    ++splits[i];
                    --splits[j];
                }
                if (splits[i] == 0) break;
            }
            if (splits[i] < 2) continue;
            for (std::size_t j = 0; j < n_ch; ++j) {
                if (j == i) continue;
                const int moved = splits[i];
                splits[i] = 0;
                splits[j] += moved;
                double cand = ms_split_epsilon(n, splits, channels).value;
                if (cand < cur) {
                    cur = cand;
                    improved = true;
                    break;
                }
                splits[i] = moved;
                splits[j] -= moved;
            }
        }
    }
    return splits;
}

double binomial_count(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
    return v;
}

double mp_schedule_aoi(int n, const std::vector<double>& deltas,
                       const std::vector<ErrorProbability>& eps) {
    return aoi_mp_general(Schedule(n, deltas), eps).result.avg_aoi;
}

}  // namespace

std::vector<int> SplitAllocation::as_integers() const {
    std::vector<int> out(splits.size());
    for (std::size_t i = 0; i < splits.size(); ++i) out[i] = static_cast<int>(std::llround(splits[i]));
    return out;
}

BlocklengthRange default_blocklength_range(int k, const ChannelSet& channels) {
    require(k >= 0, "default_blocklength_range: k must be >= 0");
    BlocklengthRange r;
    if (k == 0) return {1, 50};
    r.n_min = std::max(1, static_cast<int>(std::ceil(k / channels.capacity_sum())));
    r.n_max = std::max(r.n_min, 50 * k);
    return r;
}

ErrorProbability ms_split_epsilon(int n, const std::vector<int>& splits,
                                  const ChannelSet& channels) {
    std::vector<double> s(splits.begin(), splits.end());
    return epsilon_ms(n, s, channels);
}

Schedule optimal_shifts(int n, int num_channels, bool integer_offsets) {
    return integer_offsets ? Schedule::uniform_integer(n, num_channels)
                           : Schedule::uniform(n, num_channels);
}

SplitAllocation optimize_split(int n, double k, const ChannelSet& channels) {
    require(n >= 1, "optimize_split: blocklength must be >= 1");
    require(k >= 0.0 && std::isfinite(k), "optimize_split: k must be >= 0");
    const std::size_t n_ch = channels.size();
    SplitAllocation out;
    out.continuous = true;
    out.splits.assign(n_ch, 0.0);
    if (k == 0.0) return out;
    if (n_ch == 1) {
        out.splits[0] = k;
        return out;
    }

    SplitProblem prob;
    prob.n = n;
    prob.k = k;
    prob.a.resize(n_ch);
    prob.b.resize(n_ch);
    for (std::size_t i = 0; i < n_ch; ++i) {
        const auto c = normal_approx_coefficients(n, channels.snrs[i]);
        prob.a[i] = c.a;
        prob.b[i] = c.b;
    }

    // Bracket the shared multiplier: at nu_lo some channel wants all k bits,
    // at nu_hi every channel wants none.
    double nu_lo = kInf;
    double nu_hi = -kInf;
    for (std::size_t i = 0; i < n_ch; ++i) {
        nu_lo = std::min(nu_lo, prob.derivative(i, k));
        nu_hi = std::max(nu_hi, prob.derivative(i, 0.0));
    }

    double nu = 0.5 * (nu_lo + nu_hi);
    for (int it = 0; it < 200; ++it) {
        nu = 0.5 * (nu_lo + nu_hi);
        double total = 0.0;
        for (std::size_t i = 0; i < n_ch; ++i) total += prob.allocation(i, nu);
        if (std::abs(total - k) <= 1e-13 * k) break;
        if (total > k)
            nu_lo = nu;
        else
            nu_hi = nu;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n_ch; ++i) {
        out.splits[i] = prob.allocation(i, nu);
        total += out.splits[i];
    }
    if (total > 0.0) {
        const double scale = k / total;
        for (double& s : out.splits) s *= scale;
    }
    return out;
}

std::vector<int> refine_integer_splits(int n, int k, const ChannelSet& channels,
                                       const std::vector<double>& start) {
    require(start.size() == channels.size(), "refine_integer_splits: size mismatch");
    return local_search_splits(n, round_largest_remainder(start, k), channels);
}

SplitAllocation capacity_proportional_split(int k, const ChannelSet& channels) {
    require(k >= 0, "capacity_proportional_split: k must be >= 0");
    const double cap_sum = channels.capacity_sum();
    std::vector<double> cont(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i)
        cont[i] = k * channels.capacity(i) / cap_sum;
    SplitAllocation out;
    out.continuous = false;
    const auto ints = round_largest_remainder(cont, k);
    out.splits.assign(ints.begin(), ints.end());
    return out;
}

ShiftSearchResult optimize_shifts_heterogeneous(int n, const std::vector<ErrorProbability>& eps) {
    require(n >= 1, "optimize_shifts_heterogeneous: period must be >= 1");
    const int n_ch = static_cast<int>(eps.size());
    require(n_ch >= 1, "optimize_shifts_heterogeneous: need at least one channel");

    ShiftSearchResult best;
    if (n_ch == 1) {
        best.schedule = Schedule(n, {0.0});
        best.exhaustive = true;
        best.aoi = aoi_mp_general(best.schedule, eps).result.avg_aoi;
        return best;
    }

    const bool exhaustive = n_ch <= 4 && binomial_count(n + n_ch - 2, n_ch - 1) <= 300000.0;
    if (exhaustive) {
        std::vector<int> d(n_ch - 1, 0);
        std::vector<double> deltas(n_ch, 0.0);
        best.aoi = kInf;
        for (;;) {
            for (int i = 0; i < n_ch - 1; ++i) deltas[i + 1] = d[i];
            const double aoi = mp_schedule_aoi(n, deltas, eps);
            if (aoi < best.aoi) {
                best.aoi = aoi;
                best.schedule = Schedule(n, deltas);
            }
            int pos = n_ch - 2;
            while (pos >= 0 && d[pos] == n - 1) --pos;
            if (pos < 0) break;
            ++d[pos];
            for (int q = pos + 1; q < n_ch - 1; ++q) d[q] = d[pos];
        }
        best.exhaustive = true;
        return best;
    }

    // Cyclic coordinate descent over integer offsets from the uniform start.
    Schedule cur = Schedule::uniform_integer(n, n_ch);
    double cur_aoi = aoi_mp_general(cur, eps).result.avg_aoi;
    bool changed = true;
    for (int pass = 0; changed && pass < 60; ++pass) {
        changed = false;
        for (int i = 1; i < n_ch; ++i) {
            const int lo = static_cast<int>(cur.shifts[i - 1]);
            const int hi = (i + 1 < n_ch) ? static_cast<int>(cur.shifts[i + 1]) : n - 1;
            for (int v = lo; v <= hi; ++v) {
                if (v == static_cast<int>(cur.shifts[i])) continue;
                std::vector<double> deltas = cur.shifts;
                deltas[i] = v;
                const double aoi = mp_schedule_aoi(n, deltas, eps);
                if (aoi < cur_aoi) {
                    cur_aoi = aoi;
                    cur = Schedule(n, deltas);
                    changed = true;
                }
            }
        }
    }
    best.schedule = cur;
    best.exhaustive = false;
    best.aoi = cur_aoi;
    return best;
}

OptimumReport optimize_blocklength(Scheme scheme, int k, const ChannelSet& channels, int n_min,
                                   int n_max, bool full_trace) {
    require(scheme != Scheme::ms, "optimize_blocklength: use optimize_ms for MS");
    require(k >= 0, "optimize_blocklength: k must be >= 0");
    require(n_min >= 1 && n_min <= n_max, "optimize_blocklength: empty range");
    const int n_ch = static_cast<int>(channels.size());
    const bool equal = equal_snr(channels);

    OptimumReport rep;
    rep.scheme = scheme;
    rep.best_aoi = kInf;
    for (int n = n_min; n <= n_max; ++n) {
        double aoi = kInf;
        Schedule shifts;
        bool exhaustive = true;
        if (scheme == Scheme::mp) {
            if (equal) {
                aoi = aoi_mp_equal_snr(n, n_ch, epsilon_single(n, k, channels.snrs.front())).avg_aoi;
                shifts = Schedule::uniform(n, n_ch);
            } else {
                if (!full_trace && static_cast<double>(n) >= rep.best_aoi) break;
                std::vector<ErrorProbability> eps(n_ch);
                for (int i = 0; i < n_ch; ++i) eps[i] = epsilon_single(n, k, channels.snrs[i]);
                const ShiftSearchResult sr = optimize_shifts_heterogeneous(n, eps);
                aoi = sr.aoi;
                shifts = sr.schedule;
                exhaustive = sr.exhaustive;
            }
        } else {
            SchemeConfig cfg;
            cfg.scheme = scheme;
            cfg.n = n;
            cfg.k = k;
            aoi = aoi_scheme(cfg, channels).avg_aoi;
        }
        rep.trace.push_back({n, aoi});
        if (aoi < rep.best_aoi) {
            rep.best_aoi = aoi;
            rep.best_n = n;
            if (scheme == Scheme::mp) {
                rep.best_shifts = shifts;
                rep.shifts_exhaustive = exhaustive;
            }
        }
    }
    if (!std::isfinite(rep.best_aoi))
        throw std::runtime_error("optimize_blocklength: every candidate blocklength diverges");
    if (rep.best_n == n_min || rep.best_n == n_max) {
        rep.boundary_minimum = true;
        rep.warnings.push_back("minimum attained at range boundary n=" + std::to_string(rep.best_n));
    }
    return rep;
}

OptimumReport optimize_ms(int k, const ChannelSet& channels, int n_min, int n_max,
                          bool full_trace) {
    require(k >= 0, "optimize_ms: k must be >= 0");
    require(n_min >= 1 && n_min <= n_max, "optimize_ms: empty range");

    OptimumReport rep;
    rep.scheme = Scheme::ms;
    rep.best_aoi = kInf;
    const SplitAllocation proportional = capacity_proportional_split(k, channels);

    for (int n = n_min; n <= n_max; ++n) {
        if (!full_trace && 1.5 * n >= rep.best_aoi) break;
        const SplitAllocation cont = optimize_split(n, k, channels);
        std::vector<int> splits = refine_integer_splits(n, k, channels, cont.splits);
        const std::vector<int> alt = refine_integer_splits(n, k, channels, proportional.splits);
        if (ms_split_epsilon(n, alt, channels).value < ms_split_epsilon(n, splits, channels).value)
            splits = alt;

        const AoiResult r = aoi_renewal(n, ms_split_epsilon(n, splits, channels));
        rep.trace.push_back({n, r.avg_aoi});
        if (r.avg_aoi < rep.best_aoi) {
            rep.best_aoi = r.avg_aoi;
            rep.best_n = n;
            rep.best_splits.continuous = false;
            rep.best_splits.splits.assign(splits.begin(), splits.end());
        }
    }
    if (!std::isfinite(rep.best_aoi))
        throw std::runtime_error("optimize_ms: every candidate blocklength diverges");
    if (rep.best_n == n_min || rep.best_n == n_max) {
        rep.boundary_minimum = true;
        rep.warnings.push_back("minimum attained at range boundary n=" + std::to_string(rep.best_n));
    }
    return rep;
}

SchemeComparison compare_schemes(int k, const ChannelSet& channels, int n_min, int n_max) {
    SchemeComparison cmp;
    cmp.sc = optimize_blocklength(Scheme::sc, k, channels, n_min, n_max);
    cmp.pd = optimize_blocklength(Scheme::pd, k, channels, n_min, n_max);
    cmp.mp = optimize_blocklength(Scheme::mp, k, channels, n_min, n_max, /*full_trace=*/false);
    cmp.cs = optimize_blocklength(Scheme::cs, k, channels, n_min, n_max);
    cmp.ms = optimize_ms(k, channels, n_min, n_max);
    if (equal_snr(channels)) {
        if (!(cmp.cs.best_aoi <= cmp.mp.best_aoi))
            cmp.defects.push_back("ordering violated: CS optimum above MP optimum");
        if (!(cmp.mp.best_aoi <= cmp.pd.best_aoi))
            cmp.defects.push_back("ordering violated: MP optimum above PD optimum");
    }
    return cmp;
}

}  // namespace aoimc
