#include "aoimc/aoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace aoimc {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_equal(const std::vector<double>& v) {
    for (double x : v)
        if (x != v.front()) return false;
    return true;
}

/// Moments of the inter-reception times for equal eps, by unrolling the
/// cyclic recursion Y_i = T_i + X * Y_{(i+1) mod N}.
void mp_moments_equal(const std::vector<double>& waits, double eps, std::vector<double>& first,
                      std::vector<double>& second) {
    const int n_ch = static_cast<int>(waits.size());
    const double eps_cycle = std::pow(eps, n_ch);
    first.assign(n_ch, 0.0);
    second.assign(n_ch, 0.0);
    for (int i = 0; i < n_ch; ++i) {
        double pow_eps = 1.0;
        double sum = 0.0;
        for (int j = 0; j < n_ch; ++j) {
            sum += pow_eps * waits[(i + j) % n_ch];
            pow_eps *= eps;
        }
        first[i] = sum / (1.0 - eps_cycle);
    }
    for (int i = 0; i < n_ch; ++i) {
        double pow_eps = 1.0;
        double sum = 0.0;
        for (int j = 0; j < n_ch; ++j) {
            const double t = waits[(i + j) % n_ch];
            sum += pow_eps * t * t + 2.0 * pow_eps * eps * t * first[(i + j + 1) % n_ch];
            pow_eps *= eps;
        }
        second[i] = sum / (1.0 - eps_cycle);
    }
}

/// Heterogeneous case: dense N x N solve (partial-pivoting LU). The system is
/// E[Y_i] - eps_{(i+1) mod N} E[Y_{(i+1) mod N}] = T_i and the analogous one
/// for the second moments.
void mp_moments_hetero(const std::vector<double>& waits, const std::vector<double>& eps,
                       std::vector<double>& first, std::vector<double>& second) {
    const int n_ch = static_cast<int>(waits.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n_ch, n_ch);
    for (int i = 0; i < n_ch; ++i) a(i, (i + 1) % n_ch) -= eps[(i + 1) % n_ch];
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);

    Eigen::VectorXd rhs(n_ch);
    for (int i = 0; i < n_ch; ++i) rhs(i) = waits[i];
    const Eigen::VectorXd ey = lu.solve(rhs);

    for (int i = 0; i < n_ch; ++i) {
        const int next = (i + 1) % n_ch;
        rhs(i) = waits[i] * waits[i] + 2.0 * waits[i] * eps[next] * ey(next);
    }
    const Eigen::VectorXd ey2 = lu.solve(rhs);

    first.assign(ey.data(), ey.data() + n_ch);
    second.assign(ey2.data(), ey2.data() + n_ch);
}

/// Stationary distribution of the embedded chain over the channel of the
/// last successful reception. P(i -> (i+m) mod N), m = 1..N, is the chance
/// that the next m-1 opportunities fail and the m-th succeeds, normalized
/// over one cycle wrap.
std::vector<double> mp_stationary(const std::vector<double>& eps) {
    const int n_ch = static_cast<int>(eps.size());
    if (n_ch == 1) return {1.0};
    double cycle_failure = 1.0;
    for (double e : eps) cycle_failure *= e;

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_ch, n_ch);
    for (int i = 0; i < n_ch; ++i) {
        double fail_chain = 1.0;
        for (int m = 1; m <= n_ch; ++m) {
            const int target = (i + m) % n_ch;
            p(i, target) += fail_chain * (1.0 - eps[target]) / (1.0 - cycle_failure);
            fail_chain *= eps[target];
        }
    }

    Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n_ch, n_ch);
    a.row(n_ch - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_ch);
    b(n_ch - 1) = 1.0;
    const Eigen::VectorXd pi = a.partialPivLu().solve(b);
    return {pi.data(), pi.data() + n_ch};
}

}  // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::sc: return "sc";
        case Scheme::pd: return "pd";
        case Scheme::mp: return "mp";
        case Scheme::cs: return "cs";
        case Scheme::ms: return "ms";
    }
    return "?";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "sc") return Scheme::sc;
    if (name == "pd") return Scheme::pd;
    if (name == "mp") return Scheme::mp;
    if (name == "cs") return Scheme::cs;
    if (name == "ms") return Scheme::ms;
    throw std::invalid_argument("unknown scheme: " + name);
}

Schedule::Schedule(int n, std::vector<double> deltas) : period(n), shifts(std::move(deltas)) {
    require(period >= 1, "Schedule: period must be >= 1");
    require(!shifts.empty(), "Schedule: need at least one channel");
    require(shifts.front() == 0.0, "Schedule: delta_0 must be 0");
    for (std::size_t i = 1; i < shifts.size(); ++i)
        require(shifts[i] >= shifts[i - 1], "Schedule: offsets must be nondecreasing");
    require(shifts.back() < static_cast<double>(period), "Schedule: offsets must stay below the period");
}

Schedule Schedule::uniform(int n, int num_channels) {
    require(num_channels >= 1, "Schedule: need at least one channel");
    std::vector<double> deltas(num_channels);
    for (int i = 0; i < num_channels; ++i)
        deltas[i] = static_cast<double>(i) * static_cast<double>(n) / num_channels;
    return Schedule(n, std::move(deltas));
}

Schedule Schedule::uniform_integer(int n, int num_channels) {
    require(num_channels >= 1, "Schedule: need at least one channel");
    std::vector<double> deltas(num_channels);
    for (int i = 0; i < num_channels; ++i) {
        auto d = static_cast<double>(
            std::llround(static_cast<double>(i) * static_cast<double>(n) / num_channels));
        deltas[i] = std::min(d, static_cast<double>(n - 1));
    }
    return Schedule(n, std::move(deltas));
}

Schedule Schedule::aligned(int n, int num_channels) {
    require(num_channels >= 1, "Schedule: need at least one channel");
    return Schedule(n, std::vector<double>(num_channels, 0.0));
}

std::vector<double> Schedule::waiting_times() const {
    std::vector<double> waits(shifts.size());
    for (std::size_t i = 0; i + 1 < shifts.size(); ++i) waits[i] = shifts[i + 1] - shifts[i];
    waits.back() = static_cast<double>(period) - shifts.back();
    return waits;
}

bool AoiResult::has_flag(const std::string& flag) const {
    return std::find(quality_flags.begin(), quality_flags.end(), flag) != quality_flags.end();
}

ClampedEpsilon clamp_epsilon(ErrorProbability eps) {
    ClampedEpsilon out{eps.value, false};
    if (out.value < kEpsilonFloor) {
        out.value = kEpsilonFloor;
        out.clamped = true;
    } else if (out.value > kEpsilonCeil) {
        out.value = kEpsilonCeil;
        out.clamped = true;
    }
    return out;
}

AoiResult aoi_renewal(double period, ErrorProbability eps) {
    require(std::isfinite(period) && period > 0.0, "aoi_renewal: period must be positive");
    const ClampedEpsilon ce = clamp_epsilon(eps);
    AoiResult r;
    r.epsilon_used = ErrorProbability(ce.value);
    if (ce.clamped) r.quality_flags.push_back(kFlagEpsilonClamped);
    if (ce.value >= kEpsilonCeil) {
        r.avg_aoi = kInf;
        r.quality_flags.push_back(kFlagDivergent);
        return r;
    }
    r.avg_aoi = period * (1.0 + ce.value) / (2.0 * (1.0 - ce.value)) + period;
    return r;
}

ErrorProbability scheme_epsilon(const SchemeConfig& config, const ChannelSet& channels) {
    switch (config.scheme) {
        case Scheme::sc:
            return epsilon_single(config.n, config.k, channels.snrs.front());
        case Scheme::pd:
            return epsilon_pd(config.n, config.k, channels);
        case Scheme::cs:
            return epsilon_cs(config.n, config.k, channels);
        case Scheme::ms: {
            require(config.splits.size() == channels.size(),
                    "scheme_epsilon: MS splits/channel count mismatch");
            std::vector<double> splits(config.splits.begin(), config.splits.end());
            return epsilon_ms(config.n, splits, channels);
        }
        case Scheme::mp:
            break;
    }
    throw std::invalid_argument("scheme_epsilon: MP has per-channel epsilons, use aoi_mp_general");
}

AoiResult aoi_scheme(const SchemeConfig& config, const ChannelSet& channels) {
    require(config.scheme != Scheme::mp, "aoi_scheme: use aoi_mp_equal_snr/aoi_mp_general for MP");
    return aoi_renewal(static_cast<double>(config.n), scheme_epsilon(config, channels));
}

AoiResult aoi_mp_equal_snr(double n, int num_channels, ErrorProbability eps_single) {
    require(std::isfinite(n) && n > 0.0, "aoi_mp_equal_snr: period must be positive");
    require(num_channels >= 1, "aoi_mp_equal_snr: need at least one channel");
    const ClampedEpsilon ce = clamp_epsilon(eps_single);
    AoiResult r;
    r.epsilon_used = ErrorProbability(ce.value);
    if (ce.clamped) r.quality_flags.push_back(kFlagEpsilonClamped);
    if (ce.value >= kEpsilonCeil) {
        r.avg_aoi = kInf;
        r.quality_flags.push_back(kFlagDivergent);
        return r;
    }
    r.avg_aoi = n * (1.0 + ce.value) / (2.0 * num_channels * (1.0 - ce.value)) + n;
    return r;
}

MpAnalysis aoi_mp_general(const Schedule& schedule, const std::vector<ErrorProbability>& eps) {
    const int n_ch = schedule.size();
    require(static_cast<int>(eps.size()) == n_ch, "aoi_mp_general: eps/channel count mismatch");

    MpAnalysis out;
    std::vector<double> e(n_ch);
    bool any_clamped = false;
    bool all_dead = true;
    double cycle_failure = 1.0;
    for (int i = 0; i < n_ch; ++i) {
        const ClampedEpsilon ce = clamp_epsilon(eps[i]);
        e[i] = ce.value;
        any_clamped = any_clamped || ce.clamped;
        all_dead = all_dead && ce.value >= kEpsilonCeil;
        cycle_failure *= ce.value;
    }
    out.result.epsilon_used = ErrorProbability(cycle_failure);
    if (any_clamped) out.result.quality_flags.push_back(kFlagEpsilonClamped);
    if (all_dead) {
        out.result.avg_aoi = kInf;
        out.result.quality_flags.push_back(kFlagDivergent);
        return out;
    }

    const std::vector<double> waits = schedule.waiting_times();
    if (all_equal(e))
        mp_moments_equal(waits, e.front(), out.moments.first, out.moments.second);
    else
        mp_moments_hetero(waits, e, out.moments.first, out.moments.second);

    const std::vector<double> pi = mp_stationary(e);
    const double n = static_cast<double>(schedule.period);
    double weighted_area = 0.0;
    double weighted_length = 0.0;
    for (int i = 0; i < n_ch; ++i) {
        weighted_area += pi[i] * (0.5 * out.moments.second[i] + n * out.moments.first[i]);
        weighted_length += pi[i] * out.moments.first[i];
    }
    out.result.avg_aoi = weighted_area / weighted_length;

    out.moments.stationary_weights.assign(n_ch, 0.0);
    for (int i = 0; i < n_ch; ++i)
        out.moments.stationary_weights[i] = pi[i] * out.moments.first[i] / weighted_length;
    return out;
}

Eigen::MatrixXd mp_quadratic_form(int num_channels, ErrorProbability eps) {
    require(num_channels >= 1, "mp_quadratic_form: need at least one channel");
    const double e = eps.value;
    require(e > 0.0 && e < 1.0, "mp_quadratic_form: eps must be in (0,1)");
    std::vector<double> m(num_channels);
    for (int j = 0; j < num_channels; ++j)
        m[j] = (std::pow(e, j) + std::pow(e, num_channels - j)) / (1.0 - e);
    Eigen::MatrixXd mat(num_channels, num_channels);
    for (int i = 0; i < num_channels; ++i)
        for (int j = 0; j < num_channels; ++j) mat(i, j) = m[(j - i + num_channels) % num_channels];
    return mat;
}

std::vector<double> mp_eigenvalues(int num_channels, ErrorProbability eps) {
    require(num_channels >= 1, "mp_eigenvalues: need at least one channel");
    const double e = eps.value;
    require(e > 0.0 && e < 1.0, "mp_eigenvalues: eps must be in (0,1)");
    const double lead = (1.0 - std::pow(e, num_channels)) / (1.0 - e) * (1.0 - e * e);
    std::vector<double> lambda(num_channels);
    for (int kk = 0; kk < num_channels; ++kk) {
        const double c = std::cos(2.0 * std::numbers::pi * kk / num_channels);
        lambda[kk] = lead / (1.0 - 2.0 * e * c + e * e);
    }
    return lambda;
}

double mp_cs_gap(double n_prime, int num_channels) {
    require(n_prime >= 0.0, "mp_cs_gap: codeword length must be >= 0");
    require(num_channels >= 1, "mp_cs_gap: need at least one channel");
    return (num_channels - 1) * n_prime / num_channels;
}

}  // namespace aoimc
