#ifndef AOIMC_AOI_HPP
#define AOIMC_AOI_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "aoimc/channel.hpp"

namespace aoimc {

enum class Scheme { sc, pd, mp, cs, ms };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

/// One transmission scheme with its free parameters. `n` is the blocklength
/// and transmission period on each channel (for CS it is the per-channel
/// fragment length; the full codeword spans N*n symbols).
struct SchemeConfig {
    Scheme scheme = Scheme::sc;
    int n = 1;
    int k = 0;
    std::vector<int> splits;     ///< MS only: per-channel bits, sum == k
    std::vector<double> shifts;  ///< MP only: offsets; empty selects the uniform schedule
};

/// Periodic multiplexing schedule: period n and per-channel offsets
/// 0 = delta_0 <= delta_1 <= ... <= delta_{N-1} < n. Offsets are real-valued
/// in analysis; the CLI restricts to integers.
struct Schedule {
    int period = 1;
    std::vector<double> shifts{0.0};

    Schedule() = default;
    Schedule(int n, std::vector<double> deltas);

    static Schedule uniform(int n, int num_channels);          ///< delta_i = i*n/N
    static Schedule uniform_integer(int n, int num_channels);  ///< delta_i = llround(i*n/N)
    static Schedule aligned(int n, int num_channels);          ///< all offsets zero

    int size() const { return static_cast<int>(shifts.size()); }

    /// Gaps between consecutive reception opportunities; sums to the period.
    std::vector<double> waiting_times() const;
};

/// First and second moments of the per-channel inter-reception times of the
/// multiplexing scheme, plus the renewal weights used to assemble the AoI
/// (weights[i] is the long-run fraction of time covered by intervals that
/// start with a success on channel i).
struct MpMoments {
    std::vector<double> first;
    std::vector<double> second;
    std::vector<double> stationary_weights;
};

enum class AoiMethod { analytic, simulated };

struct AoiResult {
    double avg_aoi = 0.0;  ///< symbol durations; +infinity when divergent
    ErrorProbability epsilon_used{};
    AoiMethod method = AoiMethod::analytic;
    double ci_halfwidth = 0.0;  ///< 0 for analytic results
    std::vector<std::string> quality_flags;

    bool divergent() const { return std::isinf(avg_aoi); }
    bool has_flag(const std::string& flag) const;
};

/// Error probabilities are clamped into [kEpsilonFloor, kEpsilonCeil] before
/// entering the AoI formulas; results carry an "epsilon-clamped" flag when
/// the clamp fired, and an epsilon at the ceiling yields a divergent result.
inline constexpr double kEpsilonFloor = 1e-300;
inline constexpr double kEpsilonCeil = 1.0 - 1e-16;
inline constexpr const char* kFlagEpsilonClamped = "epsilon-clamped";
inline constexpr const char* kFlagDivergent = "divergent";

struct ClampedEpsilon {
    double value = 0.0;
    bool clamped = false;
};
ClampedEpsilon clamp_epsilon(ErrorProbability eps);

/// Average AoI of a periodic renewal scheme with period n and per-update
/// error probability eps: n*(1+eps)/(2*(1-eps)) + n.
AoiResult aoi_renewal(double period, ErrorProbability eps);

/// Dispatches the matching error probability into aoi_renewal for the
/// renewal schemes SC, PD, CS and MS (MP goes through aoi_mp_*). SC over a
/// multi-channel set evaluates on channel 0.
AoiResult aoi_scheme(const SchemeConfig& config, const ChannelSet& channels);

/// The scheme's aggregate error probability (SC, PD, CS, MS).
ErrorProbability scheme_epsilon(const SchemeConfig& config, const ChannelSet& channels);

/// Minimum average AoI of the multiplexing scheme over N equal-SNR channels
/// (attained at the uniform schedule): n*(1+eps)/(2N*(1-eps)) + n.
AoiResult aoi_mp_equal_snr(double n, int num_channels, ErrorProbability eps_single);

struct MpAnalysis {
    AoiResult result;
    MpMoments moments;
};

/// Average AoI of the multiplexing scheme for an arbitrary valid schedule and
/// per-channel error probabilities. Solves the cyclic linear systems for
/// E[Y_i] and E[Y_i^2], weights each interval class by the stationary
/// distribution of the channel-of-last-success chain, and assembles the
/// time average. epsilon_used reports the full-cycle failure product.
MpAnalysis aoi_mp_general(const Schedule& schedule, const std::vector<ErrorProbability>& eps);

/// Symmetric circulant matrix M with entries m_j = (eps^j + eps^(N-j))/(1-eps)
/// such that avg AoI = (1-eps)/(2n(1-eps^N)) * T'MT + n over waiting times T.
Eigen::MatrixXd mp_quadratic_form(int num_channels, ErrorProbability eps);

/// Closed-form eigenvalues of mp_quadratic_form:
/// lambda_k = (1-eps^N)/(1-eps) * (1-eps^2)/(1 - 2 eps cos(2 pi k/N) + eps^2).
std::vector<double> mp_eigenvalues(int num_channels, ErrorProbability eps);

/// Gap between MP and CS average AoI at matched total codeword length n':
/// (N-1)*n'/N.
double mp_cs_gap(double n_prime, int num_channels);

}  // namespace aoimc

#endif
