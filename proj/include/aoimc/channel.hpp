#ifndef AOIMC_CHANNEL_HPP
#define AOIMC_CHANNEL_HPP

#include <cstddef>
#include <vector>

namespace aoimc {

/// A set of N parallel AWGN channels, described by their linear SNRs.
struct ChannelSet {
    std::vector<double> snrs;  ///< gamma_i > 0, linear power ratio

    ChannelSet() = default;
    explicit ChannelSet(std::vector<double> gammas);

    static ChannelSet from_db(const std::vector<double>& snrs_db);

    std::size_t size() const { return snrs.size(); }

    /// Shannon capacity of channel i in bits per (real) symbol: 0.5*log2(1+gamma).
    double capacity(std::size_t i) const;
    /// Sum of per-channel capacities.
    double capacity_sum() const;
};

/// Probability of a decoding error; always in [0, 1].
struct ErrorProbability {
    double value = 0.0;

    ErrorProbability() = default;
    explicit ErrorProbability(double v);
};

/// Gaussian tail Q(x) = 1 - Phi(x). Saturates to 0/1 beyond the
/// representable tail; Q(x) + Q(-x) = 1 to machine precision.
double q_function(double x);

/// Standard normal density.
double normal_pdf(double x);

/// log(Phi(x)), finite and increasing for all finite x. Uses an asymptotic
/// tail expansion for x <= -10 and log1p(-Q(x)) for x > 0, so the result
/// keeps full relative accuracy where Phi(x) is near 0 or near 1.
double log_phi(double x);

/// phi(x)/Phi(x), the derivative of log_phi. Stable for very negative x
/// (tends to -x instead of overflowing 0/0).
double phi_over_big_phi(double x);

/// Second-order normal approximation of the short-packet error probability
/// for k message bits in n symbols over one AWGN channel with linear SNR
/// gamma. k may be fractional (used by the continuous split optimizer).
ErrorProbability epsilon_single(int n, double k, double gamma);

/// Packet duplication: the update is lost only if all N copies fail.
ErrorProbability epsilon_pd(int n, double k, const ChannelSet& channels);

/// Message splitting: fragment i carries splits[i] bits on channel i; the
/// update is lost if any used fragment fails. A zero-bit fragment means the
/// channel is unused and contributes no error (see epsilon of an empty set
/// below); with exactly one used fragment this is bit-identical to
/// epsilon_single on that channel.
ErrorProbability epsilon_ms(int n, const std::vector<double>& splits, const ChannelSet& channels);

/// Codeword splitting: one codeword jointly encoded across all N channels,
/// n symbols per channel (total codeword length N*n), jointly decoded.
/// With N = 1 this is bit-identical to epsilon_single.
ErrorProbability epsilon_cs(int n, double k, const ChannelSet& channels);

/// Argument of the Q-function in epsilon_single, exposed for the split
/// optimizer: x = A*(B - k/n) with A = 1/(log2(e)*sqrt((1/2n)(1-1/(1+g)^2)))
/// and B = 0.5*log2(1+g).
struct NormalApproxCoefficients {
    double a = 0.0;
    double b = 0.0;
};
NormalApproxCoefficients normal_approx_coefficients(int n, double gamma);

}  // namespace aoimc

#endif
