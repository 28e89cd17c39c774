#include "aoimc/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoimc {

namespace {

constexpr double kLog2E = 1.4426950408889634074;     // log2(e)
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

/// log(Q(z)) for large positive z via the asymptotic expansion
/// Q(z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...).
/// Terms are added while they still shrink, so the truncation error is
/// far below the 1e-9 relative target for z >= 10.
double log_q_tail(double z) {
    const double inv_z2 = 1.0 / (z * z);
    double term = 1.0;
    double sum = 1.0;
    double coeff = 1.0;  // (2j-1)!!
    for (int j = 1; j <= 40; ++j) {
        coeff *= 2 * j - 1;
        double next = (j % 2 == 0 ? coeff : -coeff) * std::pow(inv_z2, j);
        if (std::abs(next) >= std::abs(term)) break;  // asymptotic series turned
        term = next;
        sum += next;
        if (std::abs(next) < 1e-18 * sum) break;
    }
    return -0.5 * z * z - kLogSqrt2Pi - std::log(z) + std::log(sum);
}

}  // namespace

ChannelSet::ChannelSet(std::vector<double> gammas) : snrs(std::move(gammas)) {
    require(!snrs.empty(), "ChannelSet: need at least one channel");
    for (double g : snrs) require(std::isfinite(g) && g > 0.0, "ChannelSet: SNR must be positive");
}

ChannelSet ChannelSet::from_db(const std::vector<double>& snrs_db) {
    std::vector<double> lin(snrs_db.size());
    for (std::size_t i = 0; i < snrs_db.size(); ++i) lin[i] = std::pow(10.0, snrs_db[i] / 10.0);
    return ChannelSet(std::move(lin));
}

double ChannelSet::capacity(std::size_t i) const { return 0.5 * std::log2(1.0 + snrs.at(i)); }

double ChannelSet::capacity_sum() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < snrs.size(); ++i) sum += capacity(i);
    return sum;
}

ErrorProbability::ErrorProbability(double v) : value(v) {
    require(v >= 0.0 && v <= 1.0, "ErrorProbability out of [0,1]");
}

double q_function(double x) {
    require(std::isfinite(x), "q_function: non-finite argument");
    return 0.5 * std::erfc(x / kSqrt2);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double log_phi(double x) {
    require(std::isfinite(x), "log_phi: non-finite argument");
    if (x <= -10.0) return log_q_tail(-x);
    if (x <= 0.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
    // Phi(x) is close to 1: log(1 - Q(x)) through log1p keeps relative accuracy.
    return std::log1p(-0.5 * std::erfc(x / kSqrt2));
}

double phi_over_big_phi(double x) {
    if (x <= -10.0) {
        // exp(log phi - log Phi); both logs are moderate, no 0/0.
        return std::exp(-0.5 * x * x - kLogSqrt2Pi - log_phi(x));
    }
    return normal_pdf(x) / (0.5 * std::erfc(-x / kSqrt2));
}

NormalApproxCoefficients normal_approx_coefficients(int n, double gamma) {
    require(n >= 1, "blocklength must be >= 1");
    require(std::isfinite(gamma) && gamma > 0.0, "SNR must be positive");
    const double one_plus = 1.0 + gamma;
    const double dispersion = 1.0 - 1.0 / (one_plus * one_plus);
    NormalApproxCoefficients c;
    c.a = 1.0 / (kLog2E * std::sqrt(dispersion / (2.0 * static_cast<double>(n))));
    c.b = 0.5 * std::log2(one_plus);
    return c;
}

ErrorProbability epsilon_single(int n, double k, double gamma) {
    require(n >= 1, "blocklength must be >= 1");
    require(k >= 0.0 && std::isfinite(k), "message bits must be >= 0");
    require(std::isfinite(gamma) && gamma > 0.0, "SNR must be positive");
    // Same floating-point expression as epsilon_cs so the N = 1 reductions
    // are bit-identical.
    const double one_plus = 1.0 + gamma;
    const double capacity = 0.5 * std::log2(one_plus);
    const double dispersion = 1.0 - 1.0 / (one_plus * one_plus);
    const double num = capacity - k / static_cast<double>(n);
    const double den = kLog2E * std::sqrt(dispersion / (2.0 * static_cast<double>(n)));
    return ErrorProbability(q_function(num / den));
}

ErrorProbability epsilon_pd(int n, double k, const ChannelSet& channels) {
    double prod = 1.0;
    for (double g : channels.snrs) prod *= epsilon_single(n, k, g).value;
    return ErrorProbability(prod);
}

ErrorProbability epsilon_ms(int n, const std::vector<double>& splits, const ChannelSet& channels) {
    require(splits.size() == channels.size(), "epsilon_ms: splits/channel count mismatch");
    // Channels with k_i = 0 are unused and contribute no error.
    int used = 0;
    std::size_t last_used = 0;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        require(splits[i] >= 0.0, "epsilon_ms: negative split");
        if (splits[i] > 0.0) {
            ++used;
            last_used = i;
        }
    }
    if (used == 0) return ErrorProbability(0.0);
    if (used == 1) return epsilon_single(n, splits[last_used], channels.snrs[last_used]);
    double log_success = 0.0;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        if (splits[i] == 0.0) continue;
        log_success += std::log1p(-epsilon_single(n, splits[i], channels.snrs[i]).value);
    }
    return ErrorProbability(-std::expm1(log_success));
}

ErrorProbability epsilon_cs(int n, double k, const ChannelSet& channels) {
    require(n >= 1, "blocklength must be >= 1");
    require(k >= 0.0 && std::isfinite(k), "message bits must be >= 0");
    double capacity = 0.0;
    double dispersion = 0.0;
    for (double g : channels.snrs) {
        require(std::isfinite(g) && g > 0.0, "SNR must be positive");
        const double one_plus = 1.0 + g;
        capacity += 0.5 * std::log2(one_plus);
        dispersion += 1.0 - 1.0 / (one_plus * one_plus);
    }
    const double num = capacity - k / static_cast<double>(n);
    const double den = kLog2E * std::sqrt(dispersion / (2.0 * static_cast<double>(n)));
    return ErrorProbability(q_function(num / den));
}

}  // namespace aoimc
