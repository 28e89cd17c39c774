// Test-only reference implementations, kept independent of the library code
// paths they check.

#ifndef AOIMC_TESTS_ORACLES_HPP
#define AOIMC_TESTS_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

inline double normal_density(double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * 3.14159265358979323846);
}

/// Q(x) by composite Simpson integration of the density over [0, |x|].
/// Absolute error far below 1e-12 on |x| <= 8.
inline double q_by_integration(double x) {
    const double a = std::abs(x);
    const int intervals = 40000;  // even
    const double h = a / intervals;
    double sum = normal_density(0.0) + normal_density(a);
    for (int i = 1; i < intervals; ++i) sum += normal_density(i * h) * (i % 2 ? 4.0 : 2.0);
    const double integral = sum * h / 3.0;
    return x >= 0.0 ? 0.5 - integral : 0.5 + integral;
}

/// log Q(z) for z > 0 via the asymptotic series Q(z) ~ phi(z)/z (1 - 1/z^2 + 3/z^4 - ...).
inline double log_q_asymptotic(double z) {
    const double inv_z2 = 1.0 / (z * z);
    double sum = 1.0;
    double term = 1.0;
    double sign = -1.0;
    double coeff = 1.0;
    for (int j = 1; j <= 30; ++j) {
        coeff *= 2 * j - 1;
        const double next = sign * coeff * std::pow(inv_z2, j);
        if (std::abs(next) >= std::abs(term)) break;
        sum += next;
        term = next;
        sign = -sign;
    }
    return -0.5 * z * z - std::log(z) - 0.5 * std::log(2.0 * 3.14159265358979323846) + std::log(sum);
}

/// Average multiplexing AoI for equal eps from the closed double-sum form
/// (geometric series applied to the first double sum only).
inline double mp_aoi_double_sum(double n, const std::vector<double>& waits, double eps) {
    const int n_ch = static_cast<int>(waits.size());
    const double eps_cycle = std::pow(eps, n_ch);
    auto wrap = [&](int i) { return waits[((i % n_ch) + n_ch) % n_ch]; };

    double total = 0.0;
    for (int i = 0; i < n_ch; ++i) {
        double part = (1.0 - eps_cycle) / (1.0 - eps) * waits[i] * waits[i];
        double cross = 0.0;
        for (int j = 0; j < n_ch; ++j) {
            double inner = 0.0;
            for (int k = 0; k < n_ch; ++k) inner += std::pow(eps, k) * wrap(i + j + 1 + k);
            cross += std::pow(eps, j + 1) * wrap(i + j) * inner;
        }
        part += 2.0 / (1.0 - eps_cycle) * cross;
        total += part;
    }
    return (1.0 - eps) / (2.0 * n * (1.0 - eps_cycle)) * total + n;
}

/// Heterogeneous inter-reception moments by unrolling the cyclic recursion
/// (independent of the library's dense linear solve).
inline void mp_moments_unrolled(const std::vector<double>& waits, const std::vector<double>& eps,
                                std::vector<double>& first, std::vector<double>& second) {
    const int n_ch = static_cast<int>(waits.size());
    auto idx = [&](int i) { return ((i % n_ch) + n_ch) % n_ch; };
    double cycle = 1.0;
    for (double e : eps) cycle *= e;

    first.assign(n_ch, 0.0);
    for (int i = 0; i < n_ch; ++i) {
        double chain = 1.0;  // prod of eps over the failures between i and i+j
        double sum = 0.0;
        for (int j = 0; j < n_ch; ++j) {
            sum += chain * waits[idx(i + j)];
            chain *= eps[idx(i + j + 1)];
        }
        first[i] = sum / (1.0 - cycle);
    }
    second.assign(n_ch, 0.0);
    for (int i = 0; i < n_ch; ++i) {
        double chain = 1.0;
        double sum = 0.0;
        for (int j = 0; j < n_ch; ++j) {
            const double t = waits[idx(i + j)];
            const double e_next = eps[idx(i + j + 1)];
            sum += chain * (t * t + 2.0 * t * e_next * first[idx(i + j + 1)]);
            chain *= e_next;
        }
        second[i] = sum / (1.0 - cycle);
    }
}

// High-precision reference values (50-digit arithmetic, frozen).
inline constexpr double kQOfOne = 0.15865525393145705141;
inline constexpr double kLogPhiOfFive = -2.866516129637635934e-07;
inline constexpr double kLogPhiOfMinusTwenty = -203.91715537109726394;
inline constexpr double kEpsilon_n100_k16_g2 = 2.4157304831192494848e-11;
inline constexpr double kEpsilon_n100_k8_g2 = 6.419835557529452511e-14;
inline constexpr double kEpsilonMs_n100_k88_g22 = 1.2839671115058492879e-13;
inline constexpr double kEpsilon_n100_k16_g4 = 6.5904258598639896302e-24;
inline constexpr double kEpsilonCs_n50_k16_g22 = 2.4157304831192494848e-11;

}  // namespace oracles

#endif
