#include "aoimc/aoi.hpp"

#include <cmath>
#include <stdexcept>

#include "aoimc/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aoimc;

namespace {

/// Sorted random offsets with delta_0 = 0, all below the period.
Schedule random_schedule(int n, int n_ch, Xoshiro256pp& rng) {
    std::vector<double> deltas(n_ch, 0.0);
    for (int i = 1; i < n_ch; ++i) deltas[i] = rng.next_double() * n;
    std::sort(deltas.begin() + 1, deltas.end());
    return Schedule(n, deltas);
}

}  // namespace

TEST_CASE("aoi_renewal closed form") {
    SUBCASE("error-free updates") {
        const AoiResult r = aoi_renewal(100.0, ErrorProbability(0.0));
        CHECK(r.avg_aoi == 150.0);
        CHECK_FALSE(r.divergent());
    }
    SUBCASE("worked value") {
        CHECK(aoi_renewal(100.0, ErrorProbability(0.5)).avg_aoi == 250.0);
    }
    SUBCASE("epsilon one diverges with flags instead of failing") {
        const AoiResult r = aoi_renewal(100.0, ErrorProbability(1.0));
        CHECK(r.divergent());
        CHECK(r.has_flag(kFlagDivergent));
        CHECK(r.has_flag(kFlagEpsilonClamped));
    }
    SUBCASE("strictly increasing in epsilon") {
        double prev = aoi_renewal(50.0, ErrorProbability(0.0)).avg_aoi;
        for (double e = 0.05; e < 1.0; e += 0.05) {
            const double cur = aoi_renewal(50.0, ErrorProbability(e)).avg_aoi;
            CHECK(cur > prev);
            prev = cur;
        }
    }
    SUBCASE("never below 3n/2") {
        for (double e = 0.0; e < 1.0; e += 0.1)
            for (double n : {1.0, 17.0, 400.0})
                CHECK(aoi_renewal(n, ErrorProbability(e)).avg_aoi >= 1.5 * n);
    }
    SUBCASE("invalid period") {
        CHECK_THROWS_AS(aoi_renewal(0.0, ErrorProbability(0.1)), std::invalid_argument);
    }
}

TEST_CASE("error probability type enforces its range") {
    CHECK_THROWS_AS(ErrorProbability(1.5), std::invalid_argument);
    CHECK_THROWS_AS(ErrorProbability(-0.1), std::invalid_argument);
}

TEST_CASE("aoi_scheme single-channel collapses") {
    const ChannelSet one({2.0});
    SchemeConfig sc{Scheme::sc, 100, 16, {}, {}};
    SchemeConfig pd{Scheme::pd, 100, 16, {}, {}};
    SchemeConfig cs{Scheme::cs, 100, 16, {}, {}};
    CHECK(aoi_scheme(pd, one).avg_aoi == aoi_scheme(sc, one).avg_aoi);
    CHECK(aoi_scheme(cs, one).avg_aoi == aoi_scheme(sc, one).avg_aoi);
}

TEST_CASE("aoi_scheme MS with a dropped channel equals SC on the used one") {
    const ChannelSet two({2.0, 0.4});
    SchemeConfig ms{Scheme::ms, 100, 16, {16, 0}, {}};
    SchemeConfig sc{Scheme::sc, 100, 16, {}, {}};
    CHECK(aoi_scheme(ms, two).avg_aoi == aoi_scheme(sc, ChannelSet({2.0})).avg_aoi);
}

TEST_CASE("aoi_scheme rejects mismatched MS config") {
    const ChannelSet two({2.0, 2.0});
    SchemeConfig ms{Scheme::ms, 100, 16, {16}, {}};
    CHECK_THROWS_AS(aoi_scheme(ms, two), std::invalid_argument);
}

TEST_CASE("aoi_mp_equal_snr") {
    SUBCASE("single channel is plain renewal") {
        CHECK(aoi_mp_equal_snr(100.0, 1, ErrorProbability(0.3)).avg_aoi ==
              aoi_renewal(100.0, ErrorProbability(0.3)).avg_aoi);
    }
    SUBCASE("error-free") {
        CHECK(aoi_mp_equal_snr(100.0, 4, ErrorProbability(0.0)).avg_aoi == 100.0 / 8.0 + 100.0);
    }
    SUBCASE("worked value") {
        CHECK(aoi_mp_equal_snr(100.0, 2, ErrorProbability(0.3)).avg_aoi ==
              doctest::Approx(100.0 * 1.3 / (4.0 * 0.7) + 100.0).epsilon(1e-15));
    }
}

TEST_CASE("schedule construction and waiting times") {
    const Schedule s(100, {0.0, 30.0});
    const auto waits = s.waiting_times();
    CHECK(waits[0] == 30.0);
    CHECK(waits[1] == 70.0);
    CHECK_THROWS_AS(Schedule(100, {1.0, 30.0}), std::invalid_argument);   // delta_0 != 0
    CHECK_THROWS_AS(Schedule(100, {0.0, 100.0}), std::invalid_argument);  // >= period
    CHECK_THROWS_AS(Schedule(100, {0.0, 50.0, 40.0}), std::invalid_argument);  // order
    CHECK(Schedule::uniform(100, 4).shifts == std::vector<double>{0.0, 25.0, 50.0, 75.0});
    CHECK(Schedule::uniform_integer(99, 2).shifts[1] == 50.0);  // llround(49.5)
    double total = 0.0;
    for (double t : Schedule::uniform(97, 3).waiting_times()) total += t;
    CHECK(total == doctest::Approx(97.0).epsilon(1e-15));
}

TEST_CASE("aoi_mp_general single channel reduces to renewal") {
    const MpAnalysis a = aoi_mp_general(Schedule(100, {0.0}), {ErrorProbability(0.37)});
    CHECK(a.result.avg_aoi ==
          doctest::Approx(aoi_renewal(100.0, ErrorProbability(0.37)).avg_aoi).epsilon(1e-15));
    CHECK(a.moments.stationary_weights[0] == 1.0);
}

TEST_CASE("first moments match the worked two-channel values") {
    // T = (30, 70), eps = 0.3: E[Y0] = (30 + 0.3*70)/(1-0.09), E[Y1] = (70 + 0.3*30)/(1-0.09)
    const MpAnalysis a = aoi_mp_general(Schedule(100, {0.0, 30.0}),
                                        {ErrorProbability(0.3), ErrorProbability(0.3)});
    CHECK(a.moments.first[0] == doctest::Approx(51.0 / 0.91).epsilon(1e-12));
    CHECK(a.moments.first[1] == doctest::Approx(79.0 / 0.91).epsilon(1e-12));
}

TEST_CASE("zero-shift equal-eps multiplexing is packet duplication") {
    for (int n_ch = 2; n_ch <= 6; ++n_ch) {
        for (double e : {0.05, 0.3, 0.7}) {
            const MpAnalysis a = aoi_mp_general(Schedule::aligned(100, n_ch),
                                                std::vector<ErrorProbability>(n_ch, ErrorProbability(e)));
            const double eps_pd = std::pow(e, n_ch);
            const double pd = 100.0 * (1.0 + eps_pd) / (2.0 * (1.0 - eps_pd)) + 100.0;
            CHECK(a.result.avg_aoi == doctest::Approx(pd).epsilon(1e-10));
        }
    }
}

TEST_CASE("uniform schedule attains the equal-SNR closed form") {
    for (int n_ch = 1; n_ch <= 6; ++n_ch) {
        for (double e : {0.01, 0.3, 0.8}) {
            const MpAnalysis a = aoi_mp_general(Schedule::uniform(120, n_ch),
                                                std::vector<ErrorProbability>(n_ch, ErrorProbability(e)));
            CHECK(a.result.avg_aoi ==
                  doctest::Approx(aoi_mp_equal_snr(120.0, n_ch, ErrorProbability(e)).avg_aoi)
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("random equal-eps schedules match the closed double-sum form") {
    Xoshiro256pp rng(42);
    for (int n_ch = 2; n_ch <= 6; ++n_ch) {
        for (int rep = 0; rep < 20; ++rep) {
            const Schedule s = random_schedule(90, n_ch, rng);
            const double e = 0.05 + 0.9 * rng.next_double();
            const MpAnalysis a =
                aoi_mp_general(s, std::vector<ErrorProbability>(n_ch, ErrorProbability(e)));
            const double oracle = oracles::mp_aoi_double_sum(90.0, s.waiting_times(), e);
            CHECK(a.result.avg_aoi == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
}

TEST_CASE("heterogeneous moments: dense solve equals unrolled recursion") {
    Xoshiro256pp rng(7);
    for (int n_ch = 2; n_ch <= 6; ++n_ch) {
        for (int rep = 0; rep < 20; ++rep) {
            const Schedule s = random_schedule(80, n_ch, rng);
            std::vector<ErrorProbability> eps(n_ch);
            std::vector<double> eps_raw(n_ch);
            for (int i = 0; i < n_ch; ++i) {
                eps_raw[i] = 0.02 + 0.9 * rng.next_double();
                eps[i] = ErrorProbability(eps_raw[i]);
            }
            const MpAnalysis a = aoi_mp_general(s, eps);

            std::vector<double> first;
            std::vector<double> second;
            oracles::mp_moments_unrolled(s.waiting_times(), eps_raw, first, second);
            for (int i = 0; i < n_ch; ++i) {
                CHECK(a.moments.first[i] == doctest::Approx(first[i]).epsilon(1e-11));
                CHECK(a.moments.second[i] == doctest::Approx(second[i]).epsilon(1e-11));
                // Jensen
                CHECK(a.moments.second[i] >= a.moments.first[i] * a.moments.first[i] - 1e-9);
            }

            // stationary weights carry the (1 - eps_i) success weighting
            double norm = 0.0;
            for (int i = 0; i < n_ch; ++i) norm += (1.0 - eps_raw[i]) * first[i];
            double weight_sum = 0.0;
            for (int i = 0; i < n_ch; ++i) {
                const double expected = (1.0 - eps_raw[i]) * first[i] / norm;
                CHECK(a.moments.stationary_weights[i] == doctest::Approx(expected).epsilon(1e-10));
                weight_sum += a.moments.stationary_weights[i];
            }
            CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("all channels dead diverges instead of failing") {
    const MpAnalysis a = aoi_mp_general(Schedule(100, {0.0, 40.0}),
                                        {ErrorProbability(1.0), ErrorProbability(1.0)});
    CHECK(a.result.divergent());
    CHECK(a.result.has_flag(kFlagDivergent));
}

TEST_CASE("one dead channel stays finite") {
    const MpAnalysis a = aoi_mp_general(Schedule(100, {0.0, 40.0}),
                                        {ErrorProbability(0.2), ErrorProbability(1.0)});
    CHECK(std::isfinite(a.result.avg_aoi));
    // the dead channel almost never starts an interval
    CHECK(a.moments.stationary_weights[1] < 1e-12);
}

TEST_CASE("mp_quadratic_form") {
    SUBCASE("single channel") {
        const Eigen::MatrixXd m = mp_quadratic_form(1, ErrorProbability(0.4));
        CHECK(m(0, 0) == doctest::Approx(1.4 / 0.6).epsilon(1e-15));
    }
    SUBCASE("two channels, worked entries") {
        const Eigen::MatrixXd m = mp_quadratic_form(2, ErrorProbability(0.5));
        CHECK(m(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(m(1, 1) == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(m(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(m(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("symmetry") {
        for (int n_ch : {2, 3, 5, 8}) {
            const Eigen::MatrixXd m = mp_quadratic_form(n_ch, ErrorProbability(0.37));
            CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    SUBCASE("out-of-range eps rejected") {
        CHECK_THROWS_AS(mp_quadratic_form(3, ErrorProbability(0.0)), std::invalid_argument);
        CHECK_THROWS_AS(mp_quadratic_form(3, ErrorProbability(1.0)), std::invalid_argument);
    }
}

TEST_CASE("quadratic form reproduces the general AoI on random schedules") {
    Xoshiro256pp rng(99);
    for (int n_ch = 2; n_ch <= 6; ++n_ch) {
        for (int rep = 0; rep < 10; ++rep) {
            const int n = 75;
            const Schedule s = random_schedule(n, n_ch, rng);
            const double e = 0.05 + 0.9 * rng.next_double();
            const Eigen::MatrixXd m = mp_quadratic_form(n_ch, ErrorProbability(e));
            Eigen::VectorXd t(n_ch);
            const auto waits = s.waiting_times();
            for (int i = 0; i < n_ch; ++i) t(i) = waits[i];
            const double quad =
                (1.0 - e) / (2.0 * n * (1.0 - std::pow(e, n_ch))) * t.dot(m * t) + n;
            const MpAnalysis a =
                aoi_mp_general(s, std::vector<ErrorProbability>(n_ch, ErrorProbability(e)));
            CHECK(quad == doctest::Approx(a.result.avg_aoi).epsilon(1e-9));
        }
    }
}

TEST_CASE("mp_eigenvalues closed form") {
    SUBCASE("k = 0 eigenvalue") {
        for (double e : {0.1, 0.5, 0.9}) {
            const auto lam = mp_eigenvalues(4, ErrorProbability(e));
            const double expected = (1.0 - std::pow(e, 4)) * (1.0 + e) / ((1.0 - e) * (1.0 - e));
            CHECK(lam[0] == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    SUBCASE("worked two-channel value") {
        CHECK(mp_eigenvalues(2, ErrorProbability(0.5))[1] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("eps to zero limit tends to the identity spectrum") {
        for (double lam : mp_eigenvalues(5, ErrorProbability(1e-12)))
            CHECK(lam == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("positivity and agreement with a numeric eigensolver") {
        for (int n_ch = 2; n_ch <= 8; ++n_ch) {
            for (double e : {0.01, 0.1, 0.5, 0.9}) {
                auto lam = mp_eigenvalues(n_ch, ErrorProbability(e));
                for (double l : lam) CHECK(l > 0.0);
                std::sort(lam.begin(), lam.end());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
                    mp_quadratic_form(n_ch, ErrorProbability(e)));
                for (int i = 0; i < n_ch; ++i)
                    CHECK(lam[i] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("mp_cs_gap") {
    CHECK(mp_cs_gap(120.0, 1) == 0.0);
    CHECK(mp_cs_gap(120.0, 3) == 80.0);
    CHECK(mp_cs_gap(0.0, 4) == 0.0);
    // identity against the two closed forms sharing one epsilon
    for (double e : {0.0, 0.2, 0.6}) {
        for (int n_ch = 1; n_ch <= 5; ++n_ch) {
            const double n_prime = 120.0;
            const double mp = aoi_mp_equal_snr(n_prime, n_ch, ErrorProbability(e)).avg_aoi;
            const double cs = aoi_renewal(n_prime / n_ch, ErrorProbability(e)).avg_aoi;
            CHECK(mp - cs == doctest::Approx(mp_cs_gap(n_prime, n_ch)).epsilon(1e-12));
        }
    }
}
