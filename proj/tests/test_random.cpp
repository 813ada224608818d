#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gbmlab/random.hpp"
#include "oracles.hpp"

using namespace gbmlab;

TEST_CASE("philox4x32-10 reference vectors") {
    // Known-answer vectors of the reference implementation.
    {
        const auto out = detail::philox4x32_10({0, 0, 0, 0}, {0, 0});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    {
        const auto out = detail::philox4x32_10(
            {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    {
        const auto out = detail::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                               {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("substream determinism and order independence") {
    PathStream a = substream(MasterSeed{42}, 0);
    PathStream b = substream(MasterSeed{42}, 0);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_normal() == b.next_normal());

    // Stream 7 is the same whether or not other streams were used first.
    std::vector<double> in_isolation;
    {
        PathStream s = substream(MasterSeed{42}, 7);
        for (int i = 0; i < 100; ++i) in_isolation.push_back(s.next_normal());
    }
    for (std::uint64_t p = 0; p < 7; ++p) {
        PathStream other = substream(MasterSeed{42}, p);
        for (int i = 0; i < 10; ++i) other.next_normal();
    }
    PathStream s7 = substream(MasterSeed{42}, 7);
    for (int i = 0; i < 100; ++i) CHECK(s7.next_normal() == in_isolation[static_cast<std::size_t>(i)]);
}

TEST_CASE("position is an absolute address") {
    PathStream s = substream(MasterSeed{99}, 3);
    std::vector<double> seq;
    for (int i = 0; i < 64; ++i) seq.push_back(s.next_normal());
    CHECK(s.position() == 64);

    PathStream t = substream(MasterSeed{99}, 3);
    t.seek(17);
    CHECK(t.next_normal() == seq[17]);
    t.seek(5);
    CHECK(t.next_normal() == seq[5]);
    CHECK(t.next_normal() == seq[6]);
}

TEST_CASE("distinct substreams are empirically independent") {
    const int n = 100000;
    PathStream a = substream(MasterSeed{42}, 0);
    PathStream b = substream(MasterSeed{42}, 1);
    double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = a.next_normal();
        const double y = b.next_normal();
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double corr = (sxy - sx * sy / n) /
                        std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
    CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("normal draws have standard-normal statistics") {
    const int n = 1000000;
    PathStream s = substream(MasterSeed{7}, 0);
    double sum = 0.0, sum_sq = 0.0;
    int beyond = 0;
    for (int i = 0; i < n; ++i) {
        const double z = s.next_normal();
        sum += z;
        sum_sq += z * z;
        if (std::abs(z) > 1.96) ++beyond;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.004);        // 3 sigma of 1/sqrt(n)
    CHECK(std::abs(var - 1.0) < 0.01);
    CHECK(std::abs(beyond / static_cast<double>(n) - 0.05) < 0.002);
}

TEST_CASE("empirical CDF matches the normal CDF (Kolmogorov-Smirnov)") {
    const int n = 100000;
    PathStream s = substream(MasterSeed{11}, 0);
    std::vector<double> draws(n);
    for (double& d : draws) d = s.next_normal();
    const double ks = oracles::ks_statistic(std::move(draws), oracles::normal_cdf);
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));  // 1% critical value
}

TEST_CASE("inverse normal CDF hits standard quantiles") {
    CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.9599639845).epsilon(1e-8));
    CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.9599639845).epsilon(1e-8));
    CHECK(inverse_normal_cdf(1e-10) == doctest::Approx(-6.3613409024).epsilon(1e-7));
    // Round trip against the CDF oracle.
    for (double p : {0.001, 0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98, 0.999})
        CHECK(oracles::normal_cdf(inverse_normal_cdf(p)) == doctest::Approx(p).epsilon(1e-8));
}

TEST_CASE("uniforms live strictly inside (0,1)") {
    PathStream s = substream(MasterSeed{1}, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.next_uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}
