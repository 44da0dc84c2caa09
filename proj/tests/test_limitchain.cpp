#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "levylab/limitchain.hpp"
#include "levylab/potential.hpp"

using namespace levylab;

namespace {

Landscape double_well(double m1, double m2) {
    return Landscape::from_extrema({m1, m2}, {0.0});
}

// independent evaluation of the rate formula, written against the saddle
// distance list rather than the matrix recursion
double q_entry_oracle(const std::vector<double>& minima,
                      const std::vector<double>& saddles, double r,
                      double kappa, int i, int j) {
    const int n = static_cast<int>(minima.size());
    auto term = [&](int saddle_idx, double m) {
        if (saddle_idx <= 0 || saddle_idx >= n) return 0.0;
        return std::pow(std::abs(saddles[saddle_idx - 1] - m), -r);
    };
    const double w = (j < i) ? kappa / (1.0 + kappa) : 1.0 / (1.0 + kappa);
    return w * std::abs(term(j - 1, minima[i - 1]) - term(j, minima[i - 1]));
}

}  // namespace

TEST_CASE("symmetric stable double well reproduces the closed-form matrix") {
    // kappa = 1, saddle at the origin: rescaling by the stable-law factor 2
    // turns the canonical rates into distance^{-alpha}
    struct Case {
        double alpha, m1, m2;
    };
    for (const Case c : {Case{0.5, -1.0, 2.0}, Case{1.0, -1.0, 1.0},
                         Case{1.5, -0.5, 3.0}}) {
        Landscape l = double_well(c.m1, c.m2);
        GeneratorMatrix g = compute_generator(l, c.alpha, 1.0);
        const double d1 = std::pow(std::abs(c.m1), -c.alpha);
        const double d2 = std::pow(std::abs(c.m2), -c.alpha);
        CHECK(std::abs(2.0 * g(0, 0) + d1) <= 1e-12);
        CHECK(std::abs(2.0 * g(0, 1) - d1) <= 1e-12);
        CHECK(std::abs(2.0 * g(1, 0) - d2) <= 1e-12);
        CHECK(std::abs(2.0 * g(1, 1) + d2) <= 1e-12);
    }
}

TEST_CASE("single well gives the constant chain") {
    Landscape l = Landscape::from_extrema({0.0}, {});
    GeneratorMatrix g = compute_generator(l, 1.3, 0.7);
    CHECK(g.n == 1);
    CHECK(g(0, 0) == 0.0);
}

TEST_CASE("three-well rates match the independent oracle") {
    const std::vector<double> minima{-2.0, 0.5, 3.0};
    const std::vector<double> saddles{-1.0, 2.0};
    Landscape l = Landscape::from_extrema(minima, saddles);
    GeneratorMatrix g = compute_generator(l, 1.0, 1.0);
    CHECK(g(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(g(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(g.rate(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            if (i == j) continue;
            CHECK(g(i - 1, j - 1) ==
                  doctest::Approx(q_entry_oracle(minima, saddles, 1.0, 1.0,
                                                 i, j))
                      .epsilon(1e-14));
        }
}

TEST_CASE("row sums vanish and the telescoping identity holds") {
    RngStream rng(314, 1);
    for (int rep = 0; rep < 50; ++rep) {
        const int wells = 2 + static_cast<int>(rng.uniform() * 3.0);
        std::vector<double> minima, saddles;
        double x = -4.0 * rng.uniform();
        for (int k = 0; k < wells; ++k) {
            minima.push_back(x);
            x += 0.3 + 2.0 * rng.uniform();
            if (k + 1 < wells) {
                saddles.push_back(x);
                x += 0.3 + 2.0 * rng.uniform();
            }
        }
        const double r = 0.3 + 2.0 * rng.uniform();
        const double kappa = rng.uniform() < 0.2 ? 0.0 : 2.0 * rng.uniform();
        Landscape l = Landscape::from_extrema(minima, saddles);
        GeneratorMatrix g = compute_generator(l, r, kappa);
        for (int i = 0; i < g.n; ++i) {
            double row = 0.0, off = 0.0;
            for (int j = 0; j < g.n; ++j) {
                row += g(i, j);
                if (i != j) {
                    CHECK(g(i, j) >= 0.0);
                    off += g(i, j);
                }
            }
            CHECK(std::abs(row) <= 1e-12);
            // telescoping: off-diagonal sum equals the two-sided rate
            double qi = 0.0;
            if (i > 0)
                qi += kappa / (1.0 + kappa) *
                      std::pow(std::abs(saddles[i - 1] - minima[i]), -r);
            if (i < g.n - 1)
                qi += 1.0 / (1.0 + kappa) *
                      std::pow(std::abs(saddles[i] - minima[i]), -r);
            CHECK(off == doctest::Approx(qi).epsilon(1e-12));
        }
    }
}

TEST_CASE("kappa = 0 forbids leftward moves and absorbs at the right") {
    Landscape l = Landscape::from_extrema({-2.0, 0.5, 3.0}, {-1.0, 2.0});
    GeneratorMatrix g = compute_generator(l, 1.0, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < i; ++j) CHECK(g(i, j) == 0.0);
    CHECK(g.rate(2) == 0.0);  // right peripheral well uses the sentinel
    // the last column of e^{tQ} tends to 1
    const auto p = chain_transition_matrix(g, 60.0);
    for (int i = 0; i < 3; ++i)
        CHECK(p[i * 3 + 2] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("coordinate scaling rescales rates by a^-r") {
    Landscape l = Landscape::from_extrema({-2.0, 0.5, 3.0}, {-1.0, 2.0});
    const double a = 1.7, r = 1.3, kappa = 0.6;
    Landscape ls = Landscape::from_extrema({-2.0 * a, 0.5 * a, 3.0 * a},
                                           {-1.0 * a, 2.0 * a});
    GeneratorMatrix g = compute_generator(l, r, kappa);
    GeneratorMatrix gs = compute_generator(ls, r, kappa);
    const double f = std::pow(a, -r);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(gs(i, j) == doctest::Approx(f * g(i, j)).epsilon(1e-12));
}

TEST_CASE("exit rates from the tails") {
    LevyModel m = LevyModel::stable(1.0, 1.0, 1.0);
    // inner well with boundaries at distance 1 and 2 from its minimum
    Landscape l = Landscape::from_extrema({-2.0, 0.0, 3.0}, {-1.0, 2.0});
    CHECK(exit_rate(l, m, 2, 0.1) == doctest::Approx(0.15).epsilon(1e-12));
    // peripheral well: only the inner boundary contributes
    Landscape dw = double_well(-1.0, 1.0);
    CHECK(exit_rate(dw, m, 1, 0.1) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(exit_rate(dw, m, 2, 0.1) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("time scale and the normalization identity") {
    LevyModel m = LevyModel::stable(1.0, 1.0, 1.0);
    CHECK(time_scale(m, 0.1) == doctest::Approx(5.0).epsilon(1e-12));
    double prev = 0.0;
    for (double eps : {0.2, 0.1, 0.05, 0.02}) {
        const double s = time_scale(m, eps);
        CHECK(s > prev);
        prev = s;
    }
    // (alpha/2) * H(1/eps) / eps^alpha = 1 for the unit symmetric stable
    for (double alpha : {0.5, 1.0, 1.5}) {
        LevyModel ma = LevyModel::stable(alpha, 1.0, 1.0);
        for (double eps : {0.3, 0.1, 0.05}) {
            const double lhs = 0.5 * alpha * ma.tail_total(1.0 / eps) /
                               std::pow(eps, alpha);
            CHECK(lhs == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    // lambda^i(eps) * time_scale(eps) = q_i exactly for constant sv
    Landscape l = Landscape::from_extrema({-2.0, 0.5, 3.0}, {-1.0, 2.0});
    GeneratorMatrix g = compute_generator(l, 1.0, 1.0);
    for (int w = 1; w <= 3; ++w) {
        const double lhs = exit_rate(l, m, w, 1e-3) * time_scale(m, 1e-3);
        CHECK(lhs == doctest::Approx(g.rate(w - 1)).epsilon(1e-12));
    }
}

TEST_CASE("uniformization agrees with the two-state closed form") {
    GeneratorMatrix g;
    g.n = 2;
    g.q = {-1.0, 1.0, 1.0, -1.0};
    const auto p0 = chain_transition_matrix(g, 0.0);
    CHECK(p0[0] == 1.0);
    CHECK(p0[1] == 0.0);
    for (double t : {0.1, 0.7, 2.5, 10.0}) {
        const auto p = chain_transition_matrix(g, t);
        const double stay = 0.5 * (1.0 + std::exp(-2.0 * t));
        CHECK(p[0] == doctest::Approx(stay).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(1.0 - stay).epsilon(1e-12));
        for (int i = 0; i < 2; ++i) {
            CHECK(p[i * 2] + p[i * 2 + 1] ==
                  doctest::Approx(1.0).epsilon(1e-12));
            CHECK(p[i * 2] >= 0.0);
            CHECK(p[i * 2 + 1] >= 0.0);
        }
    }
}

TEST_CASE("chain simulation matches the matrix exponential") {
    GeneratorMatrix g;
    g.n = 3;
    g.q = {-0.5, 0.375, 0.125, 1.0 / 3.0, -2.0 / 3.0, 1.0 / 3.0,
           0.125, 0.375, -0.5};
    // constant chain for the single absorbing generator
    GeneratorMatrix g1;
    g1.n = 1;
    g1.q = {0.0};
    RngStream rng(2025, 0);
    const auto states = simulate_chain(g1, 1, {0.5, 1.0, 5.0}, rng);
    for (int s : states) CHECK(s == 1);

    const long n = 100000;
    std::vector<long> counts(3, 0);
    double hold_sum = 0.0;
    long hold_n = 0;
    for (long k = 0; k < n; ++k) {
        RngStream r(7777, static_cast<std::uint64_t>(k));
        const auto path = simulate_chain(g, 2, {1.0}, r);
        ++counts[path[0] - 1];
        // holding-time draw reproduced on a fresh copy of the stream
        RngStream r2(7777, static_cast<std::uint64_t>(k));
        hold_sum += r2.exponential(g.rate(1));
        ++hold_n;
    }
    const auto p = chain_transition_matrix(g, 1.0);
    double tv = 0.0;
    for (int j = 0; j < 3; ++j)
        tv += std::abs(static_cast<double>(counts[j]) / n - p[1 * 3 + j]);
    CHECK(0.5 * tv < 0.02);
    const double hold_mean = hold_sum / hold_n;
    const double expect = 1.0 / g.rate(1);
    CHECK(std::abs(hold_mean - expect) <
          3.0 * expect / std::sqrt(double(hold_n)));
}

TEST_CASE("gaussian comparison on tilted and symmetric wells") {
    PolynomialPotential tilted({0.0, -0.1, -0.5, 0.0, 0.25});
    Landscape l = analyze(tilted, 10.0);
    const auto gc = gaussian_comparison(l);
    CHECK(gc.generator[0] == 0.0);
    CHECK(gc.generator[1] == 0.0);
    CHECK(gc.generator[2] == 1.0);
    CHECK(gc.generator[3] == -1.0);
    // the right well is deepened by the -0.1x tilt
    CHECK(gc.deep_well == 2);
    CHECK(gc.shallow_well == 1);
    const double barrier_oracle =
        2.0 * (l.value_saddle[0] - l.value_min[0]);
    CHECK(gc.barrier == doctest::Approx(barrier_oracle).epsilon(1e-12));
    CHECK(gc.barrier == doctest::Approx(0.3154).epsilon(0.01));

    PolynomialPotential symmetric({0.0, 0.0, -0.5, 0.0, 0.25});
    Landscape ls = analyze(symmetric, 10.0);
    CHECK_THROWS_AS(gaussian_comparison(ls), EqualDepth);

    Landscape l3 = Landscape::from_extrema({-2.0, 0.5, 3.0}, {-1.0, 2.0});
    CHECK_THROWS_AS(gaussian_comparison(l3), NotTwoWell);
}
