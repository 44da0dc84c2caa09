#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "levylab/limitchain.hpp"
#include "levylab/rng.hpp"
#include "levylab/stats.hpp"

using namespace levylab;

namespace {

ExitSample exp1_sample(long n, std::uint64_t seed, double scale = 1.0) {
    ExitSample s;
    s.well = 1;
    s.eps = 0.1;
    s.rate_used = 1.0;
    RngStream rng(seed, 0);
    for (long k = 0; k < n; ++k) s.add(scale * rng.exponential(1.0), 2);
    return s;
}

GeneratorMatrix three_well_q() {
    GeneratorMatrix g;
    g.n = 3;
    g.q = {-0.5, 0.375, 0.125, 1.0 / 3.0, -2.0 / 3.0, 1.0 / 3.0,
           0.125, 0.375, -0.5};
    return g;
}

}  // namespace

TEST_CASE("chi-square tail values") {
    CHECK(chi_square_p_value(6.6349, 1) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(chi_square_p_value(0.0, 3) == 1.0);
    CHECK(chi_square_p_value(11.345, 3) ==
          doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("kolmogorov tail values") {
    // K(1.628) ~ 0.01 and K(1.358) ~ 0.05
    CHECK(kolmogorov_p_value(1.628) == doctest::Approx(0.01).epsilon(0.02));
    CHECK(kolmogorov_p_value(1.358) == doctest::Approx(0.05).epsilon(0.02));
    CHECK(kolmogorov_p_value(0.0) == 1.0);
}

TEST_CASE("KS test calibration under the null") {
    const int reps = 500;
    int rej1 = 0, rej5 = 0;
    double psum = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        const auto s = exp1_sample(2000, 1000 + rep);
        const auto ks = ks_exponential(s);
        psum += ks.p_value;
        if (ks.p_value < 0.01) ++rej1;
        if (ks.p_value < 0.05) ++rej5;
    }
    // three binomial standard errors around the nominal rates
    CHECK(rej1 <= 5 + 3 * std::sqrt(reps * 0.01 * 0.99));
    CHECK(rej5 <= 25 + 3 * std::sqrt(reps * 0.05 * 0.95));
    CHECK(rej5 >= 25 - 3 * std::sqrt(reps * 0.05 * 0.95));
    CHECK(psum / reps == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("KS test detects gross misfits") {
    ExitSample constant;
    constant.well = 1;
    constant.eps = 0.1;
    constant.rate_used = 1.0;
    for (int k = 0; k < 500; ++k) constant.add(1.0, 2);
    const auto ks = ks_exponential(constant);
    CHECK(ks.p_value < 1e-6);

    for (int rep = 0; rep < 20; ++rep) {
        const auto s = exp1_sample(2000, 4000 + rep, 2.0);  // wrong rate
        CHECK(ks_exponential(s).p_value < 0.01);
    }
}

TEST_CASE("KS guards: sample size and censoring") {
    auto tiny = exp1_sample(50, 1);
    CHECK_THROWS_AS(ks_exponential(tiny), TooFewSamples);
    auto censored = exp1_sample(500, 2);
    censored.censored = 10;  // 2%
    CHECK_THROWS_AS(ks_exponential(censored), ExcessCensoring);
}

TEST_CASE("exit split test against the generator") {
    const auto gen = three_well_q();
    // draws from the true split of the middle well (1/2, 1/2)
    ExitSample s;
    s.well = 2;
    s.eps = 0.05;
    s.rate_used = 1.0;
    RngStream rng(9, 9);
    for (int k = 0; k < 2000; ++k)
        s.add(rng.exponential(1.0), rng.uniform() < 0.5 ? 1 : 3);
    const auto res = exit_split_test(s, gen);
    CHECK(res.pass);
    CHECK(res.targets[0] == doctest::Approx(0.5));
    CHECK(res.targets[1] == doctest::Approx(0.5));

    // deliberately wrong generator row: rates of well 1 used for well 2
    GeneratorMatrix wrong = gen;
    wrong.q = {-2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.375, -0.5,  0.125,
               0.125,      0.375,     -0.5};
    const auto bad = exit_split_test(s, wrong);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_abs_z > 3.0);

    // one-sided landing against a one-way generator row passes trivially
    Landscape dw = Landscape::from_extrema({-1.0, 1.0}, {0.0});
    GeneratorMatrix g0 = compute_generator(dw, 1.0, 0.0);
    ExitSample oneway;
    oneway.well = 1;
    oneway.eps = 0.05;
    oneway.rate_used = 1.0;
    for (int k = 0; k < 200; ++k) oneway.add(1.0, 2);
    CHECK(exit_split_test(oneway, g0).pass);
}

TEST_CASE("empirical generator recovers the chain parameters") {
    const auto gen = three_well_q();
    const double eps = 0.05;
    LevyModel model = LevyModel::stable(1.0, 1.0, 1.0);
    const double hscale = model.tail_total(1.0 / eps);  // 0.1

    std::vector<ExitSample> samples;
    RngStream rng(31337, 0);
    for (int w = 1; w <= 3; ++w) {
        ExitSample s;
        s.well = w;
        s.eps = eps;
        s.rate_used = 1.0;
        const double qi = gen.rate(w - 1);
        for (int k = 0; k < 4000; ++k) {
            // model-time holding: chain time over H(1/eps)
            const double tau = rng.exponential(qi) / hscale;
            double u = rng.uniform() * qi;
            int dest = w;
            for (int j = 1; j <= 3; ++j) {
                if (j == w) continue;
                u -= gen(w - 1, j - 1);
                if (u <= 0.0) {
                    dest = j;
                    break;
                }
            }
            s.add(tau, dest);
        }
        samples.push_back(std::move(s));
    }
    const auto est = empirical_generator(samples, 3, eps, model);
    for (int i = 0; i < 3; ++i) {
        CHECK(est.row_present[i]);
        for (int j = 0; j < 3; ++j) {
            const double se = est.se[i * 3 + j];
            if (se > 0.0)
                CHECK(std::abs(est.q_hat(i, j) - gen(i, j)) < 3.0 * se);
        }
    }

    // a single provided well populates only that row
    std::vector<ExitSample> one{samples[1]};
    const auto part = empirical_generator(one, 3, eps, model);
    CHECK_FALSE(part.row_present[0]);
    CHECK(part.row_present[1]);
    CHECK_FALSE(part.row_present[2]);
    CHECK(part.q_hat(0, 0) == 0.0);

    // guards
    ExitSample small = samples[0];
    small.times.resize(50);
    small.landings.resize(50);
    CHECK_THROWS_AS(empirical_generator({small}, 3, eps, model),
                    TooFewSamples);
    ExitSample cens = samples[0];
    cens.censored = 100;
    CHECK_THROWS_AS(empirical_generator({cens}, 3, eps, model),
                    ExcessCensoring);
}

TEST_CASE("estimators are merge-consistent") {
    auto a = exp1_sample(400, 77);
    const auto b = exp1_sample(300, 78);
    ExitSample merged = a;
    merged.merge(b);
    ExitSample concat;
    concat.well = a.well;
    concat.eps = a.eps;
    concat.rate_used = a.rate_used;
    for (long k = 0; k < a.n(); ++k) concat.add(a.times[k], a.landings[k]);
    for (long k = 0; k < b.n(); ++k) concat.add(b.times[k], b.landings[k]);
    const auto k1 = ks_exponential(merged);
    const auto k2 = ks_exponential(concat);
    CHECK(k1.statistic == k2.statistic);
    CHECK(k1.p_value == k2.p_value);
}

TEST_CASE("finite-dimensional test is calibrated on chain snapshots") {
    const auto gen = three_well_q();
    const std::vector<double> times{0.5, 1.0, 2.0};
    const long n = 5000;
    std::vector<std::vector<int>> cls(times.size(),
                                      std::vector<int>(n, 0));
    for (long k = 0; k < n; ++k) {
        RngStream rng(515, static_cast<std::uint64_t>(k));
        const auto path = simulate_chain(gen, 2, times, rng);
        for (std::size_t t = 0; t < times.size(); ++t)
            cls[t][k] = path[t];
    }
    const auto res = fdd_test(times, cls, gen, 2);
    CHECK(res.pass(0.01));
    for (const auto& m : res.marginals) CHECK(m.unclassified_fraction == 0.0);

    // power: doubling the generator is rejected
    GeneratorMatrix twice = gen;
    for (auto& v : twice.q) v *= 2.0;
    const auto bad = fdd_test(times, cls, twice, 2);
    CHECK_FALSE(bad.pass(0.01));

    // all snapshots at t = 0 sit in the start well
    std::vector<std::vector<int>> at0(1, std::vector<int>(n, 2));
    const auto res0 = fdd_test({0.0}, at0, gen, 2);
    CHECK(res0.marginals[0].p_value == doctest::Approx(1.0));

    // unclassified excess trips the guard
    std::vector<std::vector<int>> noisy(1, std::vector<int>(n, 2));
    for (long k = 0; k < n / 10; ++k) noisy[0][k] = 0;
    CHECK_THROWS_AS(fdd_test({1.0}, noisy, gen, 2), UnclassifiedExcess);
}

TEST_CASE("generator standard errors shrink and cover") {
    const auto gen = three_well_q();
    const double eps = 0.05;
    LevyModel model = LevyModel::stable(1.0, 1.0, 1.0);
    const double hscale = model.tail_total(1.0 / eps);

    auto one_sample = [&](int w, long n, std::uint64_t seed) {
        ExitSample s;
        s.well = w;
        s.eps = eps;
        s.rate_used = 1.0;
        RngStream rng(seed, static_cast<std::uint64_t>(w));
        const double qi = gen.rate(w - 1);
        for (long k = 0; k < n; ++k) {
            const double tau = rng.exponential(qi) / hscale;
            double u = rng.uniform() * qi;
            int dest = w;
            for (int j = 1; j <= 3; ++j) {
                if (j == w) continue;
                u -= gen(w - 1, j - 1);
                if (u <= 0.0) {
                    dest = j;
                    break;
                }
            }
            s.add(tau, dest);
        }
        return s;
    };

    // SEs scale like 1/sqrt(N)
    std::vector<ExitSample> small{one_sample(1, 500, 1), one_sample(2, 500, 1),
                                  one_sample(3, 500, 1)};
    std::vector<ExitSample> large{one_sample(1, 8000, 2),
                                  one_sample(2, 8000, 2),
                                  one_sample(3, 8000, 2)};
    const auto es = empirical_generator(small, 3, eps, model);
    const auto el = empirical_generator(large, 3, eps, model);
    const double ratio = es.se[0] / el.se[0];
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.35));

    // coverage of 3-SE intervals across repetitions
    const int reps = 60;
    long covered = 0, total = 0;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<ExitSample> samples{one_sample(1, 600, 100 + rep),
                                        one_sample(2, 600, 100 + rep),
                                        one_sample(3, 600, 100 + rep)};
        const auto est = empirical_generator(samples, 3, eps, model);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double se = est.se[i * 3 + j];
                if (se <= 0.0) continue;
                ++total;
                if (std::abs(est.q_hat(i, j) - gen(i, j)) <= 3.0 * se)
                    ++covered;
            }
    }
    CHECK(static_cast<double>(covered) / total >= 0.95);
}

TEST_CASE("fdd rejection rate is near nominal under the null") {
    const auto gen = three_well_q();
    const std::vector<double> times{1.0};
    const long n = 2000;
    int rejections = 0;
    const int reps = 60;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<std::vector<int>> cls(1, std::vector<int>(n, 0));
        for (long k = 0; k < n; ++k) {
            RngStream rng(9000 + rep, static_cast<std::uint64_t>(k));
            cls[0][k] = simulate_chain(gen, 2, times, rng)[0];
        }
        const auto res = fdd_test(times, cls, gen, 2);
        if (res.marginals[0].p_value < 0.01) ++rejections;
    }
    CHECK(rejections <= 4);
}

TEST_CASE("short-time outside fraction") {
    Landscape l = Landscape::from_extrema({-1.0, 1.0}, {0.0});
    std::vector<double> xs{-1.0, -1.05, -0.9, -0.2, 1.0};
    CHECK(short_time_outside_fraction(xs, l, 1, 0.25) ==
          doctest::Approx(0.4));
    CHECK(short_time_outside_fraction({}, l, 1, 0.25) == 0.0);
}
