#include "levylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace levylab {

void ExitSample::merge(const ExitSample& other) {
    if (well != other.well || eps != other.eps || rate_used != other.rate_used)
        throw DomainError("cannot merge samples from different setups");
    times.insert(times.end(), other.times.begin(), other.times.end());
    landings.insert(landings.end(), other.landings.begin(),
                    other.landings.end());
    censored += other.censored;
}

double kolmogorov_p_value(double z) {
    if (z <= 0.0) return 1.0;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * z * z);
        p += (k % 2 ? 2.0 : -2.0) * term;
    }
    return std::clamp(p, 0.0, 1.0);
}

namespace {

// regularized upper incomplete gamma Q(a,x), series/continued-fraction split
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DomainError("gamma_q domain");
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, return 1 - P
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - lg);
        return std::clamp(1.0 - p, 0.0, 1.0);
    }
    // Q(a,x) by Lentz continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return std::clamp(q, 0.0, 1.0);
}

}  // namespace

double chi_square_p_value(double statistic, int df) {
    if (df <= 0) throw DomainError("chi-square needs df >= 1");
    if (statistic <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * statistic);
}

KsResult ks_exponential(const ExitSample& sample) {
    if (sample.n() < 100)
        throw TooFewSamples("KS test needs at least 100 uncensored times");
    if (sample.censoring_fraction() >= 0.01)
        throw ExcessCensoring("censoring fraction at or above 1%");
    std::vector<double> u(sample.times.begin(), sample.times.end());
    for (double& t : u) t *= sample.rate_used;
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double f = 1.0 - std::exp(-u[i]);
        d = std::max(d, (i + 1) / n - f);
        d = std::max(d, f - i / n);
    }
    KsResult r;
    r.statistic = d;
    r.n = sample.n();
    r.p_value = kolmogorov_p_value(std::sqrt(n) * d);
    return r;
}

SplitResult exit_split_test(const ExitSample& sample,
                            const GeneratorMatrix& gen) {
    const int i = sample.well;
    std::vector<long> counts(gen.n + 1, 0);
    long resolved = 0;
    for (const auto& l : sample.landings) {
        if (l && *l >= 1 && *l <= gen.n) {
            ++counts[*l];
            ++resolved;
        }
    }
    if (resolved == 0) throw TooFewSamples("no resolved landings");

    SplitResult res;
    res.n_resolved = resolved;
    const double qi = gen.rate(i - 1);
    for (int j = 1; j <= gen.n; ++j) {
        if (j == i) continue;
        const double target = qi > 0.0 ? gen(i - 1, j - 1) / qi : 0.0;
        if (target == 0.0 && counts[j] == 0) continue;
        const double phat = static_cast<double>(counts[j]) / resolved;
        const double se =
            std::sqrt(std::max(target * (1.0 - target), 1e-300) / resolved);
        res.destinations.push_back(j);
        res.fractions.push_back(phat);
        res.targets.push_back(target);
        res.z.push_back((phat - target) / se);
    }
    for (double z : res.z) res.max_abs_z = std::max(res.max_abs_z, std::abs(z));
    res.pass = res.max_abs_z <= 3.0;
    return res;
}

GeneratorEstimate empirical_generator(const std::vector<ExitSample>& samples,
                                      int n_wells, double eps,
                                      const LevyModel& model) {
    GeneratorEstimate est;
    est.q_hat.n = n_wells;
    est.q_hat.q.assign(static_cast<std::size_t>(n_wells) * n_wells, 0.0);
    est.se.assign(est.q_hat.q.size(), 0.0);
    est.row_present.assign(n_wells, false);

    const double hscale = model.tail_total(1.0 / eps);  // 1 / time_scale
    for (const auto& s : samples) {
        if (s.well < 1 || s.well > n_wells)
            throw DomainError("sample well out of range");
        if (s.n() < 100)
            throw TooFewSamples("well needs at least 100 uncensored records");
        if (s.censoring_fraction() >= 0.01)
            throw ExcessCensoring("censoring fraction at or above 1%");
        const int i = s.well - 1;
        est.row_present[i] = true;

        const double n = static_cast<double>(s.n());
        const double mean =
            std::accumulate(s.times.begin(), s.times.end(), 0.0) / n;
        double var = 0.0;
        for (double t : s.times) var += (t - mean) * (t - mean);
        var /= (n - 1.0);
        const double qi = 1.0 / (hscale * mean);
        // delta method: sd(1/mean)/|1/mean| = sd(mean)/mean
        const double rel_qi = std::sqrt(var / n) / mean;

        std::vector<long> counts(n_wells + 1, 0);
        long resolved = 0;
        for (const auto& l : s.landings)
            if (l && *l >= 1 && *l <= n_wells) {
                ++counts[*l];
                ++resolved;
            }
        est.q_hat.at(i, i) = -qi;
        est.se[i * n_wells + i] = qi * rel_qi;
        for (int j = 0; j < n_wells; ++j) {
            if (j == i) continue;
            const double p =
                resolved > 0
                    ? static_cast<double>(counts[j + 1]) / resolved
                    : 0.0;
            const double qij = qi * p;
            est.q_hat.at(i, j) = qij;
            double rel2 = rel_qi * rel_qi;
            if (resolved > 0 && p > 0.0 && p < 1.0)
                rel2 += (1.0 - p) / (p * resolved);
            est.se[i * n_wells + j] = qij * std::sqrt(rel2);
        }
    }
    return est;
}

int classify_snapshot(const Landscape& landscape, double x, double delta) {
    for (int k = 0; k < landscape.wells(); ++k)
        if (std::abs(x - landscape.minima[k]) <= delta) return k + 1;
    return 0;
}

bool FddResult::pass(double level) const {
    for (const auto& m : marginals)
        if (m.p_value < level) return false;
    return true;
}

FddResult fdd_test(const std::vector<double>& t_grid,
                   const std::vector<std::vector<int>>& classifications,
                   const GeneratorMatrix& gen, int i0) {
    if (t_grid.size() != classifications.size())
        throw DomainError("time grid and snapshot sets must align");
    if (i0 < 1 || i0 > gen.n) throw DomainError("start well out of range");

    FddResult res;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        FddTimePoint pt;
        pt.t = t_grid[k];
        pt.counts.assign(gen.n, 0);
        const auto& snaps = classifications[k];
        for (int c : snaps) {
            if (c >= 1 && c <= gen.n)
                ++pt.counts[c - 1];
            else
                ++pt.unclassified;
        }
        const long total = static_cast<long>(snaps.size());
        pt.unclassified_fraction =
            total > 0 ? static_cast<double>(pt.unclassified) / total : 0.0;
        if (pt.unclassified_fraction >= 0.05)
            throw UnclassifiedExcess(
                "snapshot fraction outside all Delta-balls at or above 5%");
        const long classified = total - pt.unclassified;

        const auto p = chain_transition_matrix(gen, pt.t);
        double chi2 = 0.0;
        int df = 0;
        for (int j = 0; j < gen.n; ++j) {
            const double expected = classified * p[(i0 - 1) * gen.n + j];
            if (expected < 1e-12) continue;
            const double diff = pt.counts[j] - expected;
            chi2 += diff * diff / expected;
            ++df;
        }
        pt.chi_square = chi2;
        pt.p_value = chi_square_p_value(chi2, std::max(df - 1, 1));
        res.marginals.push_back(std::move(pt));
    }
    return res;
}

double short_time_outside_fraction(const std::vector<double>& positions,
                                   const Landscape& landscape, int well,
                                   double delta) {
    if (positions.empty()) return 0.0;
    const double m = landscape.minima.at(well - 1);
    long outside = 0;
    for (double x : positions)
        if (std::abs(x - m) > delta) ++outside;
    return static_cast<double>(outside) / positions.size();
}

}  // namespace levylab
