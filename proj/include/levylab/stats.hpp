#pragma once

#include <optional>
#include <vector>

#include "levylab/errors.hpp"
#include "levylab/limitchain.hpp"
#include "levylab/potential.hpp"

namespace levylab {

// Collected first-exit or transition times out of one well, with landing
// destinations aligned to times. Merging is concatenation, so any estimator
// computed on merged accumulators equals the estimator on the pooled sample.
struct ExitSample {
    int well = 0;
    double eps = 0.0;
    double rate_used = 0.0;  // lambda^i(eps) used for rescaling
    std::vector<double> times;
    std::vector<std::optional<int>> landings;
    long censored = 0;  // horizon-exceeded records (excluded from times)

    long n() const { return static_cast<long>(times.size()); }
    double censoring_fraction() const {
        const double total = static_cast<double>(n() + censored);
        return total == 0.0 ? 0.0 : static_cast<double>(censored) / total;
    }
    void add(double time, std::optional<int> landing) {
        times.push_back(time);
        landings.push_back(landing);
    }
    void merge(const ExitSample& other);
};

// asymptotic Kolmogorov distribution tail, series truncated at 100 terms
double kolmogorov_p_value(double sqrt_n_times_d);
// upper tail of the chi-square distribution with df degrees of freedom
double chi_square_p_value(double statistic, int df);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    long n = 0;
};

// one-sample KS of {rate_used * t_k} against Exp(1); needs >= 100 uncensored
// times and censoring below 1%
KsResult ks_exponential(const ExitSample& sample);

struct SplitResult {
    std::vector<int> destinations;   // wells j != i with q_ij > 0 or landings
    std::vector<double> fractions;   // observed landing fractions
    std::vector<double> targets;     // q_ij / q_i
    std::vector<double> z;           // (p_hat - p) / SE(p)
    double max_abs_z = 0.0;
    bool pass = false;  // max |z| <= 3
    long n_resolved = 0;
};

// landing-destination frequencies against the generator's exit split
SplitResult exit_split_test(const ExitSample& sample,
                            const GeneratorMatrix& gen);

struct GeneratorEstimate {
    GeneratorMatrix q_hat;
    std::vector<double> se;         // per-entry standard errors (row-major)
    std::vector<bool> row_present;  // wells with data
};

// q_hat_i = 1 / (H(1/eps) * mean tau_i); q_hat_ij = q_hat_i * landing
// fraction, with delta-method standard errors
GeneratorEstimate empirical_generator(const std::vector<ExitSample>& samples,
                                      int n_wells, double eps,
                                      const LevyModel& model);

// classification of a snapshot: well index if within delta of a minimum,
// 0 otherwise
int classify_snapshot(const Landscape& landscape, double x, double delta);

struct FddTimePoint {
    double t = 0.0;
    std::vector<long> counts;  // per well
    long unclassified = 0;
    double chi_square = 0.0;
    double p_value = 0.0;
    double unclassified_fraction = 0.0;
};

struct FddResult {
    std::vector<FddTimePoint> marginals;
    bool pass(double level) const;
};

// chi-square of classified well counts at each rescaled time against the
// corresponding row of e^{tQ}; unclassified snapshots must stay below 5%
FddResult fdd_test(const std::vector<double>& t_grid,
                   const std::vector<std::vector<int>>& classifications,
                   const GeneratorMatrix& gen, int i0);

// fraction of snapshot positions outside B_delta(m_well)
double short_time_outside_fraction(const std::vector<double>& positions,
                                   const Landscape& landscape, int well,
                                   double delta);

}  // namespace levylab
