#pragma once

#include <cstdint>
#include <vector>

#include "levylab/errors.hpp"
#include "levylab/rng.hpp"

namespace levylab {

enum class SlowlyVarying { Constant, LogPower };

// Regularly varying tails H_+(u) = c_plus u^{-r} l(u) and
// H_-(-u) = c_minus u^{-r} l(u) for u >= 1, with l constant or
// l(u) = (ln(e+u))^p.
struct TailSpec {
    double r = 1.0;
    double c_plus = 0.0;
    double c_minus = 0.0;
    SlowlyVarying sv = SlowlyVarying::Constant;
    double log_power = 0.0;  // p, used when sv == LogPower

    void validate() const;
    bool trivial() const { return c_plus == 0.0 && c_minus == 0.0; }
    double kappa() const;  // c_minus / c_plus, 0 for the trivial tail
    double sv_factor(double u) const;
    double plus(double u) const;   // H_+(u), u >= 1
    double minus(double u) const;  // H_-(-u), u >= 1
    double total(double u) const { return plus(u) + minus(u); }
};

enum class InnerProfile { Stable, TruncatedEmpty };

// Generating triplet (d, nu, mu). The Levy measure is described piecewise:
// tails beyond |y| = 1 through TailSpec, and inside |y| <= 1 either the
// stable density continued inward (side coefficients r*c_minus, r*c_plus)
// or no mass at all.
struct LevyModel {
    double gaussian_var = 0.0;  // d
    double mu = 0.0;
    TailSpec tails;
    InnerProfile inner = InnerProfile::TruncatedEmpty;

    void validate() const;
    double alpha() const { return tails.r; }  // stable index when inner Stable

    double tail_plus(double u) const;
    double tail_minus(double u) const;
    double tail_total(double u) const;

    // nu(dy) = (c1 1{y<0} + c2 1{y>0}) |y|^{-1-alpha} dy with tail scales
    // c_-/alpha, c_+/alpha; density coefficients c1, c2 are taken directly
    static LevyModel stable(double alpha, double c1_density, double c2_density,
                            double d = 0.0, double mu = 0.0);
    // d > 0, no jumps at all
    static LevyModel brownian(double d, double mu = 0.0);
};

// beta_eps = H(eps^{-rho})
double big_jump_rate(const LevyModel& model, double eps, double rho);

// The eps,rho-dependent split of eps*L into a compound Poisson part beyond
// the threshold eps^{-rho} and a Gaussian surrogate with the first two
// moments of the compensated small-jump remainder.
class Decomposition {
public:
    Decomposition(const LevyModel& model, double eps, double rho);

    double eps() const { return eps_; }
    double rho() const { return rho_; }
    double threshold() const { return threshold_; }
    double beta() const { return beta_; }
    double small_var() const { return small_var_; }    // per unit time, for eps*xi
    double small_mean() const { return small_mean_; }  // per unit time, for eps*xi

    // Exp(beta) waiting time via inverse transform
    double sample_interjump(RngStream& rng) const;
    // one jump W of L conditioned on |W| > threshold (unscaled by eps)
    double sample_big_jump(RngStream& rng) const;
    // increment of eps*xi over time h: Gaussian surrogate
    double sample_small_increment(double h, RngStream& rng) const {
        return small_mean_ * h + std::sqrt(small_var_ * h) * rng.normal();
    }

private:
    double invert_plus(double u01) const;
    double invert_minus(double u01) const;

    const LevyModel model_;
    double eps_, rho_, threshold_, beta_, small_var_, small_mean_;
    double prob_negative_ = 0.0;
    // monotone bracket tables for the LogPower conditional-tail inversion
    std::vector<double> knots_plus_, cdf_plus_, knots_minus_, cdf_minus_;
};

// Exact increment of eps*L over time h for the two-sided stable measure
// (c1 1{y<0} + c2 1{y>0}) |y|^{-1-alpha} dy, via the standard
// trigonometric (Chambers-Mallows-Stuck) sampler. alpha = 1 requires
// c1 == c2. Matches the triplet convention with truncation 1{|y|<=1}.
double stable_increment(double alpha, double c1_density, double c2_density,
                        double eps, double h, RngStream& rng);

// per-u max over lambda_grid of |H_+(lambda u)/H_+(u) - lambda^{-r}|
std::vector<double> rv_ratio_deviation(const TailSpec& tails,
                                       const std::vector<double>& lambda_grid,
                                       const std::vector<double>& u_grid);

}  // namespace levylab
