#include "levylab/levy.hpp"

#include <algorithm>
#include <cmath>

namespace levylab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;

// integral of 1 - cos over v^{1+alpha}: scale between a stable density
// coefficient pair and the S_alpha(sigma, beta, 0) parametrization
double stable_scale_constant(double alpha) {
    if (alpha == 1.0) return kPi / 2.0;
    return std::tgamma(2.0 - alpha) * std::cos(kPi * alpha / 2.0) /
           (alpha * (1.0 - alpha));
}

// composite Simpson on [a,b] in log space, n even
template <class F>
double log_simpson(F&& f, double a, double b, int n = 4096) {
    if (b <= a) return 0.0;
    const double sa = std::log(a), sb = std::log(b);
    const double h = (sb - sa) / n;
    auto g = [&](double s) {
        const double y = std::exp(s);
        return f(y) * y;
    };
    double acc = g(sa) + g(sb);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * g(sa + k * h);
    return h / 3.0 * acc;
}

}  // namespace

void TailSpec::validate() const {
    if (trivial()) return;
    if (!(r > 0.0)) throw DomainError("tail index r must be > 0");
    if (c_plus < 0.0 || c_minus < 0.0)
        throw DomainError("tail scales must be nonnegative");
    if (c_plus == 0.0 && c_minus > 0.0)
        throw DomainError("left-only tails would make kappa infinite");
    if (sv == SlowlyVarying::LogPower) {
        if (log_power < -2.0 || log_power > 2.0)
            throw DomainError("log power p must lie in [-2,2]");
        if (log_power > 0.0) {
            // H_+ must be strictly decreasing on [1,inf)
            double prev = sv_factor(1.0);
            for (double u = 1.0; u < 1e12; u *= 1.3) {
                const double un = u * 1.3;
                const double ratio = std::pow(un / u, -r) * sv_factor(un) / prev;
                if (ratio >= 1.0)
                    throw DomainError("tail not strictly decreasing for (r,p)");
                prev = sv_factor(un);
            }
        }
    }
}

double TailSpec::kappa() const {
    if (trivial()) return 0.0;
    return c_minus / c_plus;
}

double TailSpec::sv_factor(double u) const {
    if (sv == SlowlyVarying::Constant) return 1.0;
    return std::pow(std::log(kE + u), log_power);
}

double TailSpec::plus(double u) const {
    if (u < 1.0) throw DomainError("tails are defined for u >= 1");
    if (c_plus == 0.0) return 0.0;
    return c_plus * std::pow(u, -r) * sv_factor(u);
}

double TailSpec::minus(double u) const {
    if (u < 1.0) throw DomainError("tails are defined for u >= 1");
    if (c_minus == 0.0) return 0.0;
    return c_minus * std::pow(u, -r) * sv_factor(u);
}

void LevyModel::validate() const {
    if (gaussian_var < 0.0) throw DomainError("gaussian variance must be >= 0");
    tails.validate();
    if (inner == InnerProfile::Stable) {
        if (tails.trivial())
            throw DomainError("stable inner profile requires nontrivial tails");
        if (!(tails.r > 0.0 && tails.r < 2.0))
            throw DomainError("stable index must lie in (0,2)");
        if (tails.sv != SlowlyVarying::Constant)
            throw DomainError("stable inner profile requires constant sv");
    }
}

double LevyModel::tail_plus(double u) const { return tails.plus(u); }
double LevyModel::tail_minus(double u) const { return tails.minus(u); }
double LevyModel::tail_total(double u) const { return tails.total(u); }

LevyModel LevyModel::stable(double alpha, double c1_density, double c2_density,
                            double d, double mu) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("stable index must lie in (0,2)");
    if (c2_density <= 0.0 && c1_density > 0.0)
        throw DomainError("right tail scale must dominate (kappa finite)");
    LevyModel m;
    m.gaussian_var = d;
    m.mu = mu;
    m.tails.r = alpha;
    m.tails.c_plus = c2_density / alpha;
    m.tails.c_minus = c1_density / alpha;
    m.tails.sv = SlowlyVarying::Constant;
    m.inner = InnerProfile::Stable;
    m.validate();
    return m;
}

LevyModel LevyModel::brownian(double d, double mu) {
    if (!(d > 0.0)) throw DomainError("brownian model needs d > 0");
    LevyModel m;
    m.gaussian_var = d;
    m.mu = mu;
    m.tails = TailSpec{1.0, 0.0, 0.0, SlowlyVarying::Constant, 0.0};
    m.inner = InnerProfile::TruncatedEmpty;
    return m;
}

double big_jump_rate(const LevyModel& model, double eps, double rho) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
    return model.tail_total(std::pow(eps, -rho));
}

Decomposition::Decomposition(const LevyModel& model, double eps, double rho)
    : model_(model), eps_(eps), rho_(rho) {
    model_.validate();
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0,1)");
    threshold_ = std::pow(eps, -rho);
    beta_ = model_.tail_total(threshold_);
    prob_negative_ = beta_ > 0.0 ? model_.tail_minus(threshold_) / beta_ : 0.0;

    const TailSpec& t = model_.tails;
    double i2 = 0.0;  // int_{|y|<=u0} y^2 nu(dy)
    double i1 = 0.0;  // int_{1<|y|<=u0} y nu(dy)
    const double u0 = threshold_;
    if (model_.inner == InnerProfile::Stable) {
        const double a = t.r;
        const double c1 = a * t.c_minus, c2 = a * t.c_plus;
        i2 = (c1 + c2) * std::pow(u0, 2.0 - a) / (2.0 - a);
        if (a == 1.0)
            i1 = (c2 - c1) * std::log(u0);
        else
            i1 = (c2 - c1) * (std::pow(u0, 1.0 - a) - 1.0) / (1.0 - a);
    } else if (!t.trivial()) {
        if (t.sv == SlowlyVarying::Constant) {
            const double r = t.r;
            const double cs = (t.c_plus + t.c_minus) * r;
            const double cd = (t.c_plus - t.c_minus) * r;
            i2 = (r == 2.0) ? cs * std::log(u0)
                            : cs * (std::pow(u0, 2.0 - r) - 1.0) / (2.0 - r);
            i1 = (r == 1.0) ? cd * std::log(u0)
                            : cd * (std::pow(u0, 1.0 - r) - 1.0) / (1.0 - r);
        } else {
            // density of one side with scale c: -d/du [c u^{-r} l(u)]
            auto density = [&](double c, double y) {
                const double l = t.sv_factor(y);
                const double lp = t.log_power *
                                  std::pow(std::log(kE + y), t.log_power - 1.0) /
                                  (kE + y);
                return c * (t.r * std::pow(y, -t.r - 1.0) * l -
                            std::pow(y, -t.r) * lp);
            };
            i2 = log_simpson(
                [&](double y) {
                    return y * y * (density(t.c_plus, y) + density(t.c_minus, y));
                },
                1.0, u0);
            i1 = log_simpson(
                [&](double y) {
                    return y * (density(t.c_plus, y) - density(t.c_minus, y));
                },
                1.0, u0);
        }
    }
    small_var_ = eps_ * eps_ * (model_.gaussian_var + i2);
    small_mean_ = eps_ * (model_.mu + i1);

    if (beta_ > 0.0 && t.sv == SlowlyVarying::LogPower) {
        // bracket tables for conditional-tail inversion, 1024 knots each side
        auto build = [&](double scale, auto tail, std::vector<double>& knots,
                         std::vector<double>& cdf) {
            if (scale == 0.0) return;
            const double g0 = tail(u0);
            double hi = u0 * 2.0;
            while (tail(hi) / g0 > 1e-12) hi *= 2.0;
            const int n = 1024;
            knots.resize(n);
            cdf.resize(n);
            const double la = std::log(u0), lb = std::log(hi);
            for (int k = 0; k < n; ++k) {
                knots[k] = std::exp(la + (lb - la) * k / (n - 1));
                cdf[k] = tail(knots[k]) / g0;
            }
        };
        build(t.c_plus, [&](double u) { return model_.tail_plus(u); },
              knots_plus_, cdf_plus_);
        build(t.c_minus, [&](double u) { return model_.tail_minus(u); },
              knots_minus_, cdf_minus_);
    }
}

double Decomposition::sample_interjump(RngStream& rng) const {
    if (!(beta_ > 0.0))
        throw PreconditionError("interjump sampling needs beta > 0");
    return rng.exponential(beta_);
}

namespace {

// invert a monotone decreasing conditional tail g on [u0, inf) at level u01
template <class G>
double invert_tail(G&& g, double u0, double u01,
                   const std::vector<double>& knots,
                   const std::vector<double>& cdf) {
    double lo = u0, hi;
    if (!knots.empty()) {
        // cdf is decreasing along knots; find bracketing segment
        auto it = std::lower_bound(cdf.rbegin(), cdf.rend(), u01);
        const std::size_t j = cdf.size() - 1 - (it - cdf.rbegin());
        lo = (j + 1 < knots.size()) ? knots[j] : knots.back();
        hi = (j + 1 < knots.size()) ? knots[j + 1] : knots.back() * 2.0;
        if (j >= knots.size()) lo = u0;
        lo = std::max(lo, u0);
        while (g(hi) > u01) hi *= 2.0;
        if (g(lo) < u01) lo = u0;
    } else {
        hi = u0 * 2.0;
        while (g(hi) > u01) hi *= 2.0;
    }
    // bisection to relative tolerance 1e-10
    while ((hi - lo) / hi > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > u01)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double Decomposition::invert_plus(double u01) const {
    const TailSpec& t = model_.tails;
    if (t.sv == SlowlyVarying::Constant)
        return threshold_ * std::pow(u01, -1.0 / t.r);
    const double g0 = model_.tail_plus(threshold_);
    return invert_tail([&](double u) { return model_.tail_plus(u) / g0; },
                       threshold_, u01, knots_plus_, cdf_plus_);
}

double Decomposition::invert_minus(double u01) const {
    const TailSpec& t = model_.tails;
    if (t.sv == SlowlyVarying::Constant)
        return threshold_ * std::pow(u01, -1.0 / t.r);
    const double g0 = model_.tail_minus(threshold_);
    return invert_tail([&](double u) { return model_.tail_minus(u) / g0; },
                       threshold_, u01, knots_minus_, cdf_minus_);
}

double Decomposition::sample_big_jump(RngStream& rng) const {
    if (!(beta_ > 0.0))
        throw PreconditionError("big-jump sampling needs beta > 0");
    const bool negative = rng.uniform() < prob_negative_;
    const double u01 = rng.uniform();
    return negative ? -invert_minus(u01) : invert_plus(u01);
}

double stable_increment(double alpha, double c1_density, double c2_density,
                        double eps, double h, RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("stable index must lie in (0,2)");
    if (!(h > 0.0)) throw DomainError("time step must be > 0");
    if (c1_density < 0.0 || c2_density < 0.0 ||
        c1_density + c2_density <= 0.0)
        throw DomainError("side weights must be nonnegative, not both zero");
    if (alpha == 1.0 && c1_density != c2_density)
        throw DomainError("alpha = 1 supported for symmetric weights only");

    const double csum = c1_density + c2_density;
    const double beta = (c2_density - c1_density) / csum;
    const double sigma_alpha = csum * stable_scale_constant(alpha);
    const double theta = kPi * (rng.uniform() - 0.5);  // U(-pi/2, pi/2)
    const double w = -std::log(rng.uniform());         // Exp(1)

    double x;
    if (alpha == 1.0) {
        x = std::tan(theta);  // standard Cauchy
        return eps * h * sigma_alpha * x;
    }
    const double tb = beta * std::tan(kPi * alpha / 2.0);
    const double b0 = std::atan(tb) / alpha;
    const double s0 = std::pow(1.0 + tb * tb, 0.5 / alpha);
    x = s0 * std::sin(alpha * (theta + b0)) /
        std::pow(std::cos(theta), 1.0 / alpha) *
        std::pow(std::cos(theta - alpha * (theta + b0)) / w,
                 (1.0 - alpha) / alpha);
    // drift offset from the |y|<=1 truncation in the triplet
    const double m_adj = (c2_density - c1_density) / (alpha - 1.0);
    return eps * (std::pow(h * sigma_alpha, 1.0 / alpha) * x + h * m_adj);
}

std::vector<double> rv_ratio_deviation(const TailSpec& tails,
                                       const std::vector<double>& lambda_grid,
                                       const std::vector<double>& u_grid) {
    tails.validate();
    if (tails.trivial()) throw DomainError("rv check needs nontrivial tails");
    for (double l : lambda_grid)
        if (l < 0.5 || l > 2.0)
            throw DomainError("lambda grid must lie in [1/2,2]");
    for (std::size_t k = 1; k < u_grid.size(); ++k)
        if (u_grid[k] <= u_grid[k - 1])
            throw DomainError("u grid must be increasing");
    std::vector<double> dev;
    dev.reserve(u_grid.size());
    for (double u : u_grid) {
        if (u < 2.0) throw DomainError("u grid must start at 2 or above");
        double worst = 0.0;
        const double hu = tails.plus(u);
        for (double l : lambda_grid)
            worst = std::max(worst,
                             std::abs(tails.plus(l * u) / hu - std::pow(l, -tails.r)));
        dev.push_back(worst);
    }
    return dev;
}

}  // namespace levylab
