#include "levylab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace levylab {

namespace {

std::vector<double> differentiate(const std::vector<double>& c) {
    std::vector<double> d;
    if (c.size() > 1) {
        d.resize(c.size() - 1);
        for (std::size_t k = 1; k < c.size(); ++k)
            d[k - 1] = static_cast<double>(k) * c[k];
    } else {
        d.assign(1, 0.0);
    }
    return d;
}

double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

}  // namespace

PolynomialPotential::PolynomialPotential(std::vector<double> coefficients)
    : coeffs_(std::move(coefficients)) {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    const int d = static_cast<int>(coeffs_.size()) - 1;
    if (d < 4) throw DomainError("potential degree must be at least 4");
    if (d % 2 != 0) throw DomainError("potential degree must be even");
    if (coeffs_.back() <= 0.0)
        throw DomainError("leading coefficient must be positive");
    dcoeffs_ = differentiate(coeffs_);
    ddcoeffs_ = differentiate(dcoeffs_);
}

double PolynomialPotential::value(double x) const { return horner(coeffs_, x); }
double PolynomialPotential::derivative(double x) const {
    return horner(dcoeffs_, x);
}
double PolynomialPotential::second_derivative(double x) const {
    return horner(ddcoeffs_, x);
}

double Landscape::delta0() const {
    double d = std::numeric_limits<double>::infinity();
    const int n = wells();
    for (int i = 0; i < n; ++i) {
        if (i - 1 >= 0) d = std::min(d, minima[i] - saddles[i - 1]);
        if (i < n - 1) d = std::min(d, saddles[i] - minima[i]);
    }
    return d;
}

Landscape Landscape::from_extrema(std::vector<double> minima,
                                  std::vector<double> saddles,
                                  std::vector<double> curvature_min,
                                  std::vector<double> curvature_saddle,
                                  std::vector<double> value_min,
                                  std::vector<double> value_saddle) {
    if (minima.empty()) throw NoMinimum("landscape has no minima");
    if (saddles.size() + 1 != minima.size())
        throw NonInterlaced("need exactly n-1 saddles for n minima");
    for (std::size_t i = 0; i < saddles.size(); ++i)
        if (!(minima[i] < saddles[i] && saddles[i] < minima[i + 1]))
            throw NonInterlaced("extrema do not interlace");
    for (double c : curvature_min)
        if (!(c > 0.0)) throw DegenerateExtremum("minimum with U'' <= 0");
    for (double c : curvature_saddle)
        if (!(c < 0.0)) throw DegenerateExtremum("saddle with U'' >= 0");
    Landscape l;
    l.minima = std::move(minima);
    l.saddles = std::move(saddles);
    l.curvature_min = std::move(curvature_min);
    l.curvature_saddle = std::move(curvature_saddle);
    l.value_min = std::move(value_min);
    l.value_saddle = std::move(value_saddle);
    return l;
}

Landscape analyze(const PolynomialPotential& potential, double search_radius,
                  double tol) {
    if (!(search_radius > 0.0)) throw DomainError("search_radius must be > 0");
    if (!(tol > 0.0)) throw DomainError("tol must be > 0");

    constexpr int kGridPoints = 10000;
    const double a = -search_radius, b = search_radius;
    const double step = (b - a) / kGridPoints;

    std::vector<double> roots;
    double xl = a, fl = potential.derivative(a);
    for (int k = 1; k <= kGridPoints; ++k) {
        const double xr = a + k * step;
        const double fr = potential.derivative(xr);
        if (fl == 0.0) roots.push_back(xl);
        if (fl * fr < 0.0) {
            // bisection on U'
            double lo = xl, hi = xr, flo = fl;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = potential.derivative(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        xl = xr;
        fl = fr;
    }
    if (fl == 0.0) roots.push_back(xl);

    if (roots.empty()) throw NoMinimum("U' has no sign change in search range");

    Landscape l;
    for (double r : roots) {
        const double c = potential.second_derivative(r);
        if (std::abs(c) < tol)
            throw DegenerateExtremum("U'' vanishes at extremum");
        if (c > 0.0) {
            l.minima.push_back(r);
            l.curvature_min.push_back(c);
            l.value_min.push_back(potential.value(r));
        } else {
            l.saddles.push_back(r);
            l.curvature_saddle.push_back(c);
            l.value_saddle.push_back(potential.value(r));
        }
    }
    if (l.minima.empty()) throw NoMinimum("no local minimum found");
    if (l.saddles.size() + 1 != l.minima.size())
        throw NonInterlaced("extremum counts violate interlacing");
    for (std::size_t i = 0; i < l.saddles.size(); ++i)
        if (!(l.minima[i] < l.saddles[i] && l.saddles[i] < l.minima[i + 1]))
            throw NonInterlaced("extrema do not interlace");
    return l;
}

double flow(const PolynomialPotential& potential, double x0, double t,
            double h, double overflow_bound) {
    if (!(h > 0.0)) throw DomainError("flow step h must be > 0");
    if (t < 0.0) throw DomainError("flow time must be >= 0");
    double x = x0, remaining = t;
    while (remaining > 0.0) {
        const double dt = std::min(h, remaining);
        const double k1 = potential.drift(x);
        const double k2 = potential.drift(x + 0.5 * dt * k1);
        const double k3 = potential.drift(x + 0.5 * dt * k2);
        const double k4 = potential.drift(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(std::abs(x) <= overflow_bound))
            throw OverflowError("deterministic flow exceeded overflow bound");
        remaining -= dt;
    }
    return x;
}

BasinLocation basin_of(const Landscape& landscape, double x,
                       double saddle_tol) {
    BasinLocation loc;
    for (std::size_t j = 0; j < landscape.saddles.size(); ++j) {
        if (std::abs(x - landscape.saddles[j]) < saddle_tol) {
            loc.at_saddle = true;
            loc.saddle_index = static_cast<int>(j) + 1;
            return loc;
        }
    }
    int well = 1;
    for (double s : landscape.saddles) {
        if (x > s) ++well;
    }
    loc.well = well;
    return loc;
}

namespace {

// time for the flow to move from x to y inside one monotone stretch:
// integral of 1/|U'| via composite Simpson with fixed refinement
double crossing_time(const PolynomialPotential& p, double x, double y) {
    if (x == y) return 0.0;
    const int n = 4096;  // even
    const double hh = (y - x) / n;
    auto f = [&](double v) { return 1.0 / std::abs(p.derivative(v)); };
    double acc = f(x) + f(y);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(x + k * hh);
    return std::abs(hh) / 3.0 * acc;
}

}  // namespace

double relaxation_time(const PolynomialPotential& potential,
                       const Landscape& landscape, double eps, double gamma) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");

    // c is a landscape constant: evaluate the crossing-time ratios at a fixed
    // reference epsilon so relaxation_time(eps) = c |ln eps| exactly
    const double eref = 1e-6;
    const double lay = std::pow(eref, gamma);         // boundary layer
    const double lvl = 0.5 * std::pow(eref, 2 * gamma);  // target around minimum
    const double log_ref = -std::log(eref);

    double c = 0.0;
    const int n = landscape.wells();
    for (int i = 0; i < n; ++i) {
        const double m = landscape.minima[i];
        if (i - 1 >= 0) {
            const double start = landscape.saddles[i - 1] + lay;
            if (start < m - lvl)
                c = std::max(c, crossing_time(potential, start, m - lvl) / log_ref);
        }
        if (i < n - 1) {
            const double start = landscape.saddles[i] - lay;
            if (start > m + lvl)
                c = std::max(c, crossing_time(potential, start, m + lvl) / log_ref);
        }
    }
    for (double s : landscape.saddles) {
        const double d = 2.0 * std::pow(eref, 2 * gamma);
        c = std::max(c, crossing_time(potential, s - lay, s - lay - d) / lay);
        c = std::max(c, crossing_time(potential, s + lay, s + lay + d) / lay);
    }
    return c * std::abs(std::log(eps));
}

}  // namespace levylab
