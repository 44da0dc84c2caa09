#pragma once

#include <vector>

#include "levylab/errors.hpp"

namespace levylab {

// Multi-well potential U(x) = sum c_k x^k. Construction enforces the shape
// conditions that make U a confining multi-well candidate: degree >= 4 and
// even, positive leading coefficient. Whether the extrema actually interlace
// non-degenerately is checked by analyze().
class PolynomialPotential {
public:
    explicit PolynomialPotential(std::vector<double> coefficients);

    double value(double x) const;
    double derivative(double x) const;         // U'
    double second_derivative(double x) const;  // U''
    double drift(double x) const { return -derivative(x); }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<double>& coefficients() const { return coeffs_; }

private:
    std::vector<double> coeffs_;
    std::vector<double> dcoeffs_;
    std::vector<double> ddcoeffs_;
};

// Extrema of U in increasing order with the interlacing pattern
//   -inf = s_0 < m_1 < s_1 < ... < s_{n-1} < m_n < s_n = +inf.
// The infinite sentinels are implicit: saddles holds only the n-1 finite ones.
struct Landscape {
    std::vector<double> minima;
    std::vector<double> saddles;
    std::vector<double> curvature_min;     // U''(m_i) > 0
    std::vector<double> curvature_saddle;  // U''(s_i) < 0
    std::vector<double> value_min;         // U(m_i)
    std::vector<double> value_saddle;      // U(s_i)

    int wells() const { return static_cast<int>(minima.size()); }

    // smallest distance from any minimum to an adjacent finite saddle
    double delta0() const;

    // construct directly from positions (curvatures/values optional); the
    // interlacing and sign conventions are validated
    static Landscape from_extrema(std::vector<double> minima,
                                  std::vector<double> saddles,
                                  std::vector<double> curvature_min = {},
                                  std::vector<double> curvature_saddle = {},
                                  std::vector<double> value_min = {},
                                  std::vector<double> value_saddle = {});
};

// Locate and classify all extrema by a sign-change scan of U' on a uniform
// grid (1e4 points) over [-search_radius, search_radius] followed by
// bisection to tol. Throws DegenerateExtremum, NoMinimum or NonInterlaced.
Landscape analyze(const PolynomialPotential& potential, double search_radius,
                  double tol = 1e-12);

// Deterministic flow X^0_t(x0): classical fourth-order Runge-Kutta with fixed
// step h (last partial step shortened). Throws OverflowError if |X^0| exceeds
// overflow_bound.
double flow(const PolynomialPotential& potential, double x0, double t,
            double h = 1e-3, double overflow_bound = 1e6);

struct BasinLocation {
    bool at_saddle = false;
    int well = 0;          // 1-based, valid when !at_saddle
    int saddle_index = 0;  // 1-based, valid when at_saddle
};

// Domain-of-attraction index of x: well i with x in (s_{i-1}, s_i), or the
// saddle marker when x is within saddle_tol of some s_j.
BasinLocation basin_of(const Landscape& landscape, double x,
                       double saddle_tol = 1e-9);

// c|ln eps| with c the smallest constant for which the two relaxation
// displays hold: descent from the eps^gamma boundary layer to within
// eps^{2 gamma}/2 of the minimum in time c|ln eps|, and displacement away
// from a saddle by eps^gamma + 2 eps^{2 gamma} in time c eps^gamma. The
// crossing times are 1/|U'| integrals; c is evaluated at a fixed reference
// epsilon so the result scales exactly logarithmically in eps.
double relaxation_time(const PolynomialPotential& potential,
                       const Landscape& landscape, double eps, double gamma);

}  // namespace levylab
