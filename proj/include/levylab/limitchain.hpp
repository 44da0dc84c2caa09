#pragma once

#include <array>
#include <vector>

#include "levylab/errors.hpp"
#include "levylab/levy.hpp"
#include "levylab/potential.hpp"
#include "levylab/rng.hpp"

namespace levylab {

// Rate matrix of the limiting chain on the minima: nonnegative off-diagonal,
// zero row sums. Rates are per unit of rescaled time t, where model time is
// t / H(1/eps).
struct GeneratorMatrix {
    int n = 0;
    std::vector<double> q;  // row-major n*n

    double operator()(int i, int j) const { return q[i * n + j]; }
    double& at(int i, int j) { return q[i * n + j]; }
    double rate(int i) const { return -q[i * n + i]; }  // q_i
    double max_rate() const;
};

// q_ij from the saddle distances: weight (kappa 1{j<i} + 1{j>i})/(1+kappa)
// times | |s_{j-1}-m_i|^{-r} - |s_j-m_i|^{-r} |, infinite sentinels
// contributing zero.
GeneratorMatrix compute_generator(const Landscape& landscape, double r,
                                  double kappa);

// lambda^i(eps) = H_-((s_{i-1}-m_i)/eps) + H_+((s_i-m_i)/eps), with the
// sentinel terms zero. Wells are 1-based.
double exit_rate(const Landscape& landscape, const LevyModel& model, int well,
                 double eps);

// 1 / H(1/eps): one unit of chain time corresponds to this much model time
double time_scale(const LevyModel& model, double eps);

// e^{tQ} by uniformization (Poisson-weighted powers, tail mass 1e-14)
std::vector<double> chain_transition_matrix(const GeneratorMatrix& gen,
                                            double t);

// jump-chain simulation sampled at an increasing time grid; states 1-based
std::vector<int> simulate_chain(const GeneratorMatrix& gen, int i0,
                                const std::vector<double>& t_grid,
                                RngStream& rng);

struct GaussianComparison {
    std::array<double, 4> generator;  // row-major 2x2, (deep, shallow) order
    double barrier;                   // 2 (U(s_1) - U(m_shallow))
    int deep_well;                    // 1-based index into the landscape
    int shallow_well;
};

// Two-well Brownian benchmark: the absorbing limit generator [[0,0],[1,-1]]
// and the Kramers log-scale constant. Requires exactly two wells of strictly
// different depths.
GaussianComparison gaussian_comparison(const Landscape& landscape,
                                       double tol = 1e-9);

}  // namespace levylab
