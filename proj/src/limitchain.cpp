#include "levylab/limitchain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace levylab {

double GeneratorMatrix::max_rate() const {
    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, rate(i));
    return m;
}

GeneratorMatrix compute_generator(const Landscape& landscape, double r,
                                  double kappa) {
    if (!(r > 0.0)) throw DomainError("tail index r must be > 0");
    if (kappa < 0.0) throw DomainError("kappa must be >= 0");
    const int n = landscape.wells();
    GeneratorMatrix gen;
    gen.n = n;
    gen.q.assign(static_cast<std::size_t>(n) * n, 0.0);

    // |s_j - m_i|^{-r} with the infinite sentinels s_0, s_n contributing 0
    auto dist_pow = [&](int j, double m) {
        if (j <= 0 || j >= n) return 0.0;
        return std::pow(std::abs(landscape.saddles[j - 1] - m), -r);
    };

    const double wl = kappa / (1.0 + kappa);
    const double wr = 1.0 / (1.0 + kappa);
    for (int i = 0; i < n; ++i) {
        const double m = landscape.minima[i];
        double qi = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = (j < i) ? wl : wr;
            const double v = w * std::abs(dist_pow(j, m) - dist_pow(j + 1, m));
            gen.at(i, j) = v;
            qi += v;
        }
        gen.at(i, i) = -qi;
    }
    return gen;
}

double exit_rate(const Landscape& landscape, const LevyModel& model, int well,
                 double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    const int n = landscape.wells();
    if (well < 1 || well > n) throw DomainError("well index out of range");
    const double m = landscape.minima[well - 1];
    double lambda = 0.0;
    if (well - 1 >= 1)
        lambda += model.tail_minus((m - landscape.saddles[well - 2]) / eps);
    if (well <= n - 1)
        lambda += model.tail_plus((landscape.saddles[well - 1] - m) / eps);
    return lambda;
}

double time_scale(const LevyModel& model, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
    const double h = model.tail_total(1.0 / eps);
    if (!(h > 0.0)) throw DomainError("time scale undefined for trivial tails");
    return 1.0 / h;
}

std::vector<double> chain_transition_matrix(const GeneratorMatrix& gen,
                                            double t) {
    if (t < 0.0) throw DomainError("time must be >= 0");
    const int n = gen.n;
    std::vector<double> p(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) p[i * n + i] = 1.0;
    const double lam = gen.max_rate();
    if (lam == 0.0 || t == 0.0) return p;

    // A = I + Q/lam is stochastic; e^{tQ} = sum_k pois(k; lam t) A^k
    std::vector<double> a(gen.q.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[i * n + j] = (i == j ? 1.0 : 0.0) + gen(i, j) / lam;

    const double mu = lam * t;
    std::vector<double> result(p.size(), 0.0);
    std::vector<double> power(p);  // A^0
    double weight = std::exp(-mu);
    double cumulative = weight;
    for (std::size_t k = 0; k < result.size(); ++k)
        result[k] += weight * power[k];

    std::vector<double> next(p.size());
    long kterm = 0;
    while (1.0 - cumulative > 1e-14 && kterm < 100000) {
        ++kterm;
        // power <- power * A
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int l = 0; l < n; ++l)
                    acc += power[i * n + l] * a[l * n + j];
                next[i * n + j] = acc;
            }
        power.swap(next);
        weight *= mu / kterm;
        cumulative += weight;
        for (std::size_t k = 0; k < result.size(); ++k)
            result[k] += weight * power[k];
    }
    // absorb the truncated tail into a row renormalization
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += result[i * n + j];
        for (int j = 0; j < n; ++j) result[i * n + j] /= s;
    }
    return result;
}

std::vector<int> simulate_chain(const GeneratorMatrix& gen, int i0,
                                const std::vector<double>& t_grid,
                                RngStream& rng) {
    const int n = gen.n;
    if (i0 < 1 || i0 > n) throw DomainError("start state out of range");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (t_grid[k] < t_grid[k - 1])
            throw DomainError("time grid must be nondecreasing");

    std::vector<int> out;
    out.reserve(t_grid.size());
    int state = i0 - 1;
    double t = 0.0;
    double next_jump =
        gen.rate(state) > 0.0
            ? rng.exponential(gen.rate(state))
            : std::numeric_limits<double>::infinity();
    for (double tk : t_grid) {
        while (next_jump <= tk) {
            t = next_jump;
            // jump to j with probability q_ij / q_i
            const double qi = gen.rate(state);
            double u = rng.uniform() * qi;
            int dest = state;
            for (int j = 0; j < n; ++j) {
                if (j == state) continue;
                u -= gen(state, j);
                if (u <= 0.0) {
                    dest = j;
                    break;
                }
            }
            state = dest;
            next_jump = gen.rate(state) > 0.0
                            ? t + rng.exponential(gen.rate(state))
                            : std::numeric_limits<double>::infinity();
        }
        out.push_back(state + 1);
    }
    return out;
}

GaussianComparison gaussian_comparison(const Landscape& landscape, double tol) {
    if (landscape.wells() != 2)
        throw NotTwoWell("gaussian comparison needs exactly two wells");
    if (landscape.value_min.size() != 2 || landscape.value_saddle.size() != 1)
        throw DomainError("landscape lacks potential values at extrema");
    const double u1 = landscape.value_min[0];
    const double u2 = landscape.value_min[1];
    if (std::abs(u1 - u2) < tol)
        throw EqualDepth("well depths must differ");
    GaussianComparison g;
    g.generator = {0.0, 0.0, 1.0, -1.0};
    g.deep_well = u1 < u2 ? 1 : 2;
    g.shallow_well = u1 < u2 ? 2 : 1;
    g.barrier =
        2.0 * (landscape.value_saddle[0] - std::max(u1, u2));
    return g;
}

}  // namespace levylab
