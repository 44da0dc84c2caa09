#include "levylab/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace levylab {

namespace {

std::string fmt(const char* name, double v) {
    return std::string(name) + " (got " + std::to_string(v) + ")";
}

}  // namespace

std::vector<std::string> constraint_violations(const SimConfig& cfg, double r,
                                               const Landscape& landscape) {
    std::vector<std::string> v;
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
        v.push_back(fmt("0 < eps < 1", cfg.eps));
    if (!(cfg.rho > 0.5 && cfg.rho < 1.0))
        v.push_back(fmt("1/2 < rho < 1", cfg.rho));
    if (!(cfg.gamma > 0.0))
        v.push_back(fmt("gamma > 0", cfg.gamma));
    if (!(cfg.gamma < 0.25 * (1.0 - cfg.rho)))
        v.push_back(fmt("gamma < (1-rho)/4", cfg.gamma));
    if (!(2.0 * cfg.gamma < cfg.rho))
        v.push_back(fmt("2 gamma < rho", cfg.rho));
    if (!(cfg.rho < 1.0 - 2.0 * cfg.gamma))
        v.push_back(fmt("rho < 1 - 2 gamma", cfg.rho));
    if (!(r * (2.0 * cfg.rho - 1.0) + cfg.gamma > 0.0))
        v.push_back(fmt("r (2 rho - 1) + gamma > 0", r));
    if (!(cfg.h > 0.0)) v.push_back(fmt("h > 0", cfg.h));
    if (!(cfg.overflow > 0.0)) v.push_back(fmt("overflow > 0", cfg.overflow));
    if (!(cfg.edge_scale > 0.0))
        v.push_back(fmt("edge_scale > 0", cfg.edge_scale));
    const double d0 = landscape.delta0();
    const double delta = cfg.resolved_delta(landscape);
    if (!(delta > 0.0 && delta < d0))
        v.push_back(fmt("0 < delta < delta0", delta));
    if (!(delta + 2.0 * cfg.edge() < d0))
        v.push_back(fmt("delta + 2 edge < delta0", delta + 2.0 * cfg.edge()));
    return v;
}

PathSimulator::PathSimulator(PolynomialPotential potential, Landscape landscape,
                             LevyModel model, SimConfig cfg)
    : potential_(std::move(potential)),
      landscape_(std::move(landscape)),
      model_(std::move(model)),
      cfg_(cfg),
      decomp_(model_, cfg.eps, cfg.rho) {
    auto violations = constraint_violations(cfg_, model_.tails.r, landscape_);
    if (!violations.empty())
        throw ConfigError("invalid simulation parameters: " + violations[0]);
    if (cfg_.mode == SimMode::ExactStable) {
        if (model_.inner != InnerProfile::Stable)
            throw ConfigError("exact-stable mode requires a stable model");
        stable_c1_ = model_.alpha() * model_.tails.c_minus;
        stable_c2_ = model_.alpha() * model_.tails.c_plus;
    }
    delta_ = cfg_.resolved_delta(landscape_);
}

double PathSimulator::integrate_drift(double x, double dt) const {
    double remaining = dt;
    while (remaining > 0.0) {
        const double d = potential_.drift(x);
        const double ad = std::abs(d);
        double step = remaining;
        const double cap = 0.25 * std::max(1.0, std::abs(x));
        if (ad * step > cap) step = cap / ad;
        x += d * step;
        remaining -= step;
        if (!(std::abs(x) < 1e307)) break;  // caught by the overflow guard
    }
    return x;
}

PathSimulator::StepResult PathSimulator::step_interval(double x0, double t0,
                                                       double duration,
                                                       RngStream& rng) const {
    if (duration < 0.0) throw DomainError("duration must be >= 0");
    PathState s;
    s.x = x0;
    s.t = t0;
    // no jump scheduled: small-jump dynamics only
    auto never = [](double, double) { return false; };
    const AdvanceOutcome out = advance(s, t0 + duration, never, rng);
    return StepResult{s.x, out == AdvanceOutcome::Overflow};
}

std::optional<int> PathSimulator::omega_eps_index(double x) const {
    const int n = landscape_.wells();
    const double e2 = 2.0 * cfg_.edge();
    for (int i = 1; i <= n; ++i) {
        const bool left_ok =
            (i == 1) || (x >= landscape_.saddles[i - 2] + e2);
        const bool right_ok =
            (i == n) || (x <= landscape_.saddles[i - 1] - e2);
        if (left_ok && right_ok) return i;
    }
    return std::nullopt;
}

bool PathSimulator::in_omega_eps(int well, double x) const {
    auto idx = omega_eps_index(x);
    return idx && *idx == well;
}

bool PathSimulator::in_sigma_interval(int well, double x) const {
    const int n = landscape_.wells();
    const double e = cfg_.edge();
    const bool left_ok =
        (well == 1) || (x >= landscape_.saddles[well - 2] + e);
    const bool right_ok =
        (well == n) || (x <= landscape_.saddles[well - 1] - e);
    return left_ok && right_ok;
}

ExitRecord PathSimulator::first_exit_sigma(int well, double x0,
                                           RngStream& rng) const {
    const int n = landscape_.wells();
    if (well < 1 || well > n) throw PreconditionError("well index out of range");
    if (!in_omega_eps(well, x0))
        throw PreconditionError("start point outside the shrunk well");
    // landing is classified by shrunk-well membership at the exit point;
    // the saddle zone between the Omega sets yields no landing
    std::optional<int> landing;
    auto rule = [this, well, &landing](double, double x) {
        if (in_sigma_interval(well, x)) return false;
        landing = omega_eps_index(x);
        return true;
    };
    ExitRecord rec = simulate_until(x0, rule, rng, StopKind::Sigma);
    rec.start_well = well;
    if (rec.kind == StopKind::Sigma) rec.landing_well = landing;
    return rec;
}

ExitRecord PathSimulator::first_exit_sigma(int well, RngStream& rng) const {
    return first_exit_sigma(well, landscape_.minima[well - 1], rng);
}

ExitRecord PathSimulator::transition_tau(int well, double x0,
                                         RngStream& rng) const {
    const int n = landscape_.wells();
    if (well < 1 || well > n) throw PreconditionError("well index out of range");
    if (std::abs(x0 - landscape_.minima[well - 1]) > delta_)
        throw PreconditionError("start point outside the Delta-ball");
    int landing = 0;
    auto rule = [this, well, &landing](double, double x) {
        for (int k = 1; k <= landscape_.wells(); ++k) {
            if (k == well) continue;
            if (std::abs(x - landscape_.minima[k - 1]) <= delta_) {
                landing = k;
                return true;
            }
        }
        return false;
    };
    ExitRecord rec = simulate_until(x0, rule, rng, StopKind::Tau);
    rec.start_well = well;
    if (rec.kind == StopKind::Tau) rec.landing_well = landing;
    return rec;
}

ExitRecord PathSimulator::transition_tau(int well, RngStream& rng) const {
    return transition_tau(well, landscape_.minima[well - 1], rng);
}

ExitRecord PathSimulator::saddle_escape(int saddle_j, double x0,
                                        RngStream& rng) const {
    const int ns = static_cast<int>(landscape_.saddles.size());
    if (saddle_j < 1 || saddle_j > ns)
        throw PreconditionError("saddle index out of range");
    const double s = landscape_.saddles[saddle_j - 1];
    const double radius = 2.0 * cfg_.edge();
    if (std::abs(x0 - s) > radius)
        throw PreconditionError("start point outside the saddle ball");
    std::optional<int> landing;
    auto rule = [this, s, radius, &landing](double, double x) {
        if (std::abs(x - s) <= radius) return false;
        landing = omega_eps_index(x);
        return true;
    };
    ExitRecord rec = simulate_until(x0, rule, rng, StopKind::SaddleS);
    rec.start_well = 0;
    if (rec.kind == StopKind::SaddleS) rec.landing_well = landing;
    return rec;
}

namespace {

struct TripleRule {
    const PathSimulator* sim;
    int well;
    double large_jump_threshold;
    std::optional<double> sigma, big_t, tau;
    std::optional<double> first_large_jump;
    int landing = 0;

    bool operator()(double t, double x) {
        if (!sigma && !sim->in_sigma_interval(well, x)) sigma = t;
        if (!big_t) {
            auto idx = sim->omega_eps_index(x);
            if (idx && *idx != well) big_t = t;
        }
        if (!tau) {
            const auto& l = sim->landscape();
            for (int k = 1; k <= l.wells(); ++k) {
                if (k == well) continue;
                if (std::abs(x - l.minima[k - 1]) <= sim->delta()) {
                    tau = t;
                    landing = k;
                    break;
                }
            }
        }
        return tau.has_value();
    }
    void on_jump(double t, double w) {
        if (!first_large_jump &&
            std::abs(w) > large_jump_threshold)
            first_large_jump = t;
    }
};

}  // namespace

PathSimulator::TripleTimes PathSimulator::sigma_t_tau(int well, double x0,
                                                      RngStream& rng) const {
    if (std::abs(x0 - landscape_.minima[well - 1]) > delta_)
        throw PreconditionError("start point outside the Delta-ball");
    TripleRule rule{this, well, 4.0 * cfg_.edge(), {}, {}, {}, {}, 0};
    PathState s = init_state(x0, rng);
    rule(s.t, s.x);
    advance(s, cfg_.horizon, rule, rng);
    TripleTimes out;
    out.sigma = rule.sigma;
    out.big_t = rule.big_t;
    out.tau = rule.tau;
    if (rule.tau) out.landing = rule.landing;
    out.n_big_jumps = s.n_jumps;
    out.overflowed = s.overflowed;
    out.first_large_jump = rule.first_large_jump;
    return out;
}

PathSimulator::TubeResult PathSimulator::tube_deviation(double x0, double t_max,
                                                        RngStream& rng) const {
    TubeResult res;
    double t_end = t_max;
    if (decomp_.beta() > 0.0) {
        const double clock = decomp_.sample_interjump(rng);
        if (clock < t_end) {
            t_end = clock;
            res.jump_clock_truncated = true;
        }
    }
    double x = x0, xf = x0, t = 0.0;
    while (t < t_end) {
        const double k = std::floor(t / cfg_.h);
        double tn = (k + 1.0) * cfg_.h;
        if (tn <= t) tn = (k + 2.0) * cfg_.h;
        tn = std::min(tn, t_end);
        const double dt = tn - t;
        // Euler + surrogate noise on the same grid as the RK4 reference
        x = integrate_drift(x, dt);
        x += decomp_.sample_small_increment(dt, rng);
        const double k1 = potential_.drift(xf);
        const double k2 = potential_.drift(xf + 0.5 * dt * k1);
        const double k3 = potential_.drift(xf + 0.5 * dt * k2);
        const double k4 = potential_.drift(xf + dt * k3);
        xf += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = tn;
        res.sup_deviation = std::max(res.sup_deviation, std::abs(x - xf));
        if (!(std::abs(x) <= cfg_.overflow)) break;
    }
    res.elapsed = t;
    return res;
}

}  // namespace levylab
