#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "levylab/errors.hpp"
#include "levylab/levy.hpp"
#include "levylab/limitchain.hpp"
#include "levylab/potential.hpp"
#include "levylab/rng.hpp"

namespace levylab {

enum class SimMode { Decomposed, ExactStable };

struct SimConfig {
    double eps = 0.1;
    double rho = 0.7;
    double gamma = 0.05;
    double h = 1e-3;
    double horizon = 1e4;
    double overflow = 1e6;
    double delta = 0.0;        // B_Delta radius; 0 selects delta0/4
    double edge_scale = 0.25;  // well-boundary layer e = edge_scale * eps
    SimMode mode = SimMode::Decomposed;

    // boundary layer of the stopping sets; stands in for the eps^gamma layer
    // of the asymptotic definitions, which at finite eps would swallow the
    // wells (eps^gamma ~ 1 for admissible gamma)
    double edge() const { return edge_scale * eps; }
    double resolved_delta(const Landscape& l) const {
        return delta > 0.0 ? delta : l.delta0() / 4.0;
    }
};

// all violated parameter constraints, empty when the configuration is valid
std::vector<std::string> constraint_violations(const SimConfig& cfg, double r,
                                               const Landscape& landscape);

enum class StopKind { None, Sigma, BigT, Tau, SaddleS };

struct ExitRecord {
    int start_well = 0;  // 1-based
    StopKind kind = StopKind::None;
    double stop_time = 0.0;
    std::optional<int> landing_well;
    long n_big_jumps = 0;  // arrivals strictly before stop_time
    bool overflowed = false;
    bool horizon_exceeded = false;
};

// One trajectory's carried state. next_jump is the absolute arrival time of
// the pending compound-Poisson jump, so a run can be split and resumed with
// the same stream and reproduce a single longer run exactly (resume points
// must lie on the global h-grid or on jump times).
struct PathState {
    double x = 0.0;
    double t = 0.0;
    double next_jump = std::numeric_limits<double>::infinity();
    long n_jumps = 0;
    bool overflowed = false;
};

enum class AdvanceOutcome { ReachedEnd, RuleStop, Overflow };

// Path simulation of the jump diffusion: small-jump Euler evolution between
// compound-Poisson arrivals with instantaneous injection of eps*W at arrival
// times. Euler substeps live on the global grid {k h}; stopping rules are
// evaluated after every substep and immediately after every jump.
class PathSimulator {
public:
    PathSimulator(PolynomialPotential potential, Landscape landscape,
                  LevyModel model, SimConfig cfg);

    const SimConfig& config() const { return cfg_; }
    const Landscape& landscape() const { return landscape_; }
    const PolynomialPotential& potential() const { return potential_; }
    const Decomposition& decomposition() const { return decomp_; }
    double delta() const { return delta_; }

    PathState init_state(double x0, RngStream& rng) const {
        PathState s;
        s.x = x0;
        if (cfg_.mode == SimMode::Decomposed && decomp_.beta() > 0.0)
            s.next_jump = decomp_.sample_interjump(rng);
        return s;
    }

    // evolve the state to t_end; Rule is bool(double t, double x) returning
    // true to stop, optionally with on_jump(double t, double w_scaled)
    template <class Rule>
    AdvanceOutcome advance(PathState& s, double t_end, Rule&& rule,
                           RngStream& rng) const {
        while (s.t < t_end) {
            const double seg_end = std::min(t_end, s.next_jump);
            while (s.t < seg_end) {
                const double t_next = next_boundary(s.t, seg_end);
                const double dt = t_next - s.t;
                s.x = integrate_drift(s.x, dt);
                s.x += noise_increment(dt, rng);
                s.t = t_next;
                if (!(std::abs(s.x) <= cfg_.overflow)) {
                    s.overflowed = true;
                    return AdvanceOutcome::Overflow;
                }
                if (rule(s.t, s.x)) return AdvanceOutcome::RuleStop;
            }
            if (s.next_jump <= t_end && s.t == s.next_jump) {
                const double w = cfg_.eps * decomp_.sample_big_jump(rng);
                s.x += w;
                if constexpr (requires { rule.on_jump(s.t, w); })
                    rule.on_jump(s.t, w);
                if (!(std::abs(s.x) <= cfg_.overflow)) {
                    s.overflowed = true;
                    return AdvanceOutcome::Overflow;
                }
                if (rule(s.t, s.x)) return AdvanceOutcome::RuleStop;
                s.n_jumps += 1;
                s.next_jump = s.t + decomp_.sample_interjump(rng);
            }
        }
        return AdvanceOutcome::ReachedEnd;
    }

    // generic stopped run from x0 with the configured horizon
    template <class Rule>
    ExitRecord simulate_until(double x0, Rule&& rule, RngStream& rng,
                              StopKind kind_on_stop = StopKind::None,
                              double horizon = -1.0) const {
        if (!std::isfinite(x0)) throw PreconditionError("x0 must be finite");
        const double t_end = horizon > 0.0 ? horizon : cfg_.horizon;
        PathState s = init_state(x0, rng);
        ExitRecord rec;
        if (rule(s.t, s.x)) {
            rec.kind = kind_on_stop;
            rec.stop_time = s.t;
            return rec;
        }
        const AdvanceOutcome out = advance(s, t_end, rule, rng);
        rec.stop_time = s.t;
        rec.n_big_jumps = s.n_jumps;
        rec.overflowed = s.overflowed;
        if (out == AdvanceOutcome::RuleStop)
            rec.kind = kind_on_stop;
        else if (out == AdvanceOutcome::ReachedEnd)
            rec.horizon_exceeded = true;
        return rec;
    }

    // small-jump dynamics only (between big jumps); in ExactStable mode this
    // is the full dynamics. Returns the state after `duration`.
    struct StepResult {
        double x;
        bool overflowed = false;
    };
    StepResult step_interval(double x0, double t0, double duration,
                             RngStream& rng) const;

    // first exit from [s_{i-1}+e, s_i-e]
    ExitRecord first_exit_sigma(int well, double x0, RngStream& rng) const;
    ExitRecord first_exit_sigma(int well, RngStream& rng) const;

    // first entry into another well's Delta-ball
    ExitRecord transition_tau(int well, double x0, RngStream& rng) const;
    ExitRecord transition_tau(int well, RngStream& rng) const;

    // first exit from the 2e-ball around saddle j (1-based)
    ExitRecord saddle_escape(int saddle_j, double x0, RngStream& rng) const;

    // instrumented single trajectory recording sigma, T and tau together
    struct TripleTimes {
        std::optional<double> sigma, big_t, tau;
        std::optional<int> landing;
        long n_big_jumps = 0;
        bool overflowed = false;
        std::optional<double> first_large_jump;  // first |eps W| > 4e
    };
    TripleTimes sigma_t_tau(int well, double x0, RngStream& rng) const;

    // sup deviation from the deterministic flow on the shared grid, running
    // the small-jump dynamics up to min(t_max, fresh Exp(beta) draw)
    struct TubeResult {
        double sup_deviation = 0.0;
        double elapsed = 0.0;
        bool jump_clock_truncated = false;
    };
    TubeResult tube_deviation(double x0, double t_max, RngStream& rng) const;

    // interval [s_{i-1}+2e, s_i-2e] membership (the landing sets); 1-based
    std::optional<int> omega_eps_index(double x) const;
    bool in_omega_eps(int well, double x) const;
    // sigma stopping interval [s_{i-1}+e, s_i-e]
    bool in_sigma_interval(int well, double x) const;

private:
    double next_boundary(double t, double seg_end) const {
        const double k = std::floor(t / cfg_.h);
        double tn = (k + 1.0) * cfg_.h;
        if (tn <= t) tn = (k + 2.0) * cfg_.h;
        return std::min(tn, seg_end);
    }

    // explicit Euler with displacement-capped micro-steps; the cap keeps the
    // superlinear return-from-infinity drift stable under the fixed grid
    double integrate_drift(double x, double dt) const;

    double noise_increment(double dt, RngStream& rng) const {
        if (cfg_.mode == SimMode::ExactStable)
            return stable_increment(model_.alpha(), stable_c1_, stable_c2_,
                                    cfg_.eps, dt, rng);
        return decomp_.sample_small_increment(dt, rng);
    }

    PolynomialPotential potential_;
    Landscape landscape_;
    LevyModel model_;
    SimConfig cfg_;
    Decomposition decomp_;
    double delta_ = 0.0;
    double stable_c1_ = 0.0, stable_c2_ = 0.0;
};

}  // namespace levylab
