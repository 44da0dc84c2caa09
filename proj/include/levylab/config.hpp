#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levylab/errors.hpp"
#include "levylab/levy.hpp"
#include "levylab/potential.hpp"
#include "levylab/simulate.hpp"

namespace levylab {

enum class ExperimentKind {
    Analyze,
    ExitLaw,
    Transitions,
    Metastability,
    ShortTime,
    GaussianCompare,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Declarative experiment description, parsed from the sectioned key-value
// config format ([potential] / [levy] / [run] blocks).
struct ExperimentConfig {
    // [potential]
    std::vector<double> coefficients;
    double search_radius = 10.0;

    // [levy]
    double d = 0.0;
    double mu = 0.0;
    double r = 1.0;
    double c_plus = 0.0;
    double c_minus = 0.0;
    SlowlyVarying sv = SlowlyVarying::Constant;
    double log_power = 0.0;
    InnerProfile inner = InnerProfile::TruncatedEmpty;

    // [run]
    ExperimentKind kind = ExperimentKind::Analyze;
    std::vector<double> eps_sweep{0.1};
    double rho = 0.7;
    double gamma = 0.05;
    double delta = 0.0;  // 0 -> delta0/4
    double h = 1e-3;
    double edge_scale = 0.25;
    double overflow = 1e6;
    double horizon = 0.0;  // 0 -> 50 / lambda^i(eps)
    long n_paths = 1000;
    std::uint64_t seed = 1;
    int well = 1;  // 0 -> all wells (transitions)
    SimMode mode = SimMode::Decomposed;
    std::vector<double> snapshot_times{0.5, 1.0, 2.0};  // rescaled time
    double delta_exp = 0.5;  // shorttime exponent, must lie in (0, r)
    double t_short = 1.0;
    std::string out_dir = "out";
    bool dump_records = true;
    long trace_path = -1;
    long trace_stride = 100;
    int workers = 0;  // 0 -> env LEVYLAB_WORKERS, then hardware

    LevyModel build_model() const;
    PolynomialPotential build_potential() const;
    SimConfig sim_config(double eps) const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// every violated constraint, one line each; empty means the configuration is
// runnable for every eps in the sweep
std::vector<std::string> validate(const ExperimentConfig& cfg);

}  // namespace levylab
