#include "levylab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "levylab/limitchain.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace levylab {

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

void write_text(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
}

const char* kind_name(StopKind k) {
    switch (k) {
        case StopKind::Sigma: return "sigma";
        case StopKind::BigT: return "T";
        case StopKind::Tau: return "tau";
        case StopKind::SaddleS: return "S";
        case StopKind::None: return "none";
    }
    return "none";
}

std::string records_jsonl(const std::vector<ExitRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        ordered_json j;
        j["well"] = r.start_well;
        j["kind"] = kind_name(r.kind);
        j["t"] = r.stop_time;
        if (r.landing_well)
            j["landing"] = *r.landing_well;
        else
            j["landing"] = nullptr;
        j["jumps"] = r.n_big_jumps;
        j["overflow"] = r.overflowed;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string records_csv(const std::vector<ExitRecord>& records) {
    std::string out = "well,kind,t,landing,jumps,overflow\n";
    for (const auto& r : records) {
        out += std::to_string(r.start_well);
        out += ',';
        out += kind_name(r.kind);
        out += ',';
        out += num17(r.stop_time);
        out += ',';
        out += r.landing_well ? std::to_string(*r.landing_well) : "";
        out += ',';
        out += std::to_string(r.n_big_jumps);
        out += ',';
        out += r.overflowed ? "true" : "false";
        out += '\n';
    }
    return out;
}

ordered_json landscape_json(const Landscape& l) {
    ordered_json j;
    j["minima"] = l.minima;
    j["saddles"] = l.saddles;
    j["curvature_min"] = l.curvature_min;
    j["curvature_saddle"] = l.curvature_saddle;
    j["value_min"] = l.value_min;
    j["value_saddle"] = l.value_saddle;
    j["delta0"] = l.delta0();
    return j;
}

ordered_json matrix_json(const std::vector<double>& q, int n) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < n; ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < n; ++j) row.push_back(q[i * n + j]);
        rows.push_back(row);
    }
    return rows;
}

ordered_json ks_json(const KsResult& ks, double level) {
    ordered_json j;
    j["test"] = "ks_exponential";
    j["statistic"] = ks.statistic;
    j["p_value"] = ks.p_value;
    j["n"] = ks.n;
    j["pass"] = ks.p_value >= level;
    return j;
}

struct Context {
    ExperimentConfig cfg;
    PolynomialPotential potential;
    Landscape landscape;
    LevyModel model;
    int workers = 1;
    fs::path out;
};

double resolve_horizon(const ExperimentConfig& cfg, double lambda) {
    if (cfg.horizon > 0.0) return cfg.horizon;
    if (!(lambda > 0.0))
        throw ConfigError(
            "horizon = auto needs a positive exit rate; set horizon");
    return 50.0 / lambda;
}

// traced variants reproduce the batch rule with a sampling observer; rules
// consume no randomness, so the trajectory matches the batch slot exactly
std::string trace_csv(const PathSimulator& sim, int well, bool tau_rule,
                      std::uint64_t seed, std::uint64_t stream, long stride) {
    RngStream rng(seed, stream);
    std::string out = "t,x\n";
    long counter = 0;
    auto observe = [&](double t, double x) {
        if (counter++ % stride == 0) {
            out += num17(t);
            out += ',';
            out += num17(x);
            out += '\n';
        }
    };
    const auto& land = sim.landscape();
    const double x0 = land.minima[well - 1];
    if (tau_rule) {
        auto rule = [&](double t, double x) {
            observe(t, x);
            for (int k = 1; k <= land.wells(); ++k)
                if (k != well && std::abs(x - land.minima[k - 1]) <= sim.delta())
                    return true;
            return false;
        };
        sim.simulate_until(x0, rule, rng, StopKind::Tau);
    } else {
        auto rule = [&](double t, double x) {
            observe(t, x);
            return !sim.in_sigma_interval(well, x);
        };
        sim.simulate_until(x0, rule, rng, StopKind::Sigma);
    }
    return out;
}

// ---- analyze ----------------------------------------------------------

bool run_analyze(Context& ctx, ordered_json& rep) {
    const auto& cfg = ctx.cfg;
    const double kappa = ctx.model.tails.kappa();
    const GeneratorMatrix gen =
        compute_generator(ctx.landscape, cfg.r, kappa);

    rep["landscape"] = landscape_json(ctx.landscape);
    ordered_json gj;
    gj["n"] = gen.n;
    gj["r"] = cfg.r;
    gj["kappa"] = kappa;
    gj["q"] = matrix_json(gen.q, gen.n);
    rep["generator"] = gj;

    std::string rates_csv = "eps,well,lambda,time_scale\n";
    ordered_json sweeps = ordered_json::array();
    for (double eps : cfg.eps_sweep) {
        ordered_json e;
        e["eps"] = eps;
        ordered_json lam = ordered_json::array();
        for (int w = 1; w <= ctx.landscape.wells(); ++w)
            lam.push_back(exit_rate(ctx.landscape, ctx.model, w, eps));
        e["lambda"] = lam;
        const bool have_tails = !ctx.model.tails.trivial();
        double scale = 0.0;
        if (have_tails) {
            scale = time_scale(ctx.model, eps);
            e["time_scale"] = scale;
            if (ctx.model.inner == InnerProfile::Stable) {
                const double alpha = ctx.model.alpha();
                const double factor = ctx.model.tail_total(1.0 / eps) * alpha /
                                      std::pow(eps, alpha);
                e["section2_factor"] = factor;
                GeneratorMatrix view = gen;
                for (auto& v : view.q) v *= factor;
                e["section2_generator"] = matrix_json(view.q, view.n);
            }
        }
        for (int w = 1; w <= ctx.landscape.wells(); ++w) {
            rates_csv += num17(eps) + "," + std::to_string(w) + "," +
                         num17(lam[w - 1].get<double>()) + "," +
                         (have_tails ? num17(scale) : std::string("")) + "\n";
        }
        sweeps.push_back(e);
    }
    rep["sweep"] = sweeps;

    std::string land_csv = "type,index,position,curvature,value\n";
    for (int i = 0; i < ctx.landscape.wells(); ++i)
        land_csv += "minimum," + std::to_string(i + 1) + "," +
                    num17(ctx.landscape.minima[i]) + "," +
                    num17(ctx.landscape.curvature_min[i]) + "," +
                    num17(ctx.landscape.value_min[i]) + "\n";
    for (std::size_t i = 0; i < ctx.landscape.saddles.size(); ++i)
        land_csv += "saddle," + std::to_string(i + 1) + "," +
                    num17(ctx.landscape.saddles[i]) + "," +
                    num17(ctx.landscape.curvature_saddle[i]) + "," +
                    num17(ctx.landscape.value_saddle[i]) + "\n";
    write_text(ctx.out / "tables" / "landscape.csv", land_csv);

    std::string gen_csv;
    for (int i = 0; i < gen.n; ++i) {
        for (int j = 0; j < gen.n; ++j) {
            gen_csv += num17(gen(i, j));
            gen_csv += (j + 1 < gen.n) ? ',' : '\n';
        }
    }
    write_text(ctx.out / "tables" / "generator.csv", gen_csv);
    write_text(ctx.out / "tables" / "rates.csv", rates_csv);
    return true;
}

// ---- exit law ---------------------------------------------------------

bool run_exitlaw(Context& ctx, ordered_json& rep) {
    const auto& cfg = ctx.cfg;
    const int w = cfg.well;
    const GeneratorMatrix gen =
        compute_generator(ctx.landscape, cfg.r, ctx.model.tails.kappa());
    bool pass = true;
    ordered_json sweeps = ordered_json::array();
    std::string ks_csv = "eps,n,censored,lambda,mean,rate_mean,ks_stat,ks_p\n";
    std::string split_csv = "eps,destination,fraction,target,z\n";

    for (std::size_t k = 0; k < cfg.eps_sweep.size(); ++k) {
        const double eps = cfg.eps_sweep[k];
        const double lambda = exit_rate(ctx.landscape, ctx.model, w, eps);
        SimConfig sc = cfg.sim_config(eps);
        sc.horizon = resolve_horizon(cfg, lambda);
        PathSimulator sim(ctx.potential, ctx.landscape, ctx.model, sc);

        BatchOptions opt{cfg.n_paths, ctx.workers, cfg.seed,
                         static_cast<std::uint64_t>(k) << 32};
        const auto records = collect_sigma_records(sim, w, opt);
        if (cfg.dump_records) {
            write_text(ctx.out / ("records_" + std::to_string(k) + ".jsonl"),
                       records_jsonl(records));
            write_text(ctx.out / "tables" /
                           ("records_" + std::to_string(k) + ".csv"),
                       records_csv(records));
        }
        if (cfg.trace_path >= 0 && cfg.trace_path < cfg.n_paths)
            write_text(ctx.out / "plotdata" /
                           ("trace_" + std::to_string(k) + ".csv"),
                       trace_csv(sim, w, false, cfg.seed,
                                 opt.stream_base +
                                     static_cast<std::uint64_t>(cfg.trace_path),
                                 cfg.trace_stride));

        const ExitSample sample = to_exit_sample(records, w, eps, lambda);
        const KsResult ks = ks_exponential(sample);
        const SplitResult split = exit_split_test(sample, gen);
        const double mean = mean_of(sample.times);

        ordered_json e;
        e["eps"] = eps;
        e["n"] = sample.n();
        e["censored"] = sample.censored;
        e["lambda"] = lambda;
        e["mean_exit"] = mean;
        e["rate_mean_product"] = lambda * mean;
        e["ks"] = ks_json(ks, 0.01);
        ordered_json sj;
        sj["test"] = "exit_split";
        sj["destinations"] = split.destinations;
        sj["fractions"] = split.fractions;
        sj["targets"] = split.targets;
        sj["z"] = split.z;
        sj["max_abs_z"] = split.max_abs_z;
        sj["n"] = split.n_resolved;
        sj["pass"] = split.pass;
        e["split"] = sj;
        sweeps.push_back(e);

        pass = pass && ks.p_value >= 0.01 && split.pass;
        ks_csv += num17(eps) + "," + std::to_string(sample.n()) + "," +
                  std::to_string(sample.censored) + "," + num17(lambda) + "," +
                  num17(mean) + "," + num17(lambda * mean) + "," +
                  num17(ks.statistic) + "," + num17(ks.p_value) + "\n";
        for (std::size_t d = 0; d < split.destinations.size(); ++d)
            split_csv += num17(eps) + "," +
                         std::to_string(split.destinations[d]) + "," +
                         num17(split.fractions[d]) + "," +
                         num17(split.targets[d]) + "," + num17(split.z[d]) +
                         "\n";

        // empirical CDF of the rescaled exit times against Exp(1)
        std::vector<double> u(sample.times);
        for (double& t : u) t *= lambda;
        std::sort(u.begin(), u.end());
        std::string ecdf = "# u  ecdf  exp1\n";
        for (std::size_t i = 0; i < u.size(); ++i)
            ecdf += num17(u[i]) + " " +
                    num17(static_cast<double>(i + 1) / u.size()) + " " +
                    num17(1.0 - std::exp(-u[i])) + "\n";
        write_text(ctx.out / "plotdata" / ("ecdf_" + std::to_string(k) + ".dat"),
                   ecdf);
    }
    rep["sweep"] = sweeps;
    write_text(ctx.out / "tables" / "ks.csv", ks_csv);
    write_text(ctx.out / "tables" / "splits.csv", split_csv);
    return pass;
}

// ---- transitions ------------------------------------------------------

bool run_transitions(Context& ctx, ordered_json& rep) {
    const auto& cfg = ctx.cfg;
    const int n = ctx.landscape.wells();
    const GeneratorMatrix gen =
        compute_generator(ctx.landscape, cfg.r, ctx.model.tails.kappa());

    std::vector<int> wells;
    if (cfg.well == 0)
        for (int i = 1; i <= n; ++i) wells.push_back(i);
    else
        wells.push_back(cfg.well);

    bool pass = true;
    ordered_json sweeps = ordered_json::array();
    std::string tau_csv = "eps,well,n,censored,lambda,mean,rate_mean\n";
    std::string qhat_csv = "eps,i,j,q,qhat,se\n";

    for (std::size_t k = 0; k < cfg.eps_sweep.size(); ++k) {
        const double eps = cfg.eps_sweep[k];
        ordered_json e;
        e["eps"] = eps;
        std::vector<ExitSample> usable;
        ordered_json per_well = ordered_json::array();
        std::vector<std::vector<long>> counts(
            static_cast<std::size_t>(n) + 1, std::vector<long>(n + 1, 0));

        for (int w : wells) {
            const double lambda = exit_rate(ctx.landscape, ctx.model, w, eps);
            SimConfig sc = cfg.sim_config(eps);
            sc.horizon = cfg.horizon > 0.0 ? cfg.horizon
                                           : resolve_horizon(cfg, lambda);
            PathSimulator sim(ctx.potential, ctx.landscape, ctx.model, sc);
            BatchOptions opt{cfg.n_paths, ctx.workers, cfg.seed,
                             (static_cast<std::uint64_t>(k) << 40) |
                                 (static_cast<std::uint64_t>(w) << 32)};
            const auto records = collect_tau_records(sim, w, opt);
            if (cfg.dump_records)
                write_text(ctx.out / ("records_" + std::to_string(k) + "_w" +
                                      std::to_string(w) + ".jsonl"),
                           records_jsonl(records));
            if (cfg.trace_path >= 0 && cfg.trace_path < cfg.n_paths)
                write_text(
                    ctx.out / "plotdata" /
                        ("trace_" + std::to_string(k) + "_w" +
                         std::to_string(w) + ".csv"),
                    trace_csv(sim, w, true, cfg.seed,
                              opt.stream_base +
                                  static_cast<std::uint64_t>(cfg.trace_path),
                              cfg.trace_stride));

            const ExitSample sample = to_exit_sample(records, w, eps, lambda);
            for (const auto& r : records)
                if (r.landing_well)
                    ++counts[static_cast<std::size_t>(w)][*r.landing_well];
            const double mean = mean_of(sample.times);
            ordered_json wj;
            wj["well"] = w;
            wj["lambda"] = lambda;
            wj["n"] = sample.n();
            wj["censored"] = sample.censored;
            wj["mean_tau"] = mean;
            wj["rate_mean_product"] = lambda * mean;
            per_well.push_back(wj);
            tau_csv += num17(eps) + "," + std::to_string(w) + "," +
                       std::to_string(sample.n()) + "," +
                       std::to_string(sample.censored) + "," + num17(lambda) +
                       "," + num17(mean) + "," + num17(lambda * mean) + "\n";
            if (lambda > 0.0 && sample.n() >= 100 &&
                sample.censoring_fraction() < 0.01)
                usable.push_back(sample);
        }
        e["wells"] = per_well;
        ordered_json cj = ordered_json::array();
        for (int i = 1; i <= n; ++i) {
            ordered_json row = ordered_json::array();
            for (int j = 1; j <= n; ++j) row.push_back(counts[i][j]);
            cj.push_back(row);
        }
        e["landing_counts"] = cj;

        if (!usable.empty()) {
            const GeneratorEstimate est =
                empirical_generator(usable, n, eps, ctx.model);
            ordered_json ej;
            ej["q_hat"] = matrix_json(est.q_hat.q, n);
            ej["se"] = matrix_json(est.se, n);
            ej["row_present"] = est.row_present;
            bool rows_ok = true;
            for (int i = 0; i < n; ++i) {
                if (!est.row_present[i]) continue;
                for (int j = 0; j < n; ++j) {
                    const double diff =
                        std::abs(est.q_hat(i, j) - gen(i, j));
                    const double se = est.se[i * n + j];
                    if (se > 0.0) {
                        if (diff > 3.0 * se) rows_ok = false;
                    } else if (diff > 1e-12) {
                        rows_ok = false;
                    }
                    qhat_csv += num17(eps) + "," + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + "," +
                                num17(gen(i, j)) + "," +
                                num17(est.q_hat(i, j)) + "," + num17(se) +
                                "\n";
                }
            }
            ej["pass"] = rows_ok;
            e["empirical_generator"] = ej;
            pass = pass && rows_ok;
        }
        sweeps.push_back(e);
    }
    rep["generator"] = matrix_json(gen.q, gen.n);
    rep["sweep"] = sweeps;
    write_text(ctx.out / "tables" / "tau.csv", tau_csv);
    write_text(ctx.out / "tables" / "qhat.csv", qhat_csv);
    return pass;
}

// ---- metastability ----------------------------------------------------

bool run_meta(Context& ctx, ordered_json& rep) {
    const auto& cfg = ctx.cfg;
    const int n = ctx.landscape.wells();
    const int i0 = cfg.well;
    const GeneratorMatrix gen =
        compute_generator(ctx.landscape, cfg.r, ctx.model.tails.kappa());
    std::vector<double> times = cfg.snapshot_times;
    if (!std::is_sorted(times.begin(), times.end()))
        throw ConfigError("snapshot times must be ascending");

    bool pass = true;
    ordered_json sweeps = ordered_json::array();
    std::string fdd_csv = "eps,t,chi_square,p_value,unclassified_fraction\n";
    std::string occ_dat = "# eps t well fraction expected\n";

    for (std::size_t k = 0; k < cfg.eps_sweep.size(); ++k) {
        const double eps = cfg.eps_sweep[k];
        const double scale = time_scale(ctx.model, eps);
        SimConfig sc = cfg.sim_config(eps);
        sc.horizon = times.back() * scale + 1.0;
        PathSimulator sim(ctx.potential, ctx.landscape, ctx.model, sc);
        std::vector<double> model_times;
        for (double t : times) model_times.push_back(t * scale);

        BatchOptions opt{cfg.n_paths, ctx.workers, cfg.seed,
                         static_cast<std::uint64_t>(k) << 32};
        const auto rows =
            collect_positions(sim, ctx.landscape.minima[i0 - 1], model_times,
                              opt);
        const double delta = sim.delta();
        std::vector<std::vector<int>> cls(times.size());
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            cls[ti].reserve(rows.size());
            for (const auto& row : rows)
                cls[ti].push_back(
                    classify_snapshot(ctx.landscape, row[ti], delta));
        }

        ordered_json e;
        e["eps"] = eps;
        e["time_scale"] = scale;
        bool eps_pass = true;
        try {
            const FddResult fdd = fdd_test(times, cls, gen, i0);
            ordered_json marg = ordered_json::array();
            for (const auto& m : fdd.marginals) {
                ordered_json mj;
                mj["test"] = "fdd_chi_square";
                mj["t"] = m.t;
                mj["statistic"] = m.chi_square;
                mj["p_value"] = m.p_value;
                mj["n"] = cfg.n_paths;
                mj["counts"] = m.counts;
                mj["unclassified_fraction"] = m.unclassified_fraction;
                mj["pass"] = m.p_value >= 0.01;
                marg.push_back(mj);
                fdd_csv += num17(eps) + "," + num17(m.t) + "," +
                           num17(m.chi_square) + "," + num17(m.p_value) + "," +
                           num17(m.unclassified_fraction) + "\n";
                const auto p = chain_transition_matrix(gen, m.t);
                const long classified = cfg.n_paths - m.unclassified;
                for (int j = 0; j < n; ++j)
                    occ_dat +=
                        num17(eps) + " " + num17(m.t) + " " +
                        std::to_string(j + 1) + " " +
                        num17(classified > 0
                                  ? static_cast<double>(m.counts[j]) /
                                        classified
                                  : 0.0) +
                        " " + num17(p[(i0 - 1) * n + j]) + "\n";
            }
            e["marginals"] = marg;
            eps_pass = fdd.pass(0.01);
        } catch (const UnclassifiedExcess& ex) {
            e["error"] = ex.what();
            eps_pass = false;
        }

        // two-time joint table on the first and last snapshot
        if (times.size() >= 2) {
            const std::size_t a = 0, b = times.size() - 1;
            std::vector<long> joint(static_cast<std::size_t>(n) * n, 0);
            long both = 0;
            for (std::size_t p = 0; p < rows.size(); ++p) {
                const int ca = cls[a][p], cb = cls[b][p];
                if (ca >= 1 && cb >= 1) {
                    ++joint[(ca - 1) * n + (cb - 1)];
                    ++both;
                }
            }
            const auto p1 = chain_transition_matrix(gen, times[a]);
            const auto p2 = chain_transition_matrix(gen, times[b] - times[a]);
            double chi2 = 0.0;
            int used = 0;
            for (int ia = 0; ia < n; ++ia)
                for (int ib = 0; ib < n; ++ib) {
                    const double pr =
                        p1[(i0 - 1) * n + ia] * p2[ia * n + ib];
                    const double expected = both * pr;
                    if (expected < 1e-9) continue;
                    const double diff = joint[ia * n + ib] - expected;
                    chi2 += diff * diff / expected;
                    ++used;
                }
            ordered_json jj;
            jj["test"] = "fdd_two_time_joint";
            jj["t_pair"] = {times[a], times[b]};
            jj["counts"] = joint;
            jj["statistic"] = chi2;
            jj["p_value"] =
                used > 1 ? chi_square_p_value(chi2, used - 1) : 1.0;
            jj["n"] = both;
            e["two_time_joint"] = jj;
        }
        e["pass"] = eps_pass;
        pass = pass && eps_pass;
        sweeps.push_back(e);
    }
    rep["generator"] = matrix_json(gen.q, gen.n);
    rep["sweep"] = sweeps;
    write_text(ctx.out / "tables" / "fdd.csv", fdd_csv);
    write_text(ctx.out / "plotdata" / "occupation.dat", occ_dat);
    return pass;
}

// ---- short-time localization ------------------------------------------

bool run_shorttime(Context& ctx, ordered_json& rep) {
    const auto& cfg = ctx.cfg;
    if (!(cfg.delta_exp > 0.0 && cfg.delta_exp < cfg.r))
        throw ConfigError("shorttime requires delta_exp in (0, r)");
    const int w = cfg.well;
    std::vector<double> sweep = cfg.eps_sweep;
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (sweep[i] >= sweep[i - 1])
            throw ConfigError("shorttime eps sweep must be decreasing");

    ordered_json sweeps = ordered_json::array();
    std::string st_csv = "eps,t_model,n,outside_fraction\n";
    std::vector<double> fractions;
    for (std::size_t k = 0; k < sweep.size(); ++k) {
        const double eps = sweep[k];
        const double t_model =
            cfg.t_short / std::pow(eps, cfg.delta_exp);
        SimConfig sc = cfg.sim_config(eps);
        sc.horizon = t_model + 1.0;
        PathSimulator sim(ctx.potential, ctx.landscape, ctx.model, sc);
        BatchOptions opt{cfg.n_paths, ctx.workers, cfg.seed,
                         static_cast<std::uint64_t>(k) << 32};
        const auto rows = collect_positions(
            sim, ctx.landscape.minima[w - 1], {t_model}, opt);
        std::vector<double> xs;
        xs.reserve(rows.size());
        for (const auto& r : rows) xs.push_back(r[0]);
        const double frac =
            short_time_outside_fraction(xs, ctx.landscape, w, sim.delta());
        fractions.push_back(frac);
        ordered_json e;
        e["eps"] = eps;
        e["t_model"] = t_model;
        e["outside_fraction"] = frac;
        sweeps.push_back(e);
        st_csv += num17(eps) + "," + num17(t_model) + "," +
                  std::to_string(cfg.n_paths) + "," + num17(frac) + "\n";
    }
    // trend: fraction must not grow as eps decreases, binomial slack
    bool pass = true;
    for (std::size_t i = 1; i < fractions.size(); ++i) {
        const double p = fractions[i - 1];
        const double slack =
            2.0 * std::sqrt(std::max(p * (1.0 - p), 1e-12) /
                            static_cast<double>(cfg.n_paths));
        if (fractions[i] > p + slack) pass = false;
    }
    rep["sweep"] = sweeps;
    rep["pass_trend"] = pass;
    write_text(ctx.out / "tables" / "shorttime.csv", st_csv);
    return pass;
}

// ---- gaussian comparison ----------------------------------------------

bool run_gauss(Context& ctx, ordered_json& rep) {
    const auto& cfg = ctx.cfg;
    const GaussianComparison gc = gaussian_comparison(ctx.landscape);
    ordered_json sweeps = ordered_json::array();
    std::string csv = "eps,inv_eps2,n,mean_exit,log_mean\n";
    std::string dat = "# inv_eps2 log_mean\n";
    std::vector<double> xs, ys;

    for (std::size_t k = 0; k < cfg.eps_sweep.size(); ++k) {
        const double eps = cfg.eps_sweep[k];
        SimConfig sc = cfg.sim_config(eps);
        sc.horizon = cfg.horizon;  // validated explicit
        PathSimulator sim(ctx.potential, ctx.landscape, ctx.model, sc);
        BatchOptions opt{cfg.n_paths, ctx.workers, cfg.seed,
                         static_cast<std::uint64_t>(k) << 32};
        const auto records =
            collect_sigma_records(sim, gc.shallow_well, opt);
        const ExitSample sample =
            to_exit_sample(records, gc.shallow_well, eps, 0.0);
        const double mean = mean_of(sample.times);
        const double x = 1.0 / (eps * eps);
        const double y = std::log(mean);
        xs.push_back(x);
        ys.push_back(y);
        ordered_json e;
        e["eps"] = eps;
        e["n"] = sample.n();
        e["censored"] = sample.censored;
        e["mean_exit"] = mean;
        e["log_mean"] = y;
        sweeps.push_back(e);
        csv += num17(eps) + "," + num17(x) + "," +
               std::to_string(sample.n()) + "," + num17(mean) + "," +
               num17(y) + "\n";
        dat += num17(x) + " " + num17(y) + "\n";
    }
    // least-squares slope of log mean exit against 1/eps^2
    const double xm = mean_of(xs), ym = mean_of(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    const double slope = sxy / sxx;
    const bool pass = std::abs(slope - gc.barrier) <= 0.25 * gc.barrier;

    rep["barrier"] = gc.barrier;
    rep["deep_well"] = gc.deep_well;
    rep["shallow_well"] = gc.shallow_well;
    rep["slope"] = slope;
    rep["slope_relative_error"] = std::abs(slope - gc.barrier) / gc.barrier;
    rep["sweep"] = sweeps;
    write_text(ctx.out / "tables" / "kramers.csv", csv);
    write_text(ctx.out / "plotdata" / "kramers.dat", dat);
    return pass;
}

}  // namespace

int resolve_workers(int configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("LEVYLAB_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<ExitRecord> collect_sigma_records(const PathSimulator& sim,
                                              int well,
                                              const BatchOptions& opt) {
    return parallel_paths<ExitRecord>(
        opt.n_paths, opt.workers, [&](long i) {
            RngStream rng(opt.seed,
                          opt.stream_base + static_cast<std::uint64_t>(i));
            return sim.first_exit_sigma(well, rng);
        });
}

std::vector<ExitRecord> collect_tau_records(const PathSimulator& sim, int well,
                                            const BatchOptions& opt) {
    return parallel_paths<ExitRecord>(
        opt.n_paths, opt.workers, [&](long i) {
            RngStream rng(opt.seed,
                          opt.stream_base + static_cast<std::uint64_t>(i));
            return sim.transition_tau(well, rng);
        });
}

std::vector<PathSimulator::TripleTimes> collect_triples(
    const PathSimulator& sim, int well, const BatchOptions& opt) {
    return parallel_paths<PathSimulator::TripleTimes>(
        opt.n_paths, opt.workers, [&](long i) {
            RngStream rng(opt.seed,
                          opt.stream_base + static_cast<std::uint64_t>(i));
            return sim.sigma_t_tau(well, sim.landscape().minima[well - 1],
                                   rng);
        });
}

std::vector<ExitRecord> collect_saddle_records(const PathSimulator& sim,
                                               int saddle_j, double x0,
                                               const BatchOptions& opt) {
    return parallel_paths<ExitRecord>(
        opt.n_paths, opt.workers, [&](long i) {
            RngStream rng(opt.seed,
                          opt.stream_base + static_cast<std::uint64_t>(i));
            return sim.saddle_escape(saddle_j, x0, rng);
        });
}

std::vector<std::vector<double>> collect_positions(
    const PathSimulator& sim, double x0,
    const std::vector<double>& model_times, const BatchOptions& opt) {
    return parallel_paths<std::vector<double>>(
        opt.n_paths, opt.workers, [&](long i) {
            RngStream rng(opt.seed,
                          opt.stream_base + static_cast<std::uint64_t>(i));
            PathState s = sim.init_state(x0, rng);
            auto never = [](double, double) { return false; };
            std::vector<double> out;
            out.reserve(model_times.size());
            for (double t : model_times) {
                if (!s.overflowed) sim.advance(s, t, never, rng);
                out.push_back(s.x);
            }
            return out;
        });
}

std::vector<PathSimulator::TubeResult> collect_tubes(const PathSimulator& sim,
                                                     double x0, double t_max,
                                                     const BatchOptions& opt) {
    return parallel_paths<PathSimulator::TubeResult>(
        opt.n_paths, opt.workers, [&](long i) {
            RngStream rng(opt.seed,
                          opt.stream_base + static_cast<std::uint64_t>(i));
            return sim.tube_deviation(x0, t_max, rng);
        });
}

ExitSample to_exit_sample(const std::vector<ExitRecord>& records, int well,
                          double eps, double rate) {
    ExitSample s;
    s.well = well;
    s.eps = eps;
    s.rate_used = rate;
    for (const auto& r : records) {
        if (r.kind == StopKind::None || r.overflowed)
            ++s.censored;
        else
            s.add(r.stop_time, r.landing_well);
    }
    return s;
}

RunOutcome run_experiment(const ExperimentConfig& input,
                          const RunOverrides& overrides) {
    ExperimentConfig cfg = input;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.n_paths) cfg.n_paths = *overrides.n_paths;
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.workers) cfg.workers = *overrides.workers;
    if (overrides.kind) cfg.kind = *overrides.kind;

    {
        const auto violations = validate(cfg);
        if (!violations.empty())
            throw ConfigError("config invalid: " + violations.front());
    }

    Context ctx{cfg, cfg.build_potential(), Landscape{}, cfg.build_model(),
                resolve_workers(cfg.workers), fs::path(cfg.out_dir)};
    ctx.landscape = analyze(ctx.potential, cfg.search_radius);
    fs::create_directories(ctx.out / "tables");
    fs::create_directories(ctx.out / "plotdata");

    ordered_json rep;
    rep["kind"] = to_string(cfg.kind);
    rep["seed"] = cfg.seed;
    rep["n_paths"] = cfg.n_paths;
    rep["eps_sweep"] = cfg.eps_sweep;
    ordered_json pj;
    pj["coefficients"] = cfg.coefficients;
    rep["potential"] = pj;
    ordered_json lj;
    lj["d"] = cfg.d;
    lj["mu"] = cfg.mu;
    lj["r"] = cfg.r;
    lj["c_plus"] = cfg.c_plus;
    lj["c_minus"] = cfg.c_minus;
    rep["levy"] = lj;

    bool pass = true;
    switch (cfg.kind) {
        case ExperimentKind::Analyze:
            pass = run_analyze(ctx, rep);
            break;
        case ExperimentKind::ExitLaw:
            pass = run_exitlaw(ctx, rep);
            break;
        case ExperimentKind::Transitions:
            pass = run_transitions(ctx, rep);
            break;
        case ExperimentKind::Metastability:
            pass = run_meta(ctx, rep);
            break;
        case ExperimentKind::ShortTime:
            pass = run_shorttime(ctx, rep);
            break;
        case ExperimentKind::GaussianCompare:
            pass = run_gauss(ctx, rep);
            break;
    }
    rep["pass"] = pass;

    RunOutcome outcome;
    outcome.stats_pass = pass;
    outcome.report_json = rep.dump(2) + "\n";
    outcome.report_path = (ctx.out / "report.json").string();
    write_text(ctx.out / "report.json", outcome.report_json);
    return outcome;
}

}  // namespace levylab
