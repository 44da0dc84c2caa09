#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "levylab/config.hpp"
#include "levylab/experiment.hpp"
#include "levylab/levy.hpp"
#include "levylab/limitchain.hpp"
#include "levylab/potential.hpp"
#include "levylab/rng.hpp"
#include "levylab/simulate.hpp"
#include "levylab/stats.hpp"

namespace py = pybind11;
using namespace levylab;

namespace {

py::dict record_dict(const ExitRecord& r) {
    py::dict d;
    d["well"] = r.start_well;
    switch (r.kind) {
        case StopKind::Sigma: d["kind"] = "sigma"; break;
        case StopKind::BigT: d["kind"] = "T"; break;
        case StopKind::Tau: d["kind"] = "tau"; break;
        case StopKind::SaddleS: d["kind"] = "S"; break;
        case StopKind::None: d["kind"] = "none"; break;
    }
    d["t"] = r.stop_time;
    d["landing"] = r.landing_well ? py::cast(*r.landing_well)
                                  : py::object(py::none());
    d["jumps"] = r.n_big_jumps;
    d["overflow"] = r.overflowed;
    d["censored"] = r.horizon_exceeded;
    return d;
}

std::vector<std::vector<double>> matrix_rows(const std::vector<double>& q,
                                             int n) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rows[i][j] = q[i * n + j];
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() =
        "Monte Carlo laboratory for one-dimensional gradient dynamics driven "
        "by small heavy-tailed Levy noise";

    py::register_exception<Error>(m, "LevylabError");

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
             py::arg("stream"))
        .def("uniform", &RngStream::uniform)
        .def("normal", &RngStream::normal)
        .def("exponential", &RngStream::exponential, py::arg("rate"));

    py::class_<PolynomialPotential>(m, "PolynomialPotential")
        .def(py::init<std::vector<double>>(), py::arg("coefficients"))
        .def("value", &PolynomialPotential::value)
        .def("derivative", &PolynomialPotential::derivative)
        .def("drift", &PolynomialPotential::drift)
        .def_property_readonly("coefficients",
                               &PolynomialPotential::coefficients);

    py::class_<Landscape>(m, "Landscape")
        .def_readonly("minima", &Landscape::minima)
        .def_readonly("saddles", &Landscape::saddles)
        .def_readonly("curvature_min", &Landscape::curvature_min)
        .def_readonly("curvature_saddle", &Landscape::curvature_saddle)
        .def_readonly("value_min", &Landscape::value_min)
        .def_readonly("value_saddle", &Landscape::value_saddle)
        .def("wells", &Landscape::wells)
        .def("delta0", &Landscape::delta0)
        .def_static("from_extrema", &Landscape::from_extrema,
                    py::arg("minima"), py::arg("saddles"),
                    py::arg("curvature_min") = std::vector<double>{},
                    py::arg("curvature_saddle") = std::vector<double>{},
                    py::arg("value_min") = std::vector<double>{},
                    py::arg("value_saddle") = std::vector<double>{});

    m.def("analyze", &analyze, py::arg("potential"), py::arg("search_radius"),
          py::arg("tol") = 1e-12);
    m.def("flow", &flow, py::arg("potential"), py::arg("x0"), py::arg("t"),
          py::arg("h") = 1e-3, py::arg("overflow_bound") = 1e6);
    m.def(
        "basin_of",
        [](const Landscape& l, double x, double tol) {
            const auto loc = basin_of(l, x, tol);
            py::dict d;
            d["at_saddle"] = loc.at_saddle;
            if (loc.at_saddle)
                d["saddle"] = loc.saddle_index;
            else
                d["well"] = loc.well;
            return d;
        },
        py::arg("landscape"), py::arg("x"), py::arg("saddle_tol") = 1e-9);
    m.def("relaxation_time", &relaxation_time, py::arg("potential"),
          py::arg("landscape"), py::arg("eps"), py::arg("gamma"));

    py::class_<LevyModel>(m, "LevyModel")
        .def_static("stable", &LevyModel::stable, py::arg("alpha"),
                    py::arg("c1"), py::arg("c2"), py::arg("d") = 0.0,
                    py::arg("mu") = 0.0)
        .def_static("brownian", &LevyModel::brownian, py::arg("d"),
                    py::arg("mu") = 0.0)
        .def("tail_plus", &LevyModel::tail_plus)
        .def("tail_minus", &LevyModel::tail_minus)
        .def("tail_total", &LevyModel::tail_total)
        .def_property_readonly(
            "kappa", [](const LevyModel& m_) { return m_.tails.kappa(); })
        .def_property_readonly(
            "r", [](const LevyModel& m_) { return m_.tails.r; });

    py::class_<Decomposition>(m, "Decomposition")
        .def(py::init<const LevyModel&, double, double>(), py::arg("model"),
             py::arg("eps"), py::arg("rho"))
        .def_property_readonly("beta", &Decomposition::beta)
        .def_property_readonly("threshold", &Decomposition::threshold)
        .def_property_readonly("small_var", &Decomposition::small_var)
        .def_property_readonly("small_mean", &Decomposition::small_mean)
        .def("sample_interjump", &Decomposition::sample_interjump)
        .def("sample_big_jump", &Decomposition::sample_big_jump)
        .def("sample_small_increment", &Decomposition::sample_small_increment,
             py::arg("h"), py::arg("rng"));

    m.def("big_jump_rate", &big_jump_rate, py::arg("model"), py::arg("eps"),
          py::arg("rho"));
    m.def("stable_increment", &stable_increment, py::arg("alpha"),
          py::arg("c1"), py::arg("c2"), py::arg("eps"), py::arg("h"),
          py::arg("rng"));

    py::class_<GeneratorMatrix>(m, "GeneratorMatrix")
        .def_readonly("n", &GeneratorMatrix::n)
        .def("rate", &GeneratorMatrix::rate, py::arg("i"))
        .def("rows",
             [](const GeneratorMatrix& g) { return matrix_rows(g.q, g.n); });

    m.def("compute_generator", &compute_generator, py::arg("landscape"),
          py::arg("r"), py::arg("kappa"));
    m.def("exit_rate", &exit_rate, py::arg("landscape"), py::arg("model"),
          py::arg("well"), py::arg("eps"));
    m.def("time_scale", &time_scale, py::arg("model"), py::arg("eps"));
    m.def(
        "chain_transition_matrix",
        [](const GeneratorMatrix& g, double t) {
            return matrix_rows(chain_transition_matrix(g, t), g.n);
        },
        py::arg("generator"), py::arg("t"));
    m.def("simulate_chain", &simulate_chain, py::arg("generator"),
          py::arg("i0"), py::arg("t_grid"), py::arg("rng"));
    m.def(
        "gaussian_comparison",
        [](const Landscape& l, double tol) {
            const auto gc = gaussian_comparison(l, tol);
            py::dict d;
            d["generator"] = std::vector<std::vector<double>>{
                {gc.generator[0], gc.generator[1]},
                {gc.generator[2], gc.generator[3]}};
            d["barrier"] = gc.barrier;
            d["deep_well"] = gc.deep_well;
            d["shallow_well"] = gc.shallow_well;
            return d;
        },
        py::arg("landscape"), py::arg("tol") = 1e-9);

    py::enum_<SimMode>(m, "SimMode")
        .value("Decomposed", SimMode::Decomposed)
        .value("ExactStable", SimMode::ExactStable);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("eps", &SimConfig::eps)
        .def_readwrite("rho", &SimConfig::rho)
        .def_readwrite("gamma", &SimConfig::gamma)
        .def_readwrite("h", &SimConfig::h)
        .def_readwrite("horizon", &SimConfig::horizon)
        .def_readwrite("overflow", &SimConfig::overflow)
        .def_readwrite("delta", &SimConfig::delta)
        .def_readwrite("edge_scale", &SimConfig::edge_scale)
        .def_readwrite("mode", &SimConfig::mode);

    py::class_<PathSimulator>(m, "PathSimulator")
        .def(py::init<PolynomialPotential, Landscape, LevyModel, SimConfig>(),
             py::arg("potential"), py::arg("landscape"), py::arg("model"),
             py::arg("config"))
        .def_property_readonly("delta", &PathSimulator::delta)
        .def(
            "first_exit_sigma",
            [](const PathSimulator& s, int well, RngStream& rng) {
                return record_dict(s.first_exit_sigma(well, rng));
            },
            py::arg("well"), py::arg("rng"))
        .def(
            "transition_tau",
            [](const PathSimulator& s, int well, RngStream& rng) {
                return record_dict(s.transition_tau(well, rng));
            },
            py::arg("well"), py::arg("rng"))
        .def(
            "saddle_escape",
            [](const PathSimulator& s, int j, double x0, RngStream& rng) {
                return record_dict(s.saddle_escape(j, x0, rng));
            },
            py::arg("saddle"), py::arg("x0"), py::arg("rng"))
        .def(
            "sigma_t_tau",
            [](const PathSimulator& s, int well, double x0, RngStream& rng) {
                const auto t = s.sigma_t_tau(well, x0, rng);
                py::dict d;
                d["sigma"] = t.sigma ? py::cast(*t.sigma)
                                     : py::object(py::none());
                d["T"] = t.big_t ? py::cast(*t.big_t)
                                 : py::object(py::none());
                d["tau"] = t.tau ? py::cast(*t.tau) : py::object(py::none());
                d["landing"] = t.landing ? py::cast(*t.landing)
                                         : py::object(py::none());
                d["jumps"] = t.n_big_jumps;
                return d;
            },
            py::arg("well"), py::arg("x0"), py::arg("rng"))
        .def(
            "tube_deviation",
            [](const PathSimulator& s, double x0, double t_max,
               RngStream& rng) {
                const auto t = s.tube_deviation(x0, t_max, rng);
                py::dict d;
                d["sup_deviation"] = t.sup_deviation;
                d["elapsed"] = t.elapsed;
                d["jump_clock_truncated"] = t.jump_clock_truncated;
                return d;
            },
            py::arg("x0"), py::arg("t_max"), py::arg("rng"))
        .def(
            "step_interval",
            [](const PathSimulator& s, double x0, double t0, double duration,
               RngStream& rng) {
                const auto r = s.step_interval(x0, t0, duration, rng);
                py::dict d;
                d["x"] = r.x;
                d["overflowed"] = r.overflowed;
                return d;
            },
            py::arg("x0"), py::arg("t0"), py::arg("duration"), py::arg("rng"));

    py::class_<ExitSample>(m, "ExitSample")
        .def(py::init([](int well, double eps, double rate) {
                 ExitSample s;
                 s.well = well;
                 s.eps = eps;
                 s.rate_used = rate;
                 return s;
             }),
             py::arg("well"), py::arg("eps"), py::arg("rate"))
        .def("add", &ExitSample::add, py::arg("time"), py::arg("landing"))
        .def("merge", &ExitSample::merge)
        .def_readwrite("censored", &ExitSample::censored)
        .def_readonly("times", &ExitSample::times)
        .def_property_readonly("n", &ExitSample::n);

    m.def(
        "ks_exponential",
        [](const ExitSample& s) {
            const auto r = ks_exponential(s);
            py::dict d;
            d["statistic"] = r.statistic;
            d["p_value"] = r.p_value;
            d["n"] = r.n;
            return d;
        },
        py::arg("sample"));
    m.def(
        "exit_split_test",
        [](const ExitSample& s, const GeneratorMatrix& g) {
            const auto r = exit_split_test(s, g);
            py::dict d;
            d["destinations"] = r.destinations;
            d["fractions"] = r.fractions;
            d["targets"] = r.targets;
            d["z"] = r.z;
            d["max_abs_z"] = r.max_abs_z;
            d["pass"] = r.pass;
            return d;
        },
        py::arg("sample"), py::arg("generator"));

    m.def(
        "run_experiment",
        [](const std::string& config_path, std::optional<std::string> out_dir,
           std::optional<std::uint64_t> seed, std::optional<long> paths,
           std::optional<int> workers, std::optional<std::string> kind) {
            const auto cfg = parse_config_file(config_path);
            RunOverrides ov;
            ov.out_dir = std::move(out_dir);
            ov.seed = seed;
            ov.n_paths = paths;
            ov.workers = workers;
            if (kind) ov.kind = experiment_kind_from_string(*kind);
            const auto outcome = run_experiment(cfg, ov);
            py::dict d;
            d["pass"] = outcome.stats_pass;
            d["report_path"] = outcome.report_path;
            d["report_json"] = outcome.report_json;
            return d;
        },
        py::arg("config_path"), py::arg("out_dir") = std::nullopt,
        py::arg("seed") = std::nullopt, py::arg("paths") = std::nullopt,
        py::arg("workers") = std::nullopt, py::arg("kind") = std::nullopt);
    m.def("validate_config", [](const std::string& config_path) {
        return validate(parse_config_file(config_path));
    });
}
