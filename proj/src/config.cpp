#include "levylab/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace levylab {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Analyze: return "analyze";
        case ExperimentKind::ExitLaw: return "exitlaw";
        case ExperimentKind::Transitions: return "transitions";
        case ExperimentKind::Metastability: return "meta";
        case ExperimentKind::ShortTime: return "shorttime";
        case ExperimentKind::GaussianCompare: return "gauss";
    }
    return "analyze";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "analyze") return ExperimentKind::Analyze;
    if (s == "exitlaw") return ExperimentKind::ExitLaw;
    if (s == "transitions") return ExperimentKind::Transitions;
    if (s == "meta") return ExperimentKind::Metastability;
    if (s == "shorttime") return ExperimentKind::ShortTime;
    if (s == "gauss") return ExperimentKind::GaussianCompare;
    throw ConfigError("unknown experiment kind: " + s);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using Section = std::map<std::string, std::string>;

std::map<std::string, Section> parse_sections(const std::string& text) {
    std::map<std::string, Section> out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            out[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": key outside any [section]");
        out[section][key] = value;
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse number '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse integer '" + v +
                          "'");
    }
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(to_double(key, tok));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected boolean, got '" + v + "'");
}

struct SectionReader {
    const std::string name;
    const Section& kv;
    std::set<std::string> seen;

    bool has(const std::string& key) {
        const bool found = kv.count(key) > 0;
        if (found) seen.insert(key);
        return found;
    }
    std::string raw(const std::string& key) { return kv.at(key); }
    double num(const std::string& key, double dflt) {
        return has(key) ? to_double(key, kv.at(key)) : dflt;
    }
    long integer(const std::string& key, long dflt) {
        return has(key) ? to_long(key, kv.at(key)) : dflt;
    }
    bool flag(const std::string& key, bool dflt) {
        return has(key) ? to_bool(key, kv.at(key)) : dflt;
    }
    std::vector<double> list(const std::string& key,
                             std::vector<double> dflt) {
        return has(key) ? to_doubles(key, kv.at(key)) : dflt;
    }
    std::string text(const std::string& key, std::string dflt) {
        return has(key) ? kv.at(key) : dflt;
    }
    void finish() const {
        for (const auto& [key, _] : kv)
            if (!seen.count(key))
                throw ConfigError("unknown key '" + key + "' in [" + name +
                                  "]");
    }
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    auto sections = parse_sections(text);
    for (const auto& [name, _] : sections)
        if (name != "potential" && name != "levy" && name != "run")
            throw ConfigError("unknown section [" + name + "]");

    ExperimentConfig cfg;
    static const Section empty;

    {
        auto it = sections.find("potential");
        SectionReader r{"potential", it == sections.end() ? empty : it->second,
                        {}};
        if (!r.has("coefficients"))
            throw ConfigError("[potential] requires 'coefficients'");
        cfg.coefficients = to_doubles("coefficients", r.raw("coefficients"));
        cfg.search_radius = r.num("search_radius", cfg.search_radius);
        r.finish();
    }
    {
        auto it = sections.find("levy");
        SectionReader r{"levy", it == sections.end() ? empty : it->second, {}};
        cfg.d = r.num("d", cfg.d);
        cfg.mu = r.num("mu", cfg.mu);
        cfg.r = r.num("r", cfg.r);
        cfg.c_plus = r.num("c_plus", cfg.c_plus);
        cfg.c_minus = r.num("c_minus", cfg.c_minus);
        if (r.has("sv")) {
            const std::string s = r.raw("sv");
            if (s == "none" || s == "constant") {
                cfg.sv = SlowlyVarying::Constant;
            } else if (s.rfind("logpow:", 0) == 0) {
                cfg.sv = SlowlyVarying::LogPower;
                cfg.log_power = to_double("sv", s.substr(7));
            } else {
                throw ConfigError("sv must be 'none' or 'logpow:P'");
            }
        }
        if (r.has("inner")) {
            const std::string s = r.raw("inner");
            if (s == "stable")
                cfg.inner = InnerProfile::Stable;
            else if (s == "truncated")
                cfg.inner = InnerProfile::TruncatedEmpty;
            else
                throw ConfigError("inner must be 'stable' or 'truncated'");
        }
        r.finish();
    }
    {
        auto it = sections.find("run");
        SectionReader r{"run", it == sections.end() ? empty : it->second, {}};
        if (r.has("kind"))
            cfg.kind = experiment_kind_from_string(r.raw("kind"));
        cfg.eps_sweep = r.list("eps", cfg.eps_sweep);
        cfg.rho = r.num("rho", cfg.rho);
        cfg.gamma = r.num("gamma", cfg.gamma);
        cfg.delta = r.num("delta", cfg.delta);
        cfg.h = r.num("h", cfg.h);
        cfg.edge_scale = r.num("edge_scale", cfg.edge_scale);
        cfg.overflow = r.num("overflow", cfg.overflow);
        cfg.horizon = r.num("horizon", cfg.horizon);
        cfg.n_paths = r.integer("n_paths", cfg.n_paths);
        cfg.seed = static_cast<std::uint64_t>(
            r.integer("seed", static_cast<long>(cfg.seed)));
        cfg.well = static_cast<int>(r.integer("well", cfg.well));
        if (r.has("mode")) {
            const std::string s = r.raw("mode");
            if (s == "decomposed")
                cfg.mode = SimMode::Decomposed;
            else if (s == "exact")
                cfg.mode = SimMode::ExactStable;
            else
                throw ConfigError("mode must be 'decomposed' or 'exact'");
        }
        cfg.snapshot_times = r.list("times", cfg.snapshot_times);
        cfg.delta_exp = r.num("delta_exp", cfg.delta_exp);
        cfg.t_short = r.num("t_short", cfg.t_short);
        cfg.out_dir = r.text("out", cfg.out_dir);
        cfg.dump_records = r.flag("dump_records", cfg.dump_records);
        cfg.trace_path = r.integer("trace_path", cfg.trace_path);
        cfg.trace_stride = r.integer("trace_stride", cfg.trace_stride);
        cfg.workers = static_cast<int>(r.integer("workers", cfg.workers));
        r.finish();
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

LevyModel ExperimentConfig::build_model() const {
    if (inner == InnerProfile::Stable)
        return LevyModel::stable(r, r * c_minus, r * c_plus, d, mu);
    LevyModel m;
    m.gaussian_var = d;
    m.mu = mu;
    m.tails = TailSpec{r, c_plus, c_minus, sv, log_power};
    m.inner = InnerProfile::TruncatedEmpty;
    m.validate();
    return m;
}

PolynomialPotential ExperimentConfig::build_potential() const {
    return PolynomialPotential(coefficients);
}

SimConfig ExperimentConfig::sim_config(double eps) const {
    SimConfig s;
    s.eps = eps;
    s.rho = rho;
    s.gamma = gamma;
    s.h = h;
    s.horizon = horizon;  // 0 resolved by the experiment layer
    s.overflow = overflow;
    s.delta = delta;
    s.edge_scale = edge_scale;
    s.mode = mode;
    return s;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.n_paths < 1) out.push_back("n_paths >= 1 (got " +
                                       std::to_string(cfg.n_paths) + ")");
    if (cfg.eps_sweep.empty()) out.push_back("eps sweep must be nonempty");

    Landscape landscape;
    bool have_landscape = false;
    try {
        const PolynomialPotential pot = cfg.build_potential();
        landscape = analyze(pot, cfg.search_radius);
        have_landscape = true;
    } catch (const Error& e) {
        out.push_back(std::string("potential: ") + e.what());
    }
    try {
        (void)cfg.build_model();
    } catch (const Error& e) {
        out.push_back(std::string("levy: ") + e.what());
    }
    if (have_landscape) {
        for (double eps : cfg.eps_sweep) {
            auto v = constraint_violations(cfg.sim_config(eps), cfg.r,
                                           landscape);
            for (auto& s : v)
                out.push_back("eps=" + std::to_string(eps) + ": " + s);
        }
        if (cfg.kind != ExperimentKind::Transitions && cfg.well != 0 &&
            (cfg.well < 1 || cfg.well > landscape.wells()))
            out.push_back("well index out of range");
    }
    if (cfg.kind == ExperimentKind::ShortTime &&
        !(cfg.delta_exp > 0.0 && cfg.delta_exp < cfg.r))
        out.push_back("shorttime requires delta_exp in (0, r)");
    if (cfg.kind == ExperimentKind::GaussianCompare) {
        if (!(cfg.d > 0.0)) out.push_back("gauss requires d > 0");
        if (cfg.c_plus != 0.0 || cfg.c_minus != 0.0)
            out.push_back("gauss requires trivial tails (c_plus = c_minus = 0)");
        if (!(cfg.horizon > 0.0))
            out.push_back("gauss requires an explicit horizon");
    }
    return out;
}

}  // namespace levylab
