#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "levylab/config.hpp"
#include "levylab/experiment.hpp"

using namespace levylab;

namespace {

const char* kBase = R"(
# symmetric stable noise in the standard double well
[potential]
coefficients = 0 0 -0.5 0 0.25
search_radius = 10

[levy]
r = 1
c_plus = 1
c_minus = 1
inner = stable

[run]
kind = exitlaw
eps = 0.1
rho = 0.7
gamma = 0.05
n_paths = 200
seed = 42
well = 1
out = /tmp/levylab_test_out
)";

}  // namespace

TEST_CASE("config parsing round trip") {
    const auto cfg = parse_config_text(kBase);
    CHECK(cfg.coefficients == std::vector<double>{0, 0, -0.5, 0, 0.25});
    CHECK(cfg.r == 1.0);
    CHECK(cfg.inner == InnerProfile::Stable);
    CHECK(cfg.kind == ExperimentKind::ExitLaw);
    CHECK(cfg.eps_sweep == std::vector<double>{0.1});
    CHECK(cfg.n_paths == 200);
    CHECK(cfg.seed == 42);
    CHECK(validate(cfg).empty());
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(parse_config_text("[potential]\nbogus_key = 1\n"
                                      "coefficients = 0 0 -0.5 0 0.25\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("[nosuch]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[levy]\nr = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("key_outside = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[run]\nkind = warp\n"), ConfigError);
    // missing coefficients
    CHECK_THROWS_AS(parse_config_text("[run]\nkind = analyze\n"), ConfigError);
}

TEST_CASE("validate reports each violated constraint") {
    auto cfg = parse_config_text(kBase);
    CHECK(validate(cfg).empty());

    auto bad = cfg;
    bad.rho = 0.4;
    auto v = validate(bad);
    REQUIRE(!v.empty());
    bool found = false;
    for (const auto& s : v)
        if (s.find("1/2 < rho") != std::string::npos) found = true;
    CHECK(found);

    bad = cfg;
    bad.gamma = 0.2;
    v = validate(bad);
    found = false;
    for (const auto& s : v)
        if (s.find("gamma < (1-rho)/4") != std::string::npos) found = true;
    CHECK(found);

    bad = cfg;
    bad.n_paths = 0;
    v = validate(bad);
    found = false;
    for (const auto& s : v)
        if (s.find("n_paths") != std::string::npos) found = true;
    CHECK(found);

    bad = cfg;
    bad.coefficients = {0, 0, 0, 0, 1.0};  // degenerate quartic
    CHECK_FALSE(validate(bad).empty());
}

TEST_CASE("run_experiment refuses invalid configs") {
    auto cfg = parse_config_text(kBase);
    cfg.n_paths = 0;
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("analyze reports are byte-identical across repeats and workers") {
    auto cfg = parse_config_text(kBase);
    cfg.kind = ExperimentKind::Analyze;
    RunOverrides ov;
    ov.out_dir = "/tmp/levylab_test_out_a";
    ov.workers = 1;
    const auto a = run_experiment(cfg, ov);
    ov.out_dir = "/tmp/levylab_test_out_b";
    ov.workers = 2;
    const auto b = run_experiment(cfg, ov);
    CHECK(a.report_json == b.report_json);
    CHECK(a.stats_pass);
}

TEST_CASE("exit-law runs are deterministic at any worker count") {
    auto cfg = parse_config_text(kBase);
    cfg.n_paths = 150;
    cfg.dump_records = false;
    RunOverrides o1;
    o1.out_dir = "/tmp/levylab_test_out_w1";
    o1.workers = 1;
    RunOverrides o2;
    o2.out_dir = "/tmp/levylab_test_out_w2";
    o2.workers = 2;
    const auto r1 = run_experiment(cfg, o1);
    const auto r2 = run_experiment(cfg, o2);
    CHECK(r1.report_json == r2.report_json);
}

TEST_CASE("gauss configs demand an explicit horizon and a pure diffusion") {
    auto cfg = parse_config_text(kBase);
    cfg.kind = ExperimentKind::GaussianCompare;
    auto v = validate(cfg);
    CHECK_FALSE(v.empty());  // jumps present, no d, no horizon
    cfg.c_plus = cfg.c_minus = 0.0;
    cfg.inner = InnerProfile::TruncatedEmpty;
    cfg.d = 1.0;
    cfg.horizon = 1000.0;
    cfg.coefficients = {0.0, -0.1, -0.5, 0.0, 0.25};  // unequal depths
    CHECK(validate(cfg).empty());
}
