import json
import math
import os
import tempfile

import pytest

import levylab as ll

DOUBLE_WELL = [0.0, 0.0, -0.5, 0.0, 0.25]


def test_analyze_double_well():
    pot = ll.PolynomialPotential(DOUBLE_WELL)
    land = ll.analyze(pot, 10.0)
    assert land.wells() == 2
    assert land.minima[0] == pytest.approx(-1.0, abs=1e-9)
    assert land.minima[1] == pytest.approx(1.0, abs=1e-9)
    assert land.saddles[0] == pytest.approx(0.0, abs=1e-9)
    assert land.curvature_min[0] == pytest.approx(2.0)
    assert land.delta0() == pytest.approx(1.0)


def test_drift_flow_basin():
    pot = ll.PolynomialPotential(DOUBLE_WELL)
    land = ll.analyze(pot, 10.0)
    assert pot.drift(2.0) == pytest.approx(-6.0)
    assert ll.flow(pot, 0.5, 30.0) == pytest.approx(1.0, abs=1e-8)
    assert ll.basin_of(land, -0.3)["well"] == 1
    assert ll.basin_of(land, 0.0)["at_saddle"]


def test_generator_and_rates():
    land = ll.Landscape.from_extrema([-2.0, 0.5, 3.0], [-1.0, 2.0])
    gen = ll.compute_generator(land, 1.0, 1.0)
    rows = gen.rows()
    assert rows[1][0] == pytest.approx(1.0 / 3.0)
    assert rows[1][2] == pytest.approx(1.0 / 3.0)
    assert gen.rate(1) == pytest.approx(2.0 / 3.0)

    model = ll.LevyModel.stable(1.0, 1.0, 1.0)
    assert model.tail_total(10.0) == pytest.approx(0.2)
    assert ll.time_scale(model, 0.1) == pytest.approx(5.0)
    inner = ll.Landscape.from_extrema([-2.0, 0.0, 3.0], [-1.0, 2.0])
    assert ll.exit_rate(inner, model, 2, 0.1) == pytest.approx(0.15)


def test_chain_matrix_and_simulation():
    land = ll.Landscape.from_extrema([-1.0, 1.0], [0.0])
    gen = ll.compute_generator(land, 1.0, 1.0)
    p = ll.chain_transition_matrix(gen, 1.0)
    for row in p:
        assert sum(row) == pytest.approx(1.0, abs=1e-12)
        assert all(v >= 0.0 for v in row)
    stay = 0.5 * (1.0 + math.exp(-1.0))
    assert p[0][0] == pytest.approx(stay, abs=1e-12)

    rng = ll.RngStream(7, 0)
    states = ll.simulate_chain(gen, 1, [0.5, 1.0, 2.0], rng)
    assert all(s in (1, 2) for s in states)


def test_path_simulation_deterministic():
    pot = ll.PolynomialPotential(DOUBLE_WELL)
    land = ll.analyze(pot, 10.0)
    model = ll.LevyModel.stable(1.0, 1.0, 1.0)
    cfg = ll.SimConfig()
    cfg.eps = 0.1
    cfg.horizon = 2000.0
    sim = ll.PathSimulator(pot, land, model, cfg)
    a = sim.first_exit_sigma(1, ll.RngStream(5, 11))
    b = sim.first_exit_sigma(1, ll.RngStream(5, 11))
    assert a == b
    assert a["kind"] == "sigma"
    assert a["t"] > 0.0

    t = sim.sigma_t_tau(1, -1.0, ll.RngStream(5, 12))
    if t["tau"] is not None:
        assert t["sigma"] <= t["T"] <= t["tau"]


def test_decomposition_sampling():
    model = ll.LevyModel.stable(1.0, 1.0, 1.0)
    dec = ll.Decomposition(model, 0.1, 0.7)
    assert dec.beta == pytest.approx(2.0 * 0.1**0.7)
    rng = ll.RngStream(3, 3)
    draws = [dec.sample_big_jump(rng) for _ in range(2000)]
    assert all(abs(w) >= dec.threshold for w in draws)


def test_ks_on_synthetic_exponentials():
    rng = ll.RngStream(11, 0)
    sample = ll.ExitSample(1, 0.1, 1.0)
    for _ in range(1000):
        sample.add(rng.exponential(1.0), 2)
    res = ll.ks_exponential(sample)
    assert res["p_value"] > 0.01


def test_gaussian_comparison():
    pot = ll.PolynomialPotential([0.0, -0.1, -0.5, 0.0, 0.25])
    land = ll.analyze(pot, 10.0)
    gc = ll.gaussian_comparison(land)
    assert gc["generator"] == [[0.0, 0.0], [1.0, -1.0]]
    assert gc["barrier"] == pytest.approx(0.3154, abs=5e-3)


def test_run_experiment_analyze(tmp_path):
    config = tmp_path / "exp.ini"
    config.write_text(
        "\n".join(
            [
                "[potential]",
                "coefficients = 0 0 -0.5 0 0.25",
                "[levy]",
                "r = 1",
                "c_plus = 1",
                "c_minus = 1",
                "inner = stable",
                "[run]",
                "kind = analyze",
                "eps = 0.1 0.05",
                "seed = 9",
            ]
        )
    )
    out = tmp_path / "out"
    res = ll.run_experiment(str(config), out_dir=str(out))
    assert res["pass"]
    report = json.loads(res["report_json"])
    assert report["kind"] == "analyze"
    assert report["generator"]["q"][0][1] == pytest.approx(0.5)
    assert os.path.exists(out / "tables" / "generator.csv")
    assert ll.validate_config(str(config)) == []
