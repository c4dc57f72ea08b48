import json
import math

import numpy as np
import pytest

from lackwalk.harness import (
    SELF_LOOP_RULES_2D,
    SWEEP_FIELDS,
    SweepSpec,
    emit_table,
    eval_rule,
    fit_power_law,
    fit_report,
    fit_scaled_sqrt_log,
    load_sweep_spec,
    place_targets,
    rows_to_points,
    run_sweep,
    sweep_self_loop,
)
from lackwalk.lattice import make_geometry, vertex_coords


# --- rules -----------------------------------------------------------------

def test_eval_rule_forms():
    assert eval_rule("2/N", 200) == pytest.approx(0.01)
    assert eval_rule("4.01/N", 4900) == pytest.approx(4.01 / 4900)
    assert eval_rule("0.125", 10) == 0.125
    assert eval_rule("4*sqrt(N*log(N))", 100) == pytest.approx(4 * math.sqrt(100 * math.log(100)))
    assert eval_rule("1/log(N)", 1000) == pytest.approx(1 / math.log(1000))
    assert eval_rule("N/M", 100, 4) == 25.0


def test_eval_rule_rejects_unknown_names():
    with pytest.raises(ValueError):
        eval_rule("os.system('true')", 10)
    with pytest.raises(ValueError):
        eval_rule("q + 1", 10)


# --- target placement ------------------------------------------------------

def test_place_targets_2d_list():
    g = make_geometry(2, 70)
    targets = place_targets(g, 3)
    assert [vertex_coords(g, t) for t in targets] == [(35, 35), (2, 2), (7, 7)]
    assert len(set(place_targets(g, 6))) == 6


def test_place_targets_collision_rejected():
    with pytest.raises(ValueError):
        place_targets(make_geometry(2, 14), 4)  # 14//2 = 7 collides with (7,7)
    with pytest.raises(ValueError):
        place_targets(make_geometry(2, 5), 2)  # 5//2 = 2 collides with (2,2)


def test_place_targets_1d_and_bounds():
    assert place_targets(make_geometry(1, 200), 1) == (100,)
    with pytest.raises(ValueError):
        place_targets(make_geometry(1, 200), 2)
    with pytest.raises(ValueError):
        place_targets(make_geometry(2, 70), 7)
    with pytest.raises(ValueError):
        place_targets(make_geometry(2, 8), 6)  # (8,8)/(10,10) outside the lattice


# --- fits ------------------------------------------------------------------

def test_fit_power_law_recovers_exact_model():
    points = [(n, 2.0 * n) for n in (10, 100, 1000, 10000)]
    fit = fit_power_law(points)
    assert fit.c == pytest.approx(2.0, rel=1e-12)
    assert fit.b == pytest.approx(1.0, abs=1e-12)
    assert fit.residual < 1e-12


def test_fit_power_law_constant_series():
    fit = fit_power_law([(10, 7.0), (100, 7.0), (1000, 7.0)])
    assert fit.b == pytest.approx(0.0, abs=1e-12)
    assert fit.c == pytest.approx(7.0, rel=1e-12)


def test_fit_power_law_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_power_law([(10, 1.0), (20, 2.0)])
    with pytest.raises(ValueError):
        fit_power_law([(10, 1.0), (20, 0.0), (30, 2.0)])


def test_fit_scaled_sqrt_log_recovers_exact_model():
    def model(n, m):
        return 0.5 * math.sqrt((n / m) * math.log2(n / m))

    points = [(n, model(n, 1)) for n in (100, 400, 2500, 10000)]
    fit = fit_scaled_sqrt_log(points, m=1)
    assert fit.c == pytest.approx(0.5, rel=1e-12)
    assert fit.residual <= 1e-12

    points = [(n, model(n, 4)) for n in (100, 400, 2500)]
    assert fit_scaled_sqrt_log(points, m=4).c == pytest.approx(0.5, rel=1e-12)


def test_fit_scaled_sqrt_log_base_only_rescales_c():
    points = [(n, math.sqrt(n * math.log(n))) for n in (100, 1000, 10000)]
    natural = fit_scaled_sqrt_log(points, m=1, log_base=math.e)
    base2 = fit_scaled_sqrt_log(points, m=1, log_base=2.0)
    assert natural.c == pytest.approx(1.0, rel=1e-12)
    assert base2.c == pytest.approx(math.sqrt(math.log(2)), rel=1e-12)


def test_fit_scaled_sqrt_log_rejects_degenerate():
    with pytest.raises(ValueError):
        fit_scaled_sqrt_log([(100, 10.0)], m=1)
    with pytest.raises(ValueError):
        fit_scaled_sqrt_log([(4, 1.0), (8, 2.0)], m=4)  # N/M <= 1


def test_fit_report_shape():
    fit = fit_power_law([(10, 10.0), (100, 100.0), (1000, 1000.0)])
    report = fit_report(fit, m=1, fit_window=(10, 1000))
    assert set(report) == {"model", "M", "c", "b", "residual", "n_points", "fit_window"}
    assert report["fit_window"] == [10, 1000]


# --- sweeps ----------------------------------------------------------------

def test_run_sweep_ring_rows():
    spec = SweepSpec(dim=1, sides=(400, 200, 100), m=1, a_rule="2/N")
    rows = run_sweep(spec)
    assert [row["N"] for row in rows] == [100, 200, 400]
    for row in rows:
        assert set(row) == set(SWEEP_FIELDS)
        assert 0.70 <= row["p_peak"] <= 0.80
        assert 0.9 <= row["t_peak"] / row["N"] <= 1.1
        assert row["t_threshold"] is None


def test_run_sweep_threshold_columns():
    spec = SweepSpec(dim=1, sides=(200,), m=1, a_rule="2/N", threshold="1/log(N)")
    (row,) = run_sweep(spec)
    assert row["t_threshold"] == 57
    assert row["p_threshold"] >= 1 / math.log(200)


def test_run_sweep_empty_and_skipped_sides():
    assert run_sweep(SweepSpec(dim=1, sides=(), m=1, a_rule="2/N")) == []
    # side 14 collides for M=4 and is skipped, side 20 survives.
    spec = SweepSpec(dim=2, sides=(14, 20), m=4, a_rule=SELF_LOOP_RULES_2D[4])
    rows = run_sweep(spec)
    assert [row["side"] for row in rows] == [20]


def test_run_sweep_parallel_matches_serial():
    spec = SweepSpec(dim=1, sides=(100, 150, 200), m=1, a_rule="2/N")
    assert run_sweep(spec, jobs=2) == run_sweep(spec, jobs=1)


def test_run_sweep_rejects_hadamard():
    with pytest.raises(ValueError):
        SweepSpec(dim=1, sides=(100,), m=1, a_rule="2/N", coin="hadamard")


def test_sweep_self_loop_rows():
    g = make_geometry(2, 10)
    rows = sweep_self_loop(g, 1, [0.02])
    assert len(rows) == 1
    assert rows[0]["Na"] == pytest.approx(2.0)
    assert 0.0 <= rows[0]["p_peak"] <= 1.0
    with pytest.raises(ValueError):
        sweep_self_loop(g, 1, [0.3, 0.1])
    with pytest.raises(ValueError):
        sweep_self_loop(g, 1, [0.0, 0.1])


def test_self_loop_sweep_locates_critical_weight():
    # On the 70x70 torus the single-target peak probability is maximized
    # for N*a somewhere in [3, 6], and collapses as the loop weight
    # vanishes.
    g = make_geometry(2, 70)
    grid = [k / g.n_vertices for k in (1, 2, 3, 4, 5, 6, 8)]
    rows = sweep_self_loop(g, 1, grid)
    best = max(rows, key=lambda row: row["p_peak"])
    assert 3.0 <= best["Na"] <= 6.0
    assert best["p_peak"] > 0.9

    (loopless,) = sweep_self_loop(g, 1, [1e-6])
    assert loopless["p_peak"] < 0.25
    assert loopless["p_peak"] < best["p_peak"] / 4


def test_torus_peak_times_monotonic_above_small_sizes():
    # Above N ~ 2500 the first-peak time grows with N at a fixed loop rule.
    spec = SweepSpec(dim=2, sides=(50, 60, 70, 80), m=1, a_rule="4.01/N")
    rows = run_sweep(spec)
    times = [row["t_peak"] for row in rows]
    assert times == sorted(times)


def test_rows_to_points_filters():
    rows = [
        {"side": 10, "N": 100.0, "t_peak": 50, "t_threshold": None},
        {"side": 20, "N": 400.0, "t_peak": 90, "t_threshold": 30},
    ]
    assert rows_to_points(rows) == [(100.0, 50.0), (400.0, 90.0)]
    assert rows_to_points(rows, use_threshold=True) == [(400.0, 30.0)]
    assert rows_to_points(rows, min_side=15) == [(400.0, 90.0)]


# --- tables ----------------------------------------------------------------

def test_emit_table_csv_shapes(tmp_path):
    path = tmp_path / "out.csv"
    emit_table([], ["a", "b"], "csv", path)
    assert path.read_text() == "a,b\n"

    emit_table([{"a": 1, "b": 0.75}], ["a", "b"], "csv", path)
    assert path.read_text() == "a,b\n1,0.75\n"

    emit_table([{"a": None, "b": 1 / 3}], ["a", "b"], "csv", path)
    assert path.read_text() == f"a,b\n,{1/3:.17g}\n"


def test_emit_table_json(tmp_path):
    path = tmp_path / "out.json"
    emit_table([{"a": 1, "b": None}], ["a", "b"], "json", path)
    assert json.loads(path.read_text()) == [{"a": 1, "b": None}]
    with pytest.raises(ValueError):
        emit_table([], ["a"], "xml", path)


def test_sweep_to_table_is_deterministic(tmp_path):
    spec = SweepSpec(dim=1, sides=(100, 200), m=1, a_rule="2/N", threshold="1/log(N)")
    first = tmp_path / "one.csv"
    second = tmp_path / "two.csv"
    emit_table(run_sweep(spec), SWEEP_FIELDS, "csv", first)
    emit_table(run_sweep(spec), SWEEP_FIELDS, "csv", second)
    assert first.read_bytes() == second.read_bytes()


def test_load_sweep_spec_round_trip(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({
        "dim": 1, "sides": [100, 200], "M": 1, "a_rule": "2/N",
        "threshold": "1/log(N)", "output": "rows.csv",
    }))
    spec = load_sweep_spec(path)
    assert spec.sides == (100, 200)
    assert spec.m == 1
    assert spec.output == "rows.csv"

    path.write_text(json.dumps({"dim": 1, "sides": [100]}))
    with pytest.raises(ValueError):
        load_sweep_spec(path)
    path.write_text(json.dumps({"dim": 1, "sides": [100], "M": 1,
                                "a_rule": "2/N", "bogus": 3}))
    with pytest.raises(ValueError):
        load_sweep_spec(path)
