"""Named presets, one per reference figure dataset.

==========  ================================================================
fig1a       probability-vs-step series: 200-ring, symmetric Hadamard coin,
            bias 0.5 (0.4 at the target)
fig1b       probability-vs-step series: 200-ring, self-loop weight 2/N
fig2        ring sweep N = 100..5000 (step 100), weight 2/N, first peaks
fig3        ring sweep N = 1000..20000 (step 1000), weight 2/N, first peaks
            plus the first crossing of 1/ln N
fig4-m1..3  torus sweeps, side 10..120 (step 5), weights {4.01, 7.8, 10.4}/N
fig5-m4..6  torus sweeps, side 12..120 (step 4), weights {15.2, 18.6, 21.7}/N
fig6        70x70 torus: first-peak probability over N*a = 0.5..12 for
            every target count 1..6
==========  ================================================================

Every preset is deterministic; running one twice yields identical bytes.
"""

from __future__ import annotations

from .driver import run_search
from .engine import GroverLoopCoin, HadamardCoin, OracleSpec
from .harness import (
    SELF_LOOP_RULE_1D,
    SELF_LOOP_RULES_2D,
    SWEEP_FIELDS,
    SweepSpec,
    run_sweep,
    sweep_self_loop,
)
from .lattice import make_geometry

__all__ = ["PRESET_NAMES", "run_preset", "preset_output_name"]

SERIES_FIELDS = ["t", "p"]
LOOP_SWEEP_FIELDS = ["M", "a", "Na", "p_peak"]

_SWEEP_SPECS = {
    "fig2": SweepSpec(dim=1, sides=tuple(range(100, 5001, 100)), m=1,
                      a_rule=SELF_LOOP_RULE_1D),
    "fig3": SweepSpec(dim=1, sides=tuple(range(1000, 20001, 1000)), m=1,
                      a_rule=SELF_LOOP_RULE_1D, threshold="1/log(N)"),
}
for _m in (1, 2, 3):
    _SWEEP_SPECS[f"fig4-m{_m}"] = SweepSpec(
        dim=2, sides=tuple(range(10, 121, 5)), m=_m, a_rule=SELF_LOOP_RULES_2D[_m])
for _m in (4, 5, 6):
    _SWEEP_SPECS[f"fig5-m{_m}"] = SweepSpec(
        dim=2, sides=tuple(range(12, 121, 4)), m=_m, a_rule=SELF_LOOP_RULES_2D[_m])

PRESET_NAMES = ("fig1a", "fig1b", *sorted(_SWEEP_SPECS), "fig6")


def _series_rows(name: str) -> list[dict]:
    geometry = make_geometry(1, 200)
    if name == "fig1a":
        coin = HadamardCoin(bias=0.5, symmetric=True, target_bias=0.4)
        loop = None
    else:
        coin = GroverLoopCoin(loop_weight=2.0 / geometry.n_vertices)
        loop = coin
    oracle = OracleSpec(targets=(geometry.n_vertices // 2,))
    series = run_search(geometry, coin, oracle, t_max=4 * geometry.n_vertices)
    return [{"t": t, "p": float(p)} for t, p in enumerate(series.probabilities)]


def _loop_sweep_rows() -> list[dict]:
    geometry = make_geometry(2, 70)
    n = geometry.n_vertices
    grid = [0.5 * k / n for k in range(1, 25)]
    rows = []
    for m in range(1, 7):
        for row in sweep_self_loop(geometry, m, grid):
            rows.append({"M": m, **row})
    return rows


def run_preset(name: str, jobs: int = 1) -> tuple[list[str], list[dict]]:
    """Execute a preset; returns (fieldnames, rows) ready for emit_table."""
    if name in ("fig1a", "fig1b"):
        return SERIES_FIELDS, _series_rows(name)
    if name in _SWEEP_SPECS:
        return SWEEP_FIELDS, run_sweep(_SWEEP_SPECS[name], jobs=jobs)
    if name == "fig6":
        return LOOP_SWEEP_FIELDS, _loop_sweep_rows()
    raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")


def preset_output_name(name: str) -> str:
    return f"{name}.csv"
