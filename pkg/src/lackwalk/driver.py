"""Search runs: probability time series, peak and threshold detection,
and amplification-adjusted running time."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import (
    CoinSpec,
    GroverLoopCoin,
    OracleSpec,
    initial_state,
    success_probability,
    walk_step,
)
from .lattice import LatticeGeometry

__all__ = [
    "ProbabilitySeries",
    "PeakReport",
    "AmplifiedComplexity",
    "run_search",
    "run_search_until",
    "first_peak",
    "first_threshold_crossing",
    "amplified_complexity",
    "default_t_max",
]

# Default peak floor is this multiple of the baseline probability M/N,
# high enough to skip round-off ripples at the baseline.
PEAK_FLOOR_FACTOR = 2.0


@dataclass(frozen=True)
class ProbabilitySeries:
    """Success probability after t = 0..t_max steps, plus the run config."""

    probabilities: np.ndarray
    n_vertices: int
    n_targets: int
    loop_weight: float | None
    coin: CoinSpec
    oracle_mode: str

    def __len__(self) -> int:
        return len(self.probabilities)

    @property
    def baseline(self) -> float:
        """Probability of the uniform start state, M/N."""
        return self.n_targets / self.n_vertices


@dataclass(frozen=True)
class PeakReport:
    found: bool
    t_peak: int
    p_peak: float

    @classmethod
    def none(cls) -> "PeakReport":
        return cls(found=False, t_peak=-1, p_peak=0.0)


@dataclass(frozen=True)
class AmplifiedComplexity:
    """Total running time t1 * ceil(1/sqrt(p_s)) of a low-probability run
    boosted by amplitude amplification."""

    t1: int
    p_s: float
    repetitions: int
    total: int


def default_t_max(dim: int, n_vertices: int) -> int:
    """Step budget that comfortably brackets every observed first peak:
    4N on rings, 4*sqrt(N ln N) on tori."""
    if dim == 1:
        return 4 * n_vertices
    return int(math.ceil(4.0 * math.sqrt(n_vertices * math.log(n_vertices))))


def _is_peak_at_end(probs: list[float], floor: float) -> bool:
    return (
        len(probs) >= 3
        and probs[-3] < probs[-2] >= probs[-1]
        and probs[-2] >= floor
    )


def _simulate(
    geometry: LatticeGeometry,
    coin: CoinSpec,
    oracle: OracleSpec,
    t_max: int,
    peak_floor: float | None,
    threshold: float | None,
) -> ProbabilitySeries:
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    oracle.validate_for(geometry)

    state = initial_state(geometry, coin)
    probs = [success_probability(state, oracle.targets)]
    need_peak = peak_floor is not None
    need_cross = threshold is not None and probs[0] < threshold
    for _ in range(t_max):
        if not (need_peak or need_cross) and (peak_floor is not None or threshold is not None):
            break
        state = walk_step(state, coin, oracle)
        probs.append(success_probability(state, oracle.targets))
        if need_peak and _is_peak_at_end(probs, peak_floor):
            need_peak = False
        if need_cross and probs[-1] >= threshold:
            need_cross = False

    raw = np.asarray(probs, dtype=float)
    if raw.min() < -1e-12 or raw.max() > 1.0 + 1e-12:
        raise AssertionError(
            f"success probability left [0, 1]: min={raw.min()}, max={raw.max()}"
        )
    return ProbabilitySeries(
        probabilities=np.clip(raw, 0.0, 1.0),
        n_vertices=geometry.n_vertices,
        n_targets=len(oracle.targets),
        loop_weight=coin.loop_weight if isinstance(coin, GroverLoopCoin) else None,
        coin=coin,
        oracle_mode=oracle.mode,
    )


def run_search(
    geometry: LatticeGeometry,
    coin: CoinSpec,
    oracle: OracleSpec,
    t_max: int,
) -> ProbabilitySeries:
    """Record the success probability through t_max steps."""
    return _simulate(geometry, coin, oracle, t_max, peak_floor=None, threshold=None)


def run_search_until(
    geometry: LatticeGeometry,
    coin: CoinSpec,
    oracle: OracleSpec,
    t_max: int,
    peak_floor: float | None = None,
    threshold: float | None = None,
) -> ProbabilitySeries:
    """Like :func:`run_search`, but stop as soon as every requested event
    has been observed: the first peak (by the :func:`first_peak` rule with
    ``peak_floor``) and/or the first crossing of ``threshold``.

    The returned series is a prefix of the full run, so peak and crossing
    reports computed from it match those of the untruncated series.
    """
    if peak_floor is None and threshold is None:
        raise ValueError("request at least one stop event (peak_floor or threshold)")
    return _simulate(geometry, coin, oracle, t_max, peak_floor=peak_floor, threshold=threshold)


def first_peak(series: ProbabilitySeries, floor: float | None = None) -> PeakReport:
    """Earliest strict-rise/non-strict-fall local maximum at or above ``floor``.

    ``floor`` defaults to twice the baseline probability M/N. Returns a
    not-found report when no interior maximum qualifies.
    """
    if floor is None:
        floor = PEAK_FLOOR_FACTOR * series.baseline
    if floor < 0.0:
        raise ValueError(f"floor must be >= 0, got {floor}")
    p = series.probabilities
    for t in range(1, len(p) - 1):
        if p[t - 1] < p[t] >= p[t + 1] and p[t] >= floor:
            return PeakReport(found=True, t_peak=t, p_peak=float(p[t]))
    return PeakReport.none()


def first_threshold_crossing(series: ProbabilitySeries, threshold: float) -> PeakReport:
    """Earliest step with probability at or above ``threshold``."""
    if not threshold > 0.0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    p = series.probabilities
    above = np.nonzero(p >= threshold)[0]
    if above.size == 0:
        return PeakReport.none()
    t = int(above[0])
    return PeakReport(found=True, t_peak=t, p_peak=float(p[t]))


def amplified_complexity(t1: int, p_s: float) -> AmplifiedComplexity:
    """Running time after boosting a success probability ``p_s`` run of
    length ``t1`` with ceil(1/sqrt(p_s)) amplification rounds."""
    if not 0.0 < p_s <= 1.0:
        raise ValueError(f"success probability must lie in (0, 1], got {p_s}")
    if t1 < 0:
        raise ValueError(f"t1 must be >= 0, got {t1}")
    ratio = 1.0 / math.sqrt(p_s)
    # Snap to the nearest integer before ceil so exact repetition counts
    # (e.g. p_s = 0.04 -> 5) survive round-off.
    if abs(ratio - round(ratio)) < 1e-9:
        ratio = round(ratio)
    repetitions = int(math.ceil(ratio))
    return AmplifiedComplexity(t1=t1, p_s=p_s, repetitions=repetitions, total=t1 * repetitions)
