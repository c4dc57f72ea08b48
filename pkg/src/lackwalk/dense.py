"""Dense-matrix ground truth for the walk engine.

Builds the full evolution operator of small instances directly from the
definitions: an explicit shift permutation assembled vertex by vertex from
:func:`lackwalk.lattice.neighbor`, and the marked coin as a Kronecker
product of the coin matrix with the vertex-space marker. None of the
vectorised stepping code is reused, so agreement between the two routes is
a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import (
    CoinSpec,
    GroverLoopCoin,
    HadamardCoin,
    OracleSpec,
    coin_dimension,
    grover_coin_matrix,
    hadamard_coin_matrix,
    initial_state,
    walk_step,
)
from .lattice import Direction, LatticeGeometry, neighbor

__all__ = ["DENSE_DIM_LIMIT", "DenseOperator", "EquivalenceReport",
           "build_dense_unitary", "verify_equivalence"]

# Guard against accidental huge allocations; keeps oracle runs fast.
DENSE_DIM_LIMIT = 4096


@dataclass(frozen=True)
class DenseOperator:
    dim: int
    entries: np.ndarray


@dataclass(frozen=True)
class EquivalenceReport:
    passed: bool
    max_deviation: float
    steps: int
    tol: float


def _check_dim(geometry: LatticeGeometry, coin: CoinSpec) -> int:
    dim = coin_dimension(coin, geometry.dim) * geometry.n_vertices
    if dim > DENSE_DIM_LIMIT:
        raise ValueError(f"dense operator dimension {dim} exceeds limit {DENSE_DIM_LIMIT}")
    return dim


def _vertex_marker(n: int, oracle: OracleSpec) -> np.ndarray:
    """Vertex-space factor of the marked coin: identity, the per-target
    sign flip, or the reflection about the target superposition."""
    marker = np.eye(n, dtype=np.complex128)
    if not oracle.targets:
        return marker
    if oracle.mode == "per_target_flip":
        for t in oracle.targets:
            marker[t, t] = -1.0
        return marker
    sup = np.zeros(n, dtype=np.complex128)
    sup[list(oracle.targets)] = 1.0 / np.sqrt(len(oracle.targets))
    return marker - 2.0 * np.outer(sup, sup)


def _shift_matrix(geometry: LatticeGeometry, cdim: int) -> np.ndarray:
    n = geometry.n_vertices
    shift = np.zeros((cdim * n, cdim * n), dtype=np.complex128)
    for v in range(n):
        for axis in range(geometry.dim):
            up = neighbor(geometry, v, Direction(axis, +1))
            down = neighbor(geometry, v, Direction(axis, -1))
            shift[(2 * axis + 1) * n + up, 2 * axis * n + v] = 1.0
            shift[2 * axis * n + down, (2 * axis + 1) * n + v] = 1.0
    if cdim == 2 * geometry.dim + 1:
        loop = 2 * geometry.dim
        for v in range(n):
            shift[loop * n + v, loop * n + v] = 1.0
    return shift


def build_dense_unitary(
    geometry: LatticeGeometry, coin: CoinSpec, oracle: OracleSpec
) -> DenseOperator:
    """Full one-step evolution operator in the (direction, vertex) basis."""
    dim = _check_dim(geometry, coin)
    oracle.validate_for(geometry)
    n = geometry.n_vertices
    cdim = coin_dimension(coin, geometry.dim)

    if isinstance(coin, HadamardCoin) and coin.target_bias is not None:
        plain = hadamard_coin_matrix(coin.bias, coin.symmetric)
        marked = hadamard_coin_matrix(coin.target_bias, coin.symmetric)
        on_targets = np.zeros((n, n), dtype=np.complex128)
        for t in oracle.targets:
            on_targets[t, t] = 1.0
        marked_coin = np.kron(plain, np.eye(n) - on_targets) + np.kron(marked, on_targets)
    else:
        if isinstance(coin, GroverLoopCoin):
            matrix = grover_coin_matrix(2 * geometry.dim, coin.loop_weight)
        else:
            matrix = hadamard_coin_matrix(coin.bias, coin.symmetric)
        marked_coin = np.kron(matrix, _vertex_marker(n, oracle))

    unitary = _shift_matrix(geometry, cdim) @ marked_coin
    return DenseOperator(dim=dim, entries=unitary)


def verify_equivalence(
    geometry: LatticeGeometry,
    coin: CoinSpec,
    oracle: OracleSpec,
    steps: int,
    tol: float,
) -> EquivalenceReport:
    """Compare dense evolution against the vectorised engine.

    Evolves the uniform start state both ways for ``steps`` steps and
    reports the largest amplitude deviation seen at any step. A failing
    comparison is a result, not an exception.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    operator = build_dense_unitary(geometry, coin, oracle).entries

    state = initial_state(geometry, coin)
    vec = state.to_vector().copy()
    worst = 0.0
    for _ in range(steps):
        vec = operator @ vec
        state = walk_step(state, coin, oracle)
        dev = float(np.abs(vec - state.to_vector()).max())
        worst = max(worst, dev)
    return EquivalenceReport(passed=worst <= tol, max_deviation=worst, steps=steps, tol=tol)
