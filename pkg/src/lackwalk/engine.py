"""State-vector engine for lackadaisical coined walks on periodic lattices.

A walk state lives on the tensor product of an internal coin space and the
vertex space. Amplitudes are stored as a ``(coin_dim, n_vertices)`` complex
array whose C-order ravel is the canonical flat vector (direction index
slowest, vertices in the row-major order of :mod:`lackwalk.lattice`).

One evolution step applies the marked coin operation and then the
flip-flop shift: the coin mixes the directions at every vertex (negated or
reflected at the marked vertices), and the shift moves each edge amplitude
to the adjacent vertex while inverting its direction. Self-loop amplitudes
never move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "GroverLoopCoin",
    "HadamardCoin",
    "CoinSpec",
    "OracleSpec",
    "WalkState",
    "ORACLE_MODES",
    "coin_dimension",
    "initial_state",
    "grover_coin_matrix",
    "hadamard_coin_matrix",
    "apply_oracle_coin",
    "apply_shift",
    "walk_step",
    "success_probability",
]

from .lattice import LatticeGeometry

ORACLE_MODES = ("per_target_flip", "superposition_reflection")


@dataclass(frozen=True)
class GroverLoopCoin:
    """Grover diffusion coin over ``2*dim`` edge directions plus a weighted
    self-loop of weight ``loop_weight`` (>= 0). Weight 0 keeps the loop slot
    but gives it zero amplitude in the reference coin state."""

    loop_weight: float

    def __post_init__(self) -> None:
        if not self.loop_weight >= 0.0:
            raise ValueError(f"self-loop weight must be >= 0, got {self.loop_weight}")


@dataclass(frozen=True)
class HadamardCoin:
    """Two-direction Hadamard-family coin for loopless 1D walks.

    ``bias`` in [0, 1] sets the diagonal amplitude sqrt(bias); ``symmetric``
    selects the variant with imaginary off-diagonals and equal diagonal
    (the positive square root of -1), otherwise the real biased variant
    with a negated lower-right entry. ``target_bias``, when set, is the
    bias of a second coin applied at the marked vertices instead of any
    sign flip.
    """

    bias: float
    symmetric: bool = True
    target_bias: float | None = None

    def __post_init__(self) -> None:
        for name, value in (("bias", self.bias), ("target_bias", self.target_bias)):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


CoinSpec = Union[GroverLoopCoin, HadamardCoin]


@dataclass(frozen=True)
class OracleSpec:
    """Marked-vertex specification.

    ``targets`` is a duplicate-free tuple of vertex indices (may be empty
    for free evolution). ``mode`` selects how the marking enters the coin
    operation: ``per_target_flip`` negates the coin output at every marked
    vertex; ``superposition_reflection`` reflects the vertex space about
    the normalized equal superposition of the marked vertices. The two
    coincide exactly for a single target.
    """

    targets: tuple[int, ...] = ()
    mode: str = "per_target_flip"

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate target vertices in {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ValueError(f"negative target vertex in {self.targets}")
        if self.mode not in ORACLE_MODES:
            raise ValueError(f"unknown oracle mode {self.mode!r}; expected one of {ORACLE_MODES}")

    def validate_for(self, geometry: LatticeGeometry) -> None:
        for t in self.targets:
            if t >= geometry.n_vertices:
                raise ValueError(
                    f"target vertex {t} out of range [0, {geometry.n_vertices})"
                )


@dataclass
class WalkState:
    """Amplitudes of a walker, shaped ``(coin_dim, n_vertices)``.

    States returned by the engine are unit norm up to round-off; treat the
    array as immutable and build new states through the step functions.
    """

    geometry: LatticeGeometry
    coin_dim: int
    amps: np.ndarray

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def to_vector(self) -> np.ndarray:
        """Canonical flat vector of length ``coin_dim * n_vertices``."""
        return self.amps.ravel()


def coin_dimension(coin: CoinSpec, dim: int) -> int:
    """Coin-space dimension implied by a coin kind on a dim-d lattice."""
    if isinstance(coin, GroverLoopCoin):
        return 2 * dim + 1
    if isinstance(coin, HadamardCoin):
        if dim != 1:
            raise ValueError("the Hadamard coin is only defined on 1D lattices")
        return 2
    raise TypeError(f"unknown coin spec {coin!r}")


def grover_coin_matrix(degree: int, loop_weight: float) -> np.ndarray:
    """Grover diffusion coin 2|c><c| - I on ``degree + 1`` directions.

    ``degree`` is the (even) number of edge directions; the reference coin
    state carries amplitude 1/sqrt(degree + w) on each edge direction and
    sqrt(w)/sqrt(degree + w) on the trailing self-loop slot, where
    w = ``loop_weight``. The result is real, symmetric, and an involution.
    """
    if degree < 2 or degree % 2 != 0:
        raise ValueError(f"degree must be a positive even integer, got {degree}")
    if not loop_weight >= 0.0:
        raise ValueError(f"self-loop weight must be >= 0, got {loop_weight}")
    ref = np.ones(degree + 1)
    ref[-1] = math.sqrt(loop_weight)
    ref /= math.sqrt(degree + loop_weight)
    coin = 2.0 * np.outer(ref, ref) - np.eye(degree + 1)
    return coin.astype(np.complex128)


def hadamard_coin_matrix(bias: float, symmetric: bool = True) -> np.ndarray:
    """2x2 Hadamard-family coin.

    Real variant: [[sqrt(b), sqrt(1-b)], [sqrt(1-b), -sqrt(b)]].
    Symmetric variant: the off-diagonal picks up the positive square root
    of -1 (factor i) and the lower-right diagonal entry is +sqrt(b).
    ``bias = 0.5`` with the real variant is the standard Hadamard matrix.
    """
    if not 0.0 <= bias <= 1.0:
        raise ValueError(f"bias must lie in [0, 1], got {bias}")
    diag = math.sqrt(bias)
    off = math.sqrt(1.0 - bias)
    if symmetric:
        return np.array([[diag, 1j * off], [1j * off, diag]], dtype=np.complex128)
    return np.array([[diag, off], [off, -diag]], dtype=np.complex128)


def _coin_matrix(coin: CoinSpec, dim: int) -> np.ndarray:
    if isinstance(coin, GroverLoopCoin):
        return grover_coin_matrix(2 * dim, coin.loop_weight)
    return hadamard_coin_matrix(coin.bias, coin.symmetric)


def initial_state(geometry: LatticeGeometry, coin: CoinSpec) -> WalkState:
    """Uniform search start state: the reference coin state at every vertex,
    uniform (1/sqrt(N)) over vertices."""
    n = geometry.n_vertices
    cdim = coin_dimension(coin, geometry.dim)
    if isinstance(coin, GroverLoopCoin):
        ref = np.ones(cdim)
        ref[-1] = math.sqrt(coin.loop_weight)
        ref /= math.sqrt(2 * geometry.dim + coin.loop_weight)
    else:
        ref = np.full(cdim, 1.0 / math.sqrt(2.0))
    amps = np.repeat(ref[:, None], n, axis=1).astype(np.complex128) / math.sqrt(n)
    return WalkState(geometry=geometry, coin_dim=cdim, amps=amps)


def _reflect_about_target_superposition(amps: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Vertex-space reflection I - 2|T><T| about the normalized equal
    superposition of the target vertices, applied per coin row."""
    out = amps.copy()
    sub = out[:, targets]
    out[:, targets] = sub - (2.0 / targets.size) * sub.sum(axis=1, keepdims=True)
    return out


def apply_oracle_coin(state: WalkState, coin: CoinSpec, oracle: OracleSpec) -> WalkState:
    """Apply the marked coin operation (no shift).

    For the Grover-loop coin the marking is a sign flip at each target
    vertex (``per_target_flip``) or the reflection about the target
    superposition (``superposition_reflection``); both act purely on the
    vertex space and therefore commute with the coin. A Hadamard coin with
    ``target_bias`` set instead applies the second coin at the targets and
    no sign flip.
    """
    cdim = coin_dimension(coin, state.geometry.dim)
    if cdim != state.coin_dim:
        raise ValueError(
            f"coin dimension {cdim} does not match state coin_dim {state.coin_dim}"
        )
    targets = np.asarray(oracle.targets, dtype=np.intp)
    two_coin = isinstance(coin, HadamardCoin) and coin.target_bias is not None

    amps = state.amps
    if targets.size and oracle.mode == "superposition_reflection" and not two_coin:
        amps = _reflect_about_target_superposition(amps, targets)

    matrix = _coin_matrix(coin, state.geometry.dim)
    out = matrix @ amps

    if targets.size and two_coin:
        target_matrix = hadamard_coin_matrix(coin.target_bias, coin.symmetric)
        out[:, targets] = target_matrix @ amps[:, targets]
    elif targets.size and oracle.mode == "per_target_flip":
        out[:, targets] *= -1.0

    return WalkState(geometry=state.geometry, coin_dim=state.coin_dim, amps=out)


def apply_shift(state: WalkState) -> WalkState:
    """Flip-flop shift: edge amplitudes move one step along their axis and
    swap sign label; self-loop amplitudes stay put. An exact permutation,
    and an involution."""
    g = state.geometry
    shape = (g.side,) * g.dim
    src = state.amps
    out = np.empty_like(src)
    for axis in range(g.dim):
        pos = src[2 * axis].reshape(shape)
        neg = src[2 * axis + 1].reshape(shape)
        # (axis, +) at v lands on (axis, -) at v+1; (axis, -) lands on (axis, +) at v-1.
        out[2 * axis + 1] = np.roll(pos, 1, axis=axis).ravel()
        out[2 * axis] = np.roll(neg, -1, axis=axis).ravel()
    if state.coin_dim == 2 * g.dim + 1:
        out[2 * g.dim] = src[2 * g.dim]
    return WalkState(geometry=g, coin_dim=state.coin_dim, amps=out)


def walk_step(state: WalkState, coin: CoinSpec, oracle: OracleSpec) -> WalkState:
    """One evolution step: marked coin, then flip-flop shift."""
    return apply_shift(apply_oracle_coin(state, coin, oracle))


def success_probability(state: WalkState, targets: Sequence[int]) -> float:
    """Total probability of measuring the walker at any target vertex."""
    if len(targets) == 0:
        return 0.0
    idx = np.asarray(targets, dtype=np.intp)
    sub = state.amps[:, idx]
    return float(np.sum(sub.real**2 + sub.imag**2))
