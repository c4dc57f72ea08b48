"""Geometry of d-dimensional periodic lattices (rings and tori).

Vertices of a ``side**dim`` torus are flattened row-major with axis 0
slowest, so coordinates ``(x0, x1, ..., x_{d-1})`` map to the index
``((x0*side + x1)*side + ...) + x_{d-1}``. This layout is the canonical
one for every state vector, target list and CSV column in the package.

Each vertex carries ``2*dim`` edge directions (a +/- pair per axis) plus,
optionally, one self-loop. Directions are ordered axis by axis with the
positive sign first and the self-loop last.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "LatticeGeometry",
    "Direction",
    "SELF_LOOP",
    "make_geometry",
    "coin_directions",
    "vertex_index",
    "vertex_coords",
    "neighbor",
]

# Keep side**dim addressable as a signed 64-bit index.
_MAX_VERTICES = 2**62


@dataclass(frozen=True)
class LatticeGeometry:
    """A periodic lattice with ``side`` vertices along each of ``dim`` axes."""

    dim: int
    side: int
    n_vertices: int


@dataclass(frozen=True)
class Direction:
    """One coin direction: a signed step along an axis, or the self-loop.

    The self-loop is the distinguished direction with ``sign == 0`` (and
    ``axis == -1``); edge directions have ``sign`` +1 or -1.
    """

    axis: int
    sign: int

    @property
    def is_loop(self) -> bool:
        return self.sign == 0


SELF_LOOP = Direction(axis=-1, sign=0)


def make_geometry(dim: int, side: int) -> LatticeGeometry:
    """Build the geometry for a ``side**dim``-vertex torus.

    Raises ValueError for ``dim < 1``, ``side < 2``, or a vertex count
    too large to index.
    """
    if dim < 1:
        raise ValueError(f"lattice dimension must be >= 1, got {dim}")
    if side < 2:
        raise ValueError(f"side length must be >= 2, got {side}")
    n = side**dim
    if n > _MAX_VERTICES:
        raise ValueError(f"side**dim = {n} exceeds the index limit {_MAX_VERTICES}")
    return LatticeGeometry(dim=dim, side=side, n_vertices=n)


def coin_directions(dim: int, with_loop: bool) -> tuple[Direction, ...]:
    """Canonical direction order: (axis 0, +), (axis 0, -), ..., then the loop."""
    dirs: list[Direction] = []
    for axis in range(dim):
        dirs.append(Direction(axis, +1))
        dirs.append(Direction(axis, -1))
    if with_loop:
        dirs.append(SELF_LOOP)
    return tuple(dirs)


def vertex_index(g: LatticeGeometry, coords: Sequence[int]) -> int:
    """Row-major index of a coordinate tuple (axis 0 slowest)."""
    if len(coords) != g.dim:
        raise ValueError(f"expected {g.dim} coordinates, got {len(coords)}")
    idx = 0
    for c in coords:
        if not 0 <= c < g.side:
            raise ValueError(f"coordinate {c} out of range [0, {g.side})")
        idx = idx * g.side + c
    return idx


def vertex_coords(g: LatticeGeometry, index: int) -> tuple[int, ...]:
    """Inverse of :func:`vertex_index`."""
    if not 0 <= index < g.n_vertices:
        raise ValueError(f"vertex index {index} out of range [0, {g.n_vertices})")
    coords = [0] * g.dim
    for axis in range(g.dim - 1, -1, -1):
        index, coords[axis] = divmod(index, g.side)
    return tuple(coords)


def neighbor(g: LatticeGeometry, v: int, direction: Direction) -> int:
    """Vertex reached from ``v`` along ``direction``, wrapping periodically.

    The self-loop direction returns ``v`` unchanged.
    """
    if direction.is_loop:
        if not 0 <= v < g.n_vertices:
            raise ValueError(f"vertex index {v} out of range [0, {g.n_vertices})")
        return v
    coords = list(vertex_coords(g, v))
    if not 0 <= direction.axis < g.dim:
        raise ValueError(f"axis {direction.axis} out of range [0, {g.dim})")
    coords[direction.axis] = (coords[direction.axis] + direction.sign) % g.side
    return vertex_index(g, coords)
