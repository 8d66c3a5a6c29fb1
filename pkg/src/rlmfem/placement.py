"""Inclusion layouts for the homogenisation studies.

Every generator keeps a gap of ``MARGIN * r`` between discs and between a
disc and the domain boundary.  Random layouts use ``numpy.random.default_rng``
(PCG64) seeded with the given integer, so a seed reproduces its layout
exactly within a build.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import Inclusion
from .errors import ArgumentError, PlacementError
from .mesh import RectDomain

MARGIN = 0.01
TWO_DENSITY_CORES = (3, 5, 7, 9, 11)


@dataclass(frozen=True)
class PlacementResult:
    inclusions: tuple[Inclusion, ...]
    vf: float
    attempts: int
    seed: int | None = None

    @property
    def m(self) -> int:
        return len(self.inclusions)

    @property
    def centers(self) -> np.ndarray:
        return np.array([i.center for i in self.inclusions]).reshape(-1, 2)


def _result(domain: RectDomain, centers, r: float, gbar: float, modes: int, attempts: int, seed) -> PlacementResult:
    incs = tuple(Inclusion((float(x), float(y)), r, gbar, modes) for x, y in centers)
    vf = len(incs) * math.pi * r * r / domain.area
    return PlacementResult(incs, vf, attempts, seed)


def grid_shape(m) -> tuple[int, int]:
    """``(nx, ny)`` for a perfect square ``m`` or an explicit pair."""
    if np.ndim(m) == 1:
        nx, ny = (int(v) for v in m)
    else:
        k = math.isqrt(int(m))
        if k * k != int(m):
            raise ArgumentError(f"m={m} is not a perfect square; pass grid dimensions (nx, ny)")
        nx = ny = k
    if nx < 1 or ny < 1:
        raise ArgumentError(f"grid dimensions must be positive, got {(nx, ny)}")
    return nx, ny


def _boxes(domain: RectDomain, nx: int, ny: int, r: float):
    wx = (domain.xmax - domain.xmin) / nx
    wy = (domain.ymax - domain.ymin) / ny
    need = 2 * r * (1 + MARGIN)
    if min(wx, wy) <= need:
        raise PlacementError(f"{nx}x{ny} boxes of size {wx:.4g}x{wy:.4g} cannot hold discs of radius {r}", 0)
    x0 = domain.xmin + wx * np.arange(nx)
    y0 = domain.ymin + wy * np.arange(ny)
    X, Y = np.meshgrid(x0, y0, indexing="xy")
    return X.ravel(), Y.ravel(), wx, wy


def place_structured(domain: RectDomain, m, r: float, gbar: float = 0.1, modes: int = 2) -> PlacementResult:
    """Inclusions at the centres of a uniform ``nx x ny`` box grid (row by row from the bottom)."""
    if r <= 0:
        raise ArgumentError(f"radius must be positive, got {r}")
    nx, ny = grid_shape(m)
    X, Y, wx, wy = _boxes(domain, nx, ny, r)
    return _result(domain, np.column_stack([X + wx / 2, Y + wy / 2]), r, gbar, modes, 1, None)


def place_semistructured(domain: RectDomain, m, r: float, gbar: float = 0.1, seed: int = 0, modes: int = 2) -> PlacementResult:
    """One inclusion per grid box, uniform inside the box shrunk by ``r (1 + MARGIN)``."""
    if r <= 0:
        raise ArgumentError(f"radius must be positive, got {r}")
    nx, ny = grid_shape(m)
    X, Y, wx, wy = _boxes(domain, nx, ny, r)
    rng = np.random.default_rng(seed)
    s = r * (1 + MARGIN)
    u = rng.random((len(X), 2))
    cx = X + s + u[:, 0] * (wx - 2 * s)
    cy = Y + s + u[:, 1] * (wy - 2 * s)
    return _result(domain, np.column_stack([cx, cy]), r, gbar, modes, 1, seed)


def place_random(
    domain: RectDomain, m: int, r: float, gbar: float = 0.1, seed: int = 0, max_attempts: int = 100_000, modes: int = 2
) -> PlacementResult:
    """Rejection sampling: accept uniform centres that keep the margins until ``m`` are placed."""
    if r <= 0 or m < 0:
        raise ArgumentError(f"need r > 0 and m >= 0, got r={r}, m={m}")
    rng = np.random.default_rng(seed)
    s = r * (1 + MARGIN)
    lo = np.array([domain.xmin + s, domain.ymin + s])
    hi = np.array([domain.xmax - s, domain.ymax - s])
    if (hi <= lo).any():
        raise PlacementError(f"domain cannot hold a disc of radius {r}", 0)
    sep2 = (2 * r + MARGIN * r) ** 2
    centers = np.empty((m, 2))
    k = attempts = 0
    while k < m:
        if attempts >= max_attempts:
            raise PlacementError(f"placed only {k} of {m} inclusions in {max_attempts} attempts", k)
        c = lo + rng.random(2) * (hi - lo)
        attempts += 1
        if k and (((centers[:k] - c) ** 2).sum(axis=1) < sep2).any():
            continue
        centers[k] = c
        k += 1
    return _result(domain, centers, r, gbar, modes, attempts, seed)


def place_two_density(
    domain: RectDomain | None = None, core: int = 3, gbar: float = 0.01, r: float = 0.05, modes: int = 2
) -> PlacementResult:
    """Twelve sparse inclusions around a dense ``core x core`` block.

    The sparse ring is the perimeter of a 4x4 grid with centres at
    ``+-0.25, +-0.75``; the core fills ``[-0.6, 0.6]^2`` with box centres.
    Coordinates scale with the domain, which defaults to ``[-1, 1]^2``.
    """
    domain = domain or RectDomain()
    if core not in TWO_DENSITY_CORES:
        raise ArgumentError(f"core grid must be one of {TWO_DENSITY_CORES}, got {core}")
    ticks = np.array([-0.75, -0.25, 0.25, 0.75])
    outer = [(x, y) for y in ticks for x in ticks if max(abs(x), abs(y)) > 0.5]
    w = 1.2 / core
    inner_ticks = -0.6 + w * (np.arange(core) + 0.5)
    inner = [(x, y) for y in inner_ticks for x in inner_ticks]
    unit = np.array(outer + inner)
    cx, cy = (domain.xmin + domain.xmax) / 2, (domain.ymin + domain.ymax) / 2
    sx, sy = (domain.xmax - domain.xmin) / 2, (domain.ymax - domain.ymin) / 2
    centers = np.column_stack([cx + sx * unit[:, 0], cy + sy * unit[:, 1]])
    res = _result(domain, centers, r, gbar, modes, 1, None)
    check_layout(res, domain)
    return res


def check_layout(result: PlacementResult, domain: RectDomain) -> None:
    """Raise :class:`PlacementError` if discs overlap or leave the domain (with margins)."""
    c = result.centers
    for j, inc in enumerate(result.inclusions):
        if not domain.contains_disc(inc.center, inc.radius, MARGIN * inc.radius * (1 - 1e-9)):
            raise PlacementError(f"inclusion {j} violates the wall margin", j)
    if len(c) > 1:
        r = np.array([i.radius for i in result.inclusions])
        d = np.linalg.norm(c[:, None] - c[None], axis=2)
        need = r[:, None] + r[None] + MARGIN * np.minimum(r[:, None], r[None]) * (1 - 1e-9)
        np.fill_diagonal(d, np.inf)
        if (d < need).any():
            raise PlacementError("inclusions violate the separation margin", len(c))
