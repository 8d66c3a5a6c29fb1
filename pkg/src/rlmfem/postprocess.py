"""Reference solutions, convergence rates, boundary forces, effective moduli and mode reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgumentError
from .fem import FeSpace, field_gradients

UNDEFINED = float("nan")


@dataclass(frozen=True)
class AnalyticAxisym:
    """Centered inclusion of radius ``ri`` inflated by ``ubar`` inside a clamped disc of radius ``R``.

    Outside the inclusion ``u_r = c2 r + c1 / r``; inside, the fictitious
    extension is the linear field ``(ubar / ri) x``.
    """

    R: float = 1.0
    ri: float = 0.2
    ubar: float = 0.1
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.R > self.ri > 0):
            raise ArgumentError(f"need R > ri > 0, got R={self.R}, ri={self.ri}")

    @property
    def c2(self) -> float:
        return -self.ri * self.ubar / (self.R**2 - self.ri**2)

    @property
    def c1(self) -> float:
        return self.ri * self.ubar * self.R**2 / (self.R**2 - self.ri**2)

    def _local(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        p = np.atleast_2d(x) - np.asarray(self.center)
        return p, np.linalg.norm(p, axis=1), single

    def displacement(self, x) -> np.ndarray:
        p, r, single = self._local(x)
        out = (self.ubar / self.ri) * p
        o = r >= self.ri
        out[o] = (self.c2 + self.c1 / r[o] ** 2)[:, None] * p[o]
        return out[0] if single else out

    def gradient(self, x) -> np.ndarray:
        """``g[..., c, d] = d u_c / d x_d`` per branch."""
        p, r, single = self._local(x)
        g = np.broadcast_to((self.ubar / self.ri) * np.eye(2), (len(p), 2, 2)).copy()
        o = r >= self.ri
        po, ro = p[o], r[o]
        g[o] = (self.c2 + self.c1 / ro**2)[:, None, None] * np.eye(2) - 2 * self.c1 * po[:, :, None] * po[:, None, :] / (
            ro**4
        )[:, None, None]
        return g[0] if single else g

    def radial(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.where(r >= self.ri, self.c2 * r + self.c1 / np.where(r > 0, r, 1.0), self.ubar * r / self.ri)

    def traction_jump(self, mu: float, lam: float) -> float:
        """Radial traction jump (exterior minus interior) on the inclusion circle."""
        outer = mu * (self.c2 - self.c1 / self.ri**2) + 2 * lam * self.c2
        inner = (mu + 2 * lam) * self.ubar / self.ri
        return outer - inner


def analytic_axisym(params: AnalyticAxisym, point, gradient: bool = False):
    u = params.displacement(point)
    return (u, params.gradient(point)) if gradient else u


@dataclass(frozen=True)
class ConvergenceRecord:
    level: int
    ndof: int
    h: float
    eL2: float
    eH1: float

    def __post_init__(self):
        if self.eL2 < 0 or self.eH1 < 0 or self.h <= 0:
            raise ArgumentError(f"invalid convergence record {self}")


def _rate(e0: float, e1: float, h0: float, h1: float) -> float:
    if e0 == 0 or e1 == 0:
        return UNDEFINED
    return math.log(e0 / e1) / math.log(h0 / h1)


def eoc(records: Sequence[ConvergenceRecord]) -> list[tuple[float, float]]:
    """``(L2 rate, H1 rate)`` per consecutive pair; ``nan`` marks undefined rates."""
    if len(records) < 2:
        raise ArgumentError("need at least two convergence records")
    hs = [r.h for r in records]
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ArgumentError(f"mesh sizes must strictly decrease, got {hs}")
    return [
        (_rate(a.eL2, b.eL2, a.h, b.h), _rate(a.eH1, b.eH1, a.h, b.h)) for a, b in zip(records, records[1:])
    ]


CONVERGENCE_HEADER = "level,ndof,h,eL2,eH1,rateL2,rateH1"


def convergence_rows(records: Sequence[ConvergenceRecord]) -> list[str]:
    rates = [(UNDEFINED, UNDEFINED)] + (eoc(records) if len(records) > 1 else [])
    return [
        f"{r.level},{r.ndof},{r.h:.17g},{r.eL2:.17g},{r.eH1:.17g},{a:.17g},{b:.17g}"
        for r, (a, b) in zip(records, rates)
    ]


def stress(grad: np.ndarray, mu: float, lam: float) -> np.ndarray:
    """``sigma = mu grad u + lam (div u) I`` for gradients shaped ``(..., 2, 2)``."""
    div = np.trace(grad, axis1=-2, axis2=-1)
    return mu * grad + lam * div[..., None, None] * np.eye(2)


def boundary_stress_integral(space: FeSpace, u: np.ndarray, marker: str, mu: float, lam: float) -> np.ndarray:
    """Force ``(Fx, Fy) = \\int_side sigma(u_h) n`` summed edge by edge.

    Each boundary edge uses the constant stress of its triangle and the
    outward normal of the counter-clockwise boundary.
    """
    mesh = space.mesh
    sel = mesh.boundary_markers == marker
    if not sel.any():
        raise ArgumentError(f"unknown boundary marker {marker!r}")
    sig = stress(field_gradients(space, u), mu, lam)
    edges, t2e = mesh.edge_data
    owner = np.full(len(edges), -1, dtype=np.int64)
    owner[t2e.ravel()] = np.repeat(np.arange(mesh.n_triangles), 3)
    keys = edges[:, 0] * mesh.n_vertices + edges[:, 1]
    be = np.sort(mesh.boundary_edges[sel], axis=1)
    pos = np.searchsorted(keys, be[:, 0] * mesh.n_vertices + be[:, 1])
    tri = owner[pos]
    # orient each edge counter-clockwise with respect to its triangle
    T = mesh.triangles[tri]
    a, b = be[:, 0], be[:, 1]
    ia = (T == a[:, None]).argmax(axis=1)
    forward = T[np.arange(len(T)), (ia + 1) % 3] == b
    p = np.where(forward[:, None], mesh.vertices[a], mesh.vertices[b])
    q = np.where(forward[:, None], mesh.vertices[b], mesh.vertices[a])
    d = q - p
    n_len = np.column_stack([d[:, 1], -d[:, 0]])  # outward normal times edge length
    return np.einsum("ecd,ed->c", sig[tri], n_len)


def area_reduction(alpha: float, area: float = 4.0) -> float:
    """Area lost by a domain under the uniform compression ``u = -alpha x``."""
    return area * (1.0 - (1.0 - alpha) ** 2)


def effective_bulk(side_forces: Sequence[Sequence[float]], delta_area: float, normals: Sequence[Sequence[float]] | None = None) -> float:
    """Sum of absolute normal side forces per unit area change.

    ``normals`` defaults to the outward normals of left, right, bottom, top.
    """
    if delta_area == 0:
        raise ArgumentError("area reduction must be nonzero")
    F = np.asarray(side_forces, dtype=float).reshape(-1, 2)
    n = np.asarray(normals if normals is not None else [(-1, 0), (1, 0), (0, -1), (0, 1)][: len(F)], dtype=float)
    return float(np.abs((F * n).sum(axis=1)).sum() / abs(delta_area))


def effective_shear(top_fx: float, length: float = 2.0) -> float:
    if length <= 0:
        raise ArgumentError(f"edge length must be positive, got {length}")
    return abs(float(top_fx)) / length


def mean_pressure(side_forces: Sequence[Sequence[float]], perimeter: float, normals=None) -> float:
    """Average compressive boundary traction ``-(1/|dOmega|) sum_side F . n``."""
    F = np.asarray(side_forces, dtype=float).reshape(-1, 2)
    n = np.asarray(normals if normals is not None else [(-1, 0), (1, 0), (0, -1), (0, 1)][: len(F)], dtype=float)
    return float(-(F * n).sum() / perimeter)


@dataclass(frozen=True)
class EffectiveModuli:
    vf: float
    forces: dict = field(default_factory=dict)
    kappa_eff: float = UNDEFINED
    mu_eff: float = UNDEFINED


def volume_fraction(n_inclusions: int | Sequence[float], radius: float | None = None, area: float = 4.0) -> float:
    """``m pi r^2 / |Omega|``; pass a radius list for per-inclusion radii."""
    if radius is None:
        r = np.asarray(n_inclusions, dtype=float)
        return float(np.pi * (r**2).sum() / area)
    return float(n_inclusions * np.pi * radius**2 / area)


@dataclass(frozen=True)
class ModeReport:
    """Per-inclusion multiplier energy split; ``nan`` marks an all-zero multiplier."""

    norm: float
    relative: np.ndarray  # |Lambda_k|^2 / ||Lambda||^2 per entry
    rel_m1x: float
    rel_m2y: float
    trunc_error: float

    @property
    def defined(self) -> bool:
        return self.norm > 0


MODE_HEADER = "inclusion,ri,modes,lambda_norm,rel_m1x,rel_m2y,trunc_error"


def mode_report(multipliers) -> ModeReport:
    lam = np.asarray(multipliers, dtype=float).reshape(-1)
    if len(lam) < 4 or len(lam) % 2:
        raise ArgumentError(f"need 2N >= 4 multiplier entries, got {len(lam)}")
    sq = lam**2
    total = float(sq.sum())
    norm = math.sqrt(total)
    if total == 0:
        rel = np.full_like(sq, UNDEFINED)
        return ModeReport(0.0, rel, UNDEFINED, UNDEFINED, UNDEFINED)
    rel = sq / total
    # entry order: (mode 1 x, mode 1 y, mode 2 x, mode 2 y, ...)
    m1x, m2y = float(rel[0]), float(rel[3])
    trunc = min(1.0, max(0.0, 1.0 - (sq[0] + sq[3]) / total))
    return ModeReport(norm, rel, m1x, m2y, trunc)
