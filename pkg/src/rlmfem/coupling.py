"""Circular inclusions, their Fourier multiplier basis and the reduced coupling blocks.

Each inclusion ``j`` with ``N`` modes contributes ``2N`` constraint rows,
ordered ``(mode 1, x), (mode 1, y), (mode 2, x), ...``.  Row ``(i, c)`` is the
averaged integral ``(1/|Gamma|) \\oint phi_i u_c``; the constant mode is left
out, so every row annihilates rigid translations.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ArgumentError, GeometryError, LocationError
from .fem import FeSpace
from .mesh import Mesh, triangle_circle_distance

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class Inclusion:
    """Circle with a normal expansion datum ``gbar`` and ``modes`` multiplier modes."""

    center: tuple[float, float]
    radius: float
    gbar: float = 0.0
    modes: int = 2

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        object.__setattr__(self, "center", c)
        if not (np.isfinite(c).all() and np.isfinite(self.radius) and np.isfinite(self.gbar)):
            raise ArgumentError(f"non-finite inclusion data {self}")
        if self.radius <= 0:
            raise ArgumentError(f"inclusion radius must be positive, got {self.radius}")
        if int(self.modes) != self.modes or self.modes < 2 or self.modes % 2:
            raise ArgumentError(f"mode count must be an even integer >= 2, got {self.modes}")

    @property
    def perimeter(self) -> float:
        return 2.0 * np.pi * self.radius

    @property
    def n_rows(self) -> int:
        return 2 * self.modes


def fourier_mode(i: int, theta):
    """Mean-square-normalised trigonometric mode: 1, sqrt2 cos, sqrt2 sin, sqrt2 cos 2θ, ..."""
    if i < 0:
        raise ArgumentError(f"mode index must be >= 0, got {i}")
    theta = np.asarray(theta, dtype=float)
    if i == 0:
        return np.ones_like(theta)
    k = (i + 1) // 2
    return SQRT2 * (np.cos(k * theta) if i % 2 else np.sin(k * theta))


def mode_table(n_modes: int, theta: np.ndarray) -> np.ndarray:
    """``(n_modes, len(theta))`` values of modes ``1..n_modes``."""
    return np.array([fourier_mode(i, theta) for i in range(1, n_modes + 1)])


def circle_quadrature(inclusion: Inclusion, M: int | None = None, phase: float = 0.0):
    """Trapezoid rule on the inclusion circle.

    Returns ``(points (M, 2), angles (M,), weights (M,))`` with angles
    ``phase + 2 pi q / M`` and equal weights summing to the perimeter.
    """
    if M is None:
        M = max(16, 8 * inclusion.modes)
    if int(M) != M or M < 2 * inclusion.modes + 2:
        raise ArgumentError(f"need at least {2 * inclusion.modes + 2} quadrature points, got {M}")
    M = int(M)
    theta = phase + 2.0 * np.pi * np.arange(M) / M
    cx, cy = inclusion.center
    r = inclusion.radius
    pts = np.column_stack([cx + r * np.cos(theta), cy + r * np.sin(theta)])
    return pts, theta, np.full(M, inclusion.perimeter / M)


def resolved_point_count(inclusion: Inclusion, mesh: Mesh, per_element: int = 4) -> int:
    """Quadrature size giving ``per_element`` points per smallest cut triangle.

    A trapezoid rule coarser than the mesh would turn the line load into
    isolated point loads; the count is rounded up to a multiple of 8.
    """
    dmin, dmax = triangle_circle_distance(mesh.triangle_coords, inclusion.center, inclusion.radius)
    cut = (dmin <= inclusion.radius) & (dmax >= inclusion.radius)
    h = mesh.diameters[cut].min() if cut.any() else mesh.h_max
    m = max(16, 8 * inclusion.modes, int(np.ceil(per_element * inclusion.perimeter / h)))
    return int(8 * np.ceil(m / 8))


def validate_inclusions(inclusions: Sequence[Inclusion], domain=None, margin: float = 0.0) -> None:
    """Reject inclusions that touch each other or leave ``domain``."""
    for j, inc in enumerate(inclusions):
        if domain is not None and not domain.contains_disc(inc.center, inc.radius * (1 + 1e-9), margin):
            raise GeometryError(f"inclusion {j} at {inc.center} (r={inc.radius}) is not inside the domain", j)
    if len(inclusions) < 2:
        return
    c = np.array([inc.center for inc in inclusions])
    r = np.array([inc.radius for inc in inclusions])
    d = np.linalg.norm(c[:, None] - c[None], axis=2)
    gap = d - (r[:, None] + r[None]) - margin
    np.fill_diagonal(gap, np.inf)
    if (gap <= 0).any():
        a, b = np.unravel_index(np.argmin(gap), gap.shape)
        raise GeometryError(f"inclusions {a} and {b} overlap", int(a))


def assemble_coupling(
    space: FeSpace,
    inclusions: Sequence[Inclusion],
    points: int | Sequence[int] | None = None,
    phase: float = 0.0,
) -> sp.csr_matrix:
    """Reduced coupling rows ``B`` of shape ``(sum 2N_j, n_dofs)``.

    ``points`` fixes the quadrature size (one value or one per inclusion);
    by default it is chosen with :func:`resolved_point_count`.
    """
    validate_inclusions(inclusions)
    mesh = space.mesh
    rows, cols, vals = [], [], []
    offset = 0
    for j, inc in enumerate(inclusions):
        if points is None:
            M = resolved_point_count(inc, mesh)
        elif np.ndim(points) == 0:
            M = int(points)
        else:
            M = int(points[j])
        pts, theta, _ = circle_quadrature(inc, M, phase)
        try:
            tri, bary = mesh.locator.locate(pts)
        except LocationError as exc:
            raise GeometryError(f"inclusion {j}: quadrature point {exc.point} outside the mesh", j) from exc
        phi = mode_table(inc.modes, theta) / M  # (N, M); averaged integral weights
        verts = mesh.triangles[tri]  # (M, 3)
        coef = phi[:, :, None] * bary[None]  # (N, M, 3)
        for c in range(2):
            r = offset + 2 * np.arange(inc.modes) + c
            rows.append(np.broadcast_to(r[:, None, None], coef.shape).ravel())
            cols.append(np.broadcast_to(2 * verts + c, coef.shape).ravel())
            vals.append(coef.ravel())
        offset += inc.n_rows
    if offset == 0:
        return sp.csr_matrix((0, space.n_dofs))
    B = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(offset, space.n_dofs)
    ).tocsr()
    B.eliminate_zeros()
    return B


GFunction = Callable[[np.ndarray], np.ndarray]


def assemble_reduced_rhs(
    inclusions: Sequence[Inclusion], g: Sequence[GFunction | None] | None = None
) -> np.ndarray:
    """Reduced data ``G_{j,i,c} = (1/|Gamma_j|) \\oint phi_i g_c``.

    By default ``g = gbar * n``.  A custom ``g[j]`` maps angles ``(M,)`` to
    ``(M, 2)`` boundary displacements; its circle mean must vanish because
    the averaged trace absorbs constants.
    """
    out = []
    for j, inc in enumerate(inclusions):
        M = max(64, 8 * inc.modes)
        _, theta, _ = circle_quadrature(inc, M)
        custom = None if g is None else g[j]
        if custom is None:
            gv = inc.gbar * np.column_stack([np.cos(theta), np.sin(theta)])
        else:
            gv = np.asarray(custom(theta), dtype=float).reshape(M, 2)
            scale = max(1.0, float(np.abs(gv).max()))
            if np.abs(gv.mean(axis=0)).max() > 1e-12 * scale:
                raise ArgumentError(f"inclusion {j}: boundary datum has a nonzero mean and cannot be enforced")
        G = mode_table(inc.modes, theta) @ gv / M  # (N, 2)
        out.append(G.ravel())
    return np.concatenate(out) if out else np.zeros(0)


def reconstruct_traction(inclusion: Inclusion, multipliers, theta):
    """Traction jump ``[[sigma]] n`` at angle(s) ``theta`` recovered from one inclusion's multipliers."""
    lam = np.asarray(multipliers, dtype=float).reshape(inclusion.modes, 2)
    th = np.asarray(theta, dtype=float)
    phi = mode_table(inclusion.modes, np.atleast_1d(th))  # (N, n)
    t = phi.T @ lam / inclusion.perimeter
    return t[0] if th.ndim == 0 else t


def split_multipliers(inclusions: Sequence[Inclusion], lam: np.ndarray) -> list[np.ndarray]:
    """Split the stacked multiplier vector into one ``(2N,)`` block per inclusion."""
    out, k = [], 0
    for inc in inclusions:
        out.append(lam[k : k + inc.n_rows])
        k += inc.n_rows
    return out


def write_inclusions_csv(inclusions: Sequence[Inclusion], target, comment: str | None = None) -> None:
    lines = [] if comment is None else [comment]
    lines.append("cx,cy,radius,gbar")
    lines += [f"{i.center[0]:.17g},{i.center[1]:.17g},{i.radius:.17g},{i.gbar:.17g}" for i in inclusions]
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w") as fh:
            fh.write(text)
    else:
        target.write(text)


def read_inclusions_csv(source, modes: int = 2, domain=None) -> list[Inclusion]:
    """Load ``cx,cy,radius,gbar`` rows (``#`` comment lines allowed) and validate them."""
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            lines = fh.read().splitlines()
    else:
        lines = source.read().splitlines()
    rows = list(csv.DictReader(line for line in lines if line.strip() and not line.startswith("#")))
    incs = [
        Inclusion((float(r["cx"]), float(r["cy"])), float(r["radius"]), float(r.get("gbar") or 0.0), modes)
        for r in rows
    ]
    validate_inclusions(incs, domain)
    return incs
