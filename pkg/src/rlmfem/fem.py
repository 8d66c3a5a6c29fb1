"""Vector P1 finite elements for the elasticity form ``mu grad u : grad v + lam div u div v``.

Degrees of freedom are vertex-major: vertex ``v`` owns dofs ``2v`` (x) and
``2v + 1`` (y).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ArgumentError
from .mesh import Mesh, triangle_circle_distance

VectorFn = Callable[[np.ndarray], np.ndarray]

# degree-2 rule, barycentric points and weights (sum 1)
QUAD3_POINTS = np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]])
QUAD3_WEIGHTS = np.full(3, 1 / 3)

# degree-4 Dunavant rule
_A1, _B1, _W1 = 0.445948490915965, 0.108103018168070, 0.223381589678011
_A2, _B2, _W2 = 0.091576213509771, 0.816847572980459, 0.109951743655322
QUAD6_POINTS = np.array(
    [
        [_B1, _A1, _A1],
        [_A1, _B1, _A1],
        [_A1, _A1, _B1],
        [_B2, _A2, _A2],
        [_A2, _B2, _A2],
        [_A2, _A2, _B2],
    ]
)
QUAD6_WEIGHTS = np.array([_W1, _W1, _W1, _W2, _W2, _W2])


@dataclass(frozen=True, eq=False)
class FeSpace:
    """Vector P1 space on a mesh with optional Dirichlet constraints."""

    mesh: Mesh
    fixed: np.ndarray
    values: np.ndarray

    @property
    def n_dofs(self) -> int:
        return 2 * self.mesh.n_vertices

    @property
    def free(self) -> np.ndarray:
        return ~self.fixed

    @staticmethod
    def vertex_dofs(v: int) -> tuple[int, int]:
        return 2 * v, 2 * v + 1

    def lifting(self) -> np.ndarray:
        """Field equal to the prescribed values on constrained dofs and zero elsewhere."""
        return np.where(self.fixed, self.values, 0.0)


def build_space(mesh: Mesh) -> FeSpace:
    n = 2 * mesh.n_vertices
    return FeSpace(mesh, np.zeros(n, dtype=bool), np.zeros(n))


def p1_gradients(mesh: Mesh) -> np.ndarray:
    """Constant shape-function gradients, shape ``(nt, 3, 2)``."""
    p = mesh.triangle_coords
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    g1 = np.column_stack([e2[:, 1], -e2[:, 0]]) / det[:, None]
    g2 = np.column_stack([-e1[:, 1], e1[:, 0]]) / det[:, None]
    return np.stack([-g1 - g2, g1, g2], axis=1)


def _element_dofs(mesh: Mesh) -> np.ndarray:
    t = mesh.triangles
    return np.stack([2 * t, 2 * t + 1], axis=2).reshape(-1, 6)


def assemble_stiffness(space: FeSpace, mu: float, lam: float) -> sp.csr_matrix:
    """Global stiffness matrix (before any constraint is applied)."""
    if not (np.isfinite(mu) and mu > 0):
        raise ArgumentError(f"mu must be positive, got {mu}")
    if not (np.isfinite(lam) and lam >= 0):
        raise ArgumentError(f"lambda must be non-negative, got {lam}")
    mesh = space.mesh
    G = p1_gradients(mesh)
    area = mesh.signed_areas
    lap = np.einsum("tai,tbi->tab", G, G)
    eye = np.eye(2)
    K = mu * lap[:, :, None, :, None] * eye[None, None, :, None, :]
    K = K + lam * G[:, :, :, None, None] * G[:, None, None, :, :]
    K = (K * area[:, None, None, None, None]).reshape(-1, 6, 6)
    dofs = _element_dofs(mesh)
    rows = np.repeat(dofs, 6, axis=1).ravel()
    cols = np.tile(dofs, (1, 6)).ravel()
    A = sp.coo_matrix((K.ravel(), (rows, cols)), shape=(space.n_dofs, space.n_dofs)).tocsr()
    A.eliminate_zeros()
    return A


def _as_vector_fn(f) -> VectorFn:
    if callable(f):
        return f
    const = np.asarray(f, dtype=float).reshape(2)
    return lambda x: np.broadcast_to(const, (len(x), 2))


def assemble_load(space: FeSpace, f) -> np.ndarray:
    """Load vector ``(f, v)``; ``f`` is a constant 2-vector or a callable on ``(n, 2)`` points."""
    fn = _as_vector_fn(f)
    mesh = space.mesh
    p = mesh.triangle_coords
    pts = np.einsum("qa,tai->tqi", QUAD3_POINTS, p).reshape(-1, 2)
    fv = np.asarray(fn(pts), dtype=float).reshape(mesh.n_triangles, len(QUAD3_WEIGHTS), 2)
    # local[t, a, c] = area * sum_q w_q f_c(x_q) phi_a(x_q)
    local = np.einsum("q,qa,tqc->tac", QUAD3_WEIGHTS, QUAD3_POINTS, fv) * mesh.signed_areas[:, None, None]
    return np.bincount(_element_dofs(mesh).ravel(), weights=local.ravel(), minlength=space.n_dofs)


def apply_dirichlet(space: FeSpace, boundary_fn: Callable[[str, np.ndarray], Sequence[float] | None]) -> FeSpace:
    """Constrain boundary vertices for which ``boundary_fn(marker, x)`` returns a displacement.

    Vertices on several sides (corners) take the first non-None value met.
    """
    mesh = space.mesh
    fixed = space.fixed.copy()
    values = space.values.copy()
    seen = np.zeros(mesh.n_vertices, dtype=bool)
    for (i, j), marker in zip(mesh.boundary_edges, mesh.boundary_markers):
        for v in (i, j):
            if seen[v]:
                continue
            val = boundary_fn(str(marker), mesh.vertices[v])
            if val is None:
                continue
            val = np.asarray(val, dtype=float).reshape(2)
            if not np.isfinite(val).all():
                raise ArgumentError(f"non-finite Dirichlet value {val} at vertex {v}")
            seen[v] = True
            fixed[2 * v : 2 * v + 2] = True
            values[2 * v : 2 * v + 2] = val
    return replace(space, fixed=fixed, values=values)


def zero_bc(marker: str, x: np.ndarray):
    return (0.0, 0.0)


def shear_bc(marker: str, x: np.ndarray):
    """Simple shear ``u = (y, 0)``."""
    return (x[1], 0.0)


def compression_bc(alpha: float):
    """Uniform compression ``u = -alpha (x, y)``; area shrinks by ``1 - (1 - alpha)**2``."""

    def bc(marker: str, x: np.ndarray):
        return (-alpha * x[0], -alpha * x[1])

    return bc


def interpolate(space: FeSpace, fn: VectorFn) -> np.ndarray:
    """Nodal interpolant of a vector function."""
    return np.asarray(fn(space.mesh.vertices), dtype=float).reshape(-1)


def evaluate_field(space: FeSpace, u: np.ndarray, points) -> np.ndarray:
    """Evaluate a P1 field at one point ``(2,)`` or many ``(n, 2)``."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    tri, bary = space.mesh.locator.locate(np.atleast_2d(pts))
    nodal = u.reshape(-1, 2)[space.mesh.triangles[tri]]
    out = np.einsum("na,nac->nc", bary, nodal)
    return out[0] if single else out


def field_gradients(space: FeSpace, u: np.ndarray) -> np.ndarray:
    """Per-triangle gradient ``grad[t, c, d] = d u_c / d x_d``."""
    G = p1_gradients(space.mesh)
    nodal = u.reshape(-1, 2)[space.mesh.triangles]
    return np.einsum("tac,tad->tcd", nodal, G)


def _subdivided_rule(levels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite degree-4 rule on ``4**levels`` congruent sub-triangles (barycentric)."""
    tris = np.eye(3)[None]
    for _ in range(levels):
        a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
        ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
        tris = np.concatenate(
            [np.stack(t, axis=1) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]
        )
    pts = np.einsum("qk,skj->sqj", QUAD6_POINTS, tris).reshape(-1, 3)
    w = np.tile(QUAD6_WEIGHTS, len(tris)) / len(tris)
    return pts, w


def error_norms(
    space: FeSpace,
    u_h: np.ndarray,
    exact: VectorFn,
    exact_grad: Callable[[np.ndarray], np.ndarray],
    kinks: Sequence[tuple[Sequence[float], float]] | None = None,
    kink_levels: int = 3,
) -> tuple[float, float]:
    """L2 error and H1-seminorm error against an exact solution.

    ``exact`` maps ``(n, 2)`` points to ``(n, 2)`` values and ``exact_grad``
    to ``(n, 2, 2)`` gradients.  Triangles crossed by one of the circles in
    ``kinks`` (where the exact gradient jumps) use a composite rule on
    ``4**kink_levels`` sub-triangles.
    """
    mesh = space.mesh
    cut = np.zeros(mesh.n_triangles, dtype=bool)
    for center, r in kinks or ():
        dmin, dmax = triangle_circle_distance(mesh.triangle_coords, center, r)
        cut |= (dmin < r) & (dmax > r)
    grad_h = field_gradients(space, u_h)
    l2 = h1 = 0.0
    for sel, (qp, qw) in ((~cut, (QUAD6_POINTS, QUAD6_WEIGHTS)), (cut, _subdivided_rule(kink_levels))):
        idx = np.flatnonzero(sel)
        if len(idx) == 0:
            continue
        nq = len(qw)
        p = mesh.triangle_coords[idx]
        x = np.einsum("qa,tai->tqi", qp, p).reshape(-1, 2)
        nodal = u_h.reshape(-1, 2)[mesh.triangles[idx]]
        uh = np.einsum("qa,tac->tqc", qp, nodal)
        ue = np.asarray(exact(x), dtype=float).reshape(len(idx), nq, 2)
        ge = np.asarray(exact_grad(x), dtype=float).reshape(len(idx), nq, 2, 2)
        wa = qw[None, :] * mesh.signed_areas[idx, None]
        l2 += float((wa * ((ue - uh) ** 2).sum(axis=2)).sum())
        h1 += float((wa * ((ge - grad_h[idx, None]) ** 2).sum(axis=(2, 3))).sum())
    return float(np.sqrt(l2)), float(np.sqrt(h1))


def write_nodal_csv(space: FeSpace, u: np.ndarray, target, comment: str | None = None) -> None:
    """CSV ``x,y,ux,uy`` with one row per vertex."""
    lines = [] if comment is None else [comment]
    lines.append("x,y,ux,uy")
    uv = u.reshape(-1, 2)
    lines += [f"{x:.17g},{y:.17g},{a:.17g},{b:.17g}" for (x, y), (a, b) in zip(space.mesh.vertices, uv)]
    _write_text(target, "\n".join(lines) + "\n")


def write_vtk(space: FeSpace, u: np.ndarray, target) -> None:
    """Legacy ASCII VTK unstructured grid with a ``displacement`` point vector."""
    mesh = space.mesh
    out = ["# vtk DataFile Version 3.0", "rlmfem displacement", "ASCII", "DATASET UNSTRUCTURED_GRID"]
    out.append(f"POINTS {mesh.n_vertices} double")
    out += [f"{x:.17g} {y:.17g} 0" for x, y in mesh.vertices]
    out.append(f"CELLS {mesh.n_triangles} {4 * mesh.n_triangles}")
    out += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    out.append(f"CELL_TYPES {mesh.n_triangles}")
    out += ["5"] * mesh.n_triangles
    out.append(f"POINT_DATA {mesh.n_vertices}")
    out.append("VECTORS displacement double")
    out += [f"{a:.17g} {b:.17g} 0" for a, b in u.reshape(-1, 2)]
    _write_text(target, "\n".join(out) + "\n")


def _write_text(target, text: str) -> None:
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w") as fh:
            fh.write(text)
    else:
        target.write(text)
