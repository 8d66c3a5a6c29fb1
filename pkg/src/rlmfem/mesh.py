"""Conforming triangular meshes: generation, refinement and point location.

Triangles are stored counter-clockwise.  Local edge ``e`` of a triangle joins
local vertices ``e`` and ``(e + 1) % 3``; ``refinement_edge[t]`` is the local
index of the edge that newest-vertex bisection splits next.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ArgumentError, LocationError, RlmError

MARKERS = ("left", "right", "bottom", "top", "arc")

MarkSpec = Union[np.ndarray, Sequence[bool], Callable[[np.ndarray], np.ndarray]]


class MeshError(RlmError):
    """A mesh violates one of its structural invariants."""


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangulation with boundary markers and refinement data.

    Attributes
    ----------
    vertices : (nv, 2) float array
    triangles : (nt, 3) int array, counter-clockwise
    boundary_edges : (nb, 2) int array, oriented with the domain on the left
    boundary_markers : (nb,) str array, one of :data:`MARKERS`
    refinement_edge : (nt,) int array with values in {0, 1, 2}
    arc_radius : radius of the origin-centred circle that ``arc`` edges
        approximate, or None for straight boundaries
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_markers: np.ndarray
    refinement_edge: np.ndarray
    arc_radius: float | None = None

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def triangle_coords(self) -> np.ndarray:
        """(nt, 3, 2) vertex coordinates per triangle."""
        return self.vertices[self.triangles]

    @cached_property
    def signed_areas(self) -> np.ndarray:
        p = self.triangle_coords
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @cached_property
    def edge_data(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique edges ``(ne, 2)`` (sorted pairs) and triangle-to-edge map ``(nt, 3)``."""
        return _unique_edges(self.triangles, self.n_vertices)

    @property
    def edges(self) -> np.ndarray:
        return self.edge_data[0]

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]], axis=1)

    @cached_property
    def diameters(self) -> np.ndarray:
        """Longest edge of each triangle."""
        return self.edge_lengths[self.edge_data[1]].max(axis=1)

    @property
    def h_max(self) -> float:
        return float(self.diameters.max())

    @cached_property
    def locator(self) -> "PointLocator":
        return PointLocator(self)

    def boundary_vertices(self, marker: str | None = None) -> np.ndarray:
        sel = self.boundary_edges
        if marker is not None:
            sel = sel[self.boundary_markers == marker]
        return np.unique(sel)

    def area(self) -> float:
        return float(self.signed_areas.sum())


def _edge_keys(a: np.ndarray, b: np.ndarray, base: int) -> np.ndarray:
    lo = np.minimum(a, b).astype(np.int64)
    hi = np.maximum(a, b).astype(np.int64)
    return lo * base + hi


def _unique_edges(triangles: np.ndarray, nv: int) -> tuple[np.ndarray, np.ndarray]:
    a = triangles
    b = np.roll(triangles, -1, axis=1)
    keys = _edge_keys(a, b, nv).ravel()
    uniq, inv = np.unique(keys, return_inverse=True)
    edges = np.stack([uniq // nv, uniq % nv], axis=1)
    return edges, inv.reshape(-1, 3)


def _longest_edge(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p = vertices[triangles]
    lengths = np.linalg.norm(np.roll(p, -1, axis=1) - p, axis=2)
    # argmax returns the lowest local index on ties
    return np.argmax(lengths - 1e-12 * np.arange(3), axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def generate_rect_mesh(xmin: float, xmax: float, ymin: float, ymax: float, n: int) -> Mesh:
    """Structured ``n x n`` grid of a rectangle, each cell split lower-left to upper-right."""
    if not (np.isfinite([xmin, xmax, ymin, ymax]).all() and xmin < xmax and ymin < ymax):
        raise ArgumentError(f"invalid rectangle bounds ({xmin}, {xmax}, {ymin}, {ymax})")
    if int(n) != n or n < 1:
        raise ArgumentError(f"subdivision count must be a positive integer, got {n}")
    n = int(n)
    xs = np.linspace(xmin, xmax, n + 1)
    ys = np.linspace(ymin, ymax, n + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (n + 1) + i

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    i = i.ravel()
    j = j.ravel()
    v00, v10, v11, v01 = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper
    refedge = np.tile(np.array([2, 0], dtype=np.int64), n * n)

    k = np.arange(n)
    bottom = np.column_stack([vid(k, 0), vid(k + 1, 0)])
    right = np.column_stack([vid(n, k), vid(n, k + 1)])
    top = np.column_stack([vid(n - k, n), vid(n - k - 1, n)])
    left = np.column_stack([vid(0, n - k), vid(0, n - k - 1)])
    bedges = np.vstack([bottom, right, top, left]).astype(np.int64)
    markers = np.array(["bottom"] * n + ["right"] * n + ["top"] * n + ["left"] * n)
    return Mesh(vertices, triangles, bedges, markers, refedge)


def generate_disc_mesh(R: float, n_rings: int, n_sectors: int) -> Mesh:
    """Graded polar triangulation of the disc of radius ``R`` centred at the origin.

    Ring ``j`` (``j = 1..n_rings``) sits at radius ``R j / n_rings`` and carries
    ``j * n_sectors`` equally spaced vertices, so the centre fan has
    ``n_sectors`` triangles and all triangles have comparable size.
    """
    if not (np.isfinite(R) and R > 0):
        raise ArgumentError(f"radius must be positive, got {R}")
    if int(n_rings) != n_rings or n_rings < 1 or int(n_sectors) != n_sectors or n_sectors < 3:
        raise ArgumentError(f"need n_rings >= 1 and n_sectors >= 3, got {n_rings}, {n_sectors}")
    n_rings = int(n_rings)
    n_sectors = int(n_sectors)

    coords = [np.zeros((1, 2))]
    ring_start = [0]
    offset = 1
    for j in range(1, n_rings + 1):
        count = j * n_sectors
        theta = 2.0 * np.pi * np.arange(count) / count
        rad = R * j / n_rings
        ring = np.column_stack([rad * np.cos(theta), rad * np.sin(theta)])
        if j == n_rings:
            ring /= np.linalg.norm(ring, axis=1)[:, None] / R
        coords.append(ring)
        ring_start.append(offset)
        offset += count
    vertices = np.vstack(coords)

    tris: list[tuple[int, int, int]] = []
    s1 = ring_start[1]
    for k in range(n_sectors):
        tris.append((0, s1 + k, s1 + (k + 1) % n_sectors))
    for j in range(2, n_rings + 1):
        n_in, n_out = (j - 1) * n_sectors, j * n_sectors
        si, so = ring_start[j - 1], ring_start[j]
        a = b = 0
        # merge the two rings by angle; exact rationals avoid round-off ties
        while a < n_in or b < n_out:
            next_in = (a + 1) * n_out
            next_out = (b + 1) * n_in
            if b < n_out and (a >= n_in or next_out <= next_in):
                tris.append((si + a % n_in, so + b, so + (b + 1) % n_out))
                b += 1
            else:
                tris.append((si + a, so + b % n_out, si + (a + 1) % n_in))
                a += 1
    triangles = np.array(tris, dtype=np.int64)
    p = vertices[triangles]
    area = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    flip = area < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]

    so = ring_start[n_rings]
    n_out = n_rings * n_sectors
    k = np.arange(n_out)
    bedges = np.column_stack([so + k, so + (k + 1) % n_out]).astype(np.int64)
    markers = np.array(["arc"] * n_out)
    return Mesh(vertices, triangles, bedges, markers, _longest_edge(vertices, triangles), float(R))


@dataclass(frozen=True)
class RectDomain:
    xmin: float = -1.0
    xmax: float = 1.0
    ymin: float = -1.0
    ymax: float = 1.0

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def contains_disc(self, center, r: float, margin: float = 0.0) -> bool:
        x, y = center
        m = r + margin
        return self.xmin + m < x < self.xmax - m and self.ymin + m < y < self.ymax - m

    def mesh(self, n: int) -> Mesh:
        return generate_rect_mesh(self.xmin, self.xmax, self.ymin, self.ymax, n)


@dataclass(frozen=True)
class DiscDomain:
    radius: float = 1.0

    @property
    def area(self) -> float:
        return float(np.pi * self.radius**2)

    def contains_disc(self, center, r: float, margin: float = 0.0) -> bool:
        return float(np.hypot(*center)) + r + margin < self.radius

    def mesh(self, n_rings: int, n_sectors: int) -> Mesh:
        return generate_disc_mesh(self.radius, n_rings, n_sectors)


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------

def _midpoints(mesh: Mesh, edge_ids: np.ndarray) -> np.ndarray:
    edges = mesh.edges[edge_ids]
    mid = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    if mesh.arc_radius is not None and len(edge_ids):
        arc = mesh.boundary_edges[mesh.boundary_markers == "arc"]
        arc_keys = np.sort(_edge_keys(arc[:, 0], arc[:, 1], mesh.n_vertices))
        keys = _edge_keys(edges[:, 0], edges[:, 1], mesh.n_vertices)
        pos = np.searchsorted(arc_keys, keys)
        on_arc = (pos < len(arc_keys)) & (arc_keys[np.minimum(pos, len(arc_keys) - 1)] == keys)
        r = np.linalg.norm(mid[on_arc], axis=1)
        mid[on_arc] *= (mesh.arc_radius / r)[:, None]
    return mid


def refine_uniform(mesh: Mesh) -> Mesh:
    """Red refinement: every triangle is split into four similar children.

    Children keep a refinement edge parallel to their parent's, so a
    compatible bisection labelling stays compatible.
    """
    edges, t2e = mesh.edge_data
    nv = mesh.n_vertices
    new_vertices = np.vstack([mesh.vertices, _midpoints(mesh, np.arange(len(edges)))])
    T = mesh.triangles
    m0, m1, m2 = (nv + t2e[:, k] for k in range(3))
    a, b, c = T[:, 0], T[:, 1], T[:, 2]
    children = np.stack(
        [
            np.column_stack([a, m0, m2]),
            np.column_stack([m0, b, m1]),
            np.column_stack([m2, m1, c]),
            np.column_stack([m0, m1, m2]),
        ],
        axis=1,
    ).reshape(-1, 3)
    e = mesh.refinement_edge
    refedge = np.stack([e, e, e, (e + 1) % 3], axis=1).ravel()

    bkeys = _edge_keys(mesh.boundary_edges[:, 0], mesh.boundary_edges[:, 1], nv)
    ekeys = _edge_keys(edges[:, 0], edges[:, 1], nv)
    bmid = nv + np.searchsorted(ekeys, bkeys)
    i, j = mesh.boundary_edges[:, 0], mesh.boundary_edges[:, 1]
    bedges = np.stack([np.column_stack([i, bmid]), np.column_stack([bmid, j])], axis=1).reshape(-1, 2)
    markers = np.repeat(mesh.boundary_markers, 2)
    return Mesh(new_vertices, children.astype(np.int64), bedges, markers, refedge, mesh.arc_radius)


def _resolve_mark(mesh: Mesh, mark: MarkSpec) -> np.ndarray:
    if callable(mark):
        mask = np.asarray(mark(mesh.triangle_coords), dtype=bool)
    else:
        mask = np.asarray(mark, dtype=bool)
    if mask.shape != (mesh.n_triangles,):
        raise ArgumentError(f"mark must give one flag per triangle, got shape {mask.shape}")
    return mask


def refine_local(mesh: Mesh, mark: MarkSpec) -> Mesh:
    """Newest-vertex bisection of the marked triangles plus conforming closure.

    Each marked triangle has all three edges bisected (four children with
    halved edges when the refinement edge is the longest); the closure then
    bisects neighbours along their refinement edges until no hanging nodes
    remain.  ``mark`` is a boolean mask over triangles or a callable taking
    the ``(nt, 3, 2)`` triangle coordinates and returning such a mask.
    """
    mask = _resolve_mark(mesh, mark)
    if not mask.any():
        return mesh
    edges, t2e = mesh.edge_data
    nt = mesh.n_triangles
    marked = np.zeros(len(edges), dtype=bool)
    marked[t2e[mask].ravel()] = True
    ref_ids = t2e[np.arange(nt), mesh.refinement_edge]
    for _ in range(10 * nt + 1):
        pending = marked[t2e].any(axis=1) & ~marked[ref_ids]
        if not pending.any():
            break
        marked[ref_ids[pending]] = True
    else:  # pragma: no cover - closure is monotone on a finite edge set
        raise MeshError("newest-vertex closure did not terminate")

    nv = mesh.n_vertices
    split_ids = np.flatnonzero(marked)
    mid_index = np.full(len(edges), -1, dtype=np.int64)
    mid_index[split_ids] = nv + np.arange(len(split_ids))
    new_vertices = np.vstack([mesh.vertices, _midpoints(mesh, split_ids)])
    base = len(new_vertices)
    old_keys = _edge_keys(edges[:, 0], edges[:, 1], base)

    def midpoint_of(p, q):
        keys = _edge_keys(p, q, base)
        pos = np.minimum(np.searchsorted(old_keys, keys), len(old_keys) - 1)
        hit = old_keys[pos] == keys
        return np.where(hit, mid_index[pos], -1)

    done_t, done_r = [], []
    tri = mesh.triangles.copy()
    ref = mesh.refinement_edge.copy()
    while len(tri):
        idx = np.arange(len(tri))
        p = tri[idx, ref]
        q = tri[idx, (ref + 1) % 3]
        o = tri[idx, (ref + 2) % 3]
        m = midpoint_of(p, q)
        keep = m < 0
        done_t.append(tri[keep])
        done_r.append(ref[keep])
        s = ~keep
        p, q, o, m = p[s], q[s], o[s], m[s]
        # child (p, m, o) bisects edge o-p next (local 2); child (m, q, o) edge q-o (local 1)
        tri = np.vstack([np.column_stack([p, m, o]), np.column_stack([m, q, o])])
        ref = np.concatenate([np.full(len(p), 2), np.full(len(p), 1)]).astype(np.int64)
    triangles = np.vstack(done_t)
    refedge = np.concatenate(done_r)

    bi, bj = mesh.boundary_edges[:, 0], mesh.boundary_edges[:, 1]
    bm = midpoint_of(bi, bj)
    out_edges, out_markers = [], []
    for (i, j), mk, mid in zip(mesh.boundary_edges, mesh.boundary_markers, bm):
        if mid < 0:
            out_edges.append((i, j))
            out_markers.append(mk)
        else:
            out_edges.extend([(i, mid), (mid, j)])
            out_markers.extend([mk, mk])
    return Mesh(
        new_vertices,
        triangles.astype(np.int64),
        np.array(out_edges, dtype=np.int64),
        np.array(out_markers),
        refedge.astype(np.int64),
        mesh.arc_radius,
    )


def triangle_circle_distance(coords: np.ndarray, center, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Nearest and farthest distance from ``center`` to each triangle.

    Returns ``(dmin, dmax)``; a triangle meets the annulus
    ``|x - center| in [r0, r1]`` iff ``dmin <= r1`` and ``dmax >= r0``.
    """
    c = np.asarray(center, dtype=float)
    p = coords - c
    dmax = np.linalg.norm(p, axis=2).max(axis=1)
    a, b = p, np.roll(p, -1, axis=1)
    d = b - a
    t = np.clip(-(a * d).sum(axis=2) / np.maximum((d * d).sum(axis=2), 1e-300), 0.0, 1.0)
    closest = a + t[..., None] * d
    dmin = np.linalg.norm(closest, axis=2).min(axis=1)
    cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    inside = (cross >= 0).all(axis=1) | (cross <= 0).all(axis=1)
    dmin[inside] = 0.0
    return dmin, dmax


def circle_band_marker(circles: Sequence[tuple[Sequence[float], float]], width_factor: float = 0.0):
    """Predicate marking triangles within ``width_factor * diameter`` of any circle."""

    def mark(coords: np.ndarray) -> np.ndarray:
        diam = np.linalg.norm(np.roll(coords, -1, axis=1) - coords, axis=2).max(axis=1)
        w = width_factor * diam
        out = np.zeros(len(coords), dtype=bool)
        for center, r in circles:
            dmin, dmax = triangle_circle_distance(coords, center, r)
            out |= (dmin <= r + w) & (dmax >= r - w)
        return out

    return mark


# ---------------------------------------------------------------------------
# point location
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointLocation:
    triangle: int
    barycentric: tuple[float, float, float]


class PointLocator:
    """Uniform bucket grid over triangle bounding boxes.

    The bucket size defaults to the mean edge length of the mesh.  Points on
    shared edges or vertices resolve to the lowest containing triangle index.
    """

    BARY_TOL = 1e-12
    DIST_TOL = 1e-10

    def __init__(self, mesh: Mesh, cell_size: float | None = None, max_cells: int = 4_000_000):
        self.mesh = mesh
        P = mesh.triangle_coords
        self._origin = P[:, 0]
        e1 = P[:, 1] - P[:, 0]
        e2 = P[:, 2] - P[:, 0]
        det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        # rows map (x - p0) to (lambda1, lambda2)
        self._inv = np.stack(
            [np.column_stack([e2[:, 1], -e2[:, 0]]), np.column_stack([-e1[:, 1], e1[:, 0]])], axis=1
        ) / det[:, None, None]

        lo = P.min(axis=1) - self.DIST_TOL
        hi = P.max(axis=1) + self.DIST_TOL
        self._lo = lo.min(axis=0)
        extent = hi.max(axis=0) - self._lo
        h = float(cell_size or mesh.edge_lengths.mean())
        h = max(h, float(np.sqrt(extent[0] * extent[1] / max_cells)))
        self._h = h
        self._n = np.maximum(np.ceil(extent / h).astype(np.int64), 1)
        i0 = self._cell_index(lo)
        i1 = self._cell_index(hi)
        w = i1[:, 0] - i0[:, 0] + 1
        counts = w * (i1[:, 1] - i0[:, 1] + 1)
        tri = np.repeat(np.arange(len(P)), counts)
        k = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        wr = np.repeat(w, counts)
        cx = np.repeat(i0[:, 0], counts) + k % wr
        cy = np.repeat(i0[:, 1], counts) + k // wr
        cells = cy * self._n[0] + cx
        order = np.lexsort((tri, cells))
        self._cell_tris = tri[order]
        self._cell_ptr = np.searchsorted(cells[order], np.arange(self._n.prod() + 1))

    def _cell_index(self, x: np.ndarray) -> np.ndarray:
        idx = np.floor((x - self._lo) / self._h).astype(np.int64)
        return np.clip(idx, 0, self._n - 1)

    def _bary(self, tris: np.ndarray, pts: np.ndarray) -> np.ndarray:
        d = pts - self._origin[tris]
        l12 = np.einsum("nij,nj->ni", self._inv[tris], d)
        return np.column_stack([1.0 - l12.sum(axis=1), l12])

    def _candidates(self, cells: np.ndarray):
        start = self._cell_ptr[cells]
        counts = self._cell_ptr[cells + 1] - start
        owner = np.repeat(np.arange(len(cells)), counts)
        k = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        return owner, self._cell_tris[np.repeat(start, counts) + k]

    def locate(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Locate ``(n, 2)`` points; returns triangle indices and ``(n, 3)`` barycentrics."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(pts)
        tri_out = np.full(n, -1, dtype=np.int64)
        bary_out = np.zeros((n, 3))
        ci = self._cell_index(pts)
        cells = ci[:, 1] * self._n[0] + ci[:, 0]
        owner, tris = self._candidates(cells)
        if len(owner):
            bary = self._bary(tris, pts[owner])
            ok = bary.min(axis=1) >= -self.BARY_TOL
            hit_owner = owner[ok]
            # candidates are sorted by triangle within a cell: first hit is the lowest index
            first_owner, first = np.unique(hit_owner, return_index=True)
            sel = np.flatnonzero(ok)[first]
            tri_out[first_owner] = tris[sel]
            bary_out[first_owner] = bary[sel]
        missing = np.flatnonzero(tri_out < 0)
        for i in missing:
            t, b = self._locate_near(pts[i])
            tri_out[i] = t
            bary_out[i] = b
        return tri_out, bary_out

    def _locate_near(self, x: np.ndarray):
        """Fallback for points within DIST_TOL of the mesh but outside every triangle."""
        c = self._cell_index(x[None])[0]
        nb = [
            (c[1] + dy) * self._n[0] + c[0] + dx
            for dy in (-1, 0, 1)
            for dx in (-1, 0, 1)
            if 0 <= c[0] + dx < self._n[0] and 0 <= c[1] + dy < self._n[1]
        ]
        _, tris = self._candidates(np.array(nb, dtype=np.int64))
        tris = np.unique(tris)
        if len(tris) == 0:
            raise LocationError(x)
        coords = self.mesh.triangle_coords[tris]
        a, b = coords, np.roll(coords, -1, axis=1)
        d = b - a
        t = np.clip(((x - a) * d).sum(axis=2) / (d * d).sum(axis=2), 0.0, 1.0)
        dist = np.linalg.norm(a + t[..., None] * d - x, axis=2).min(axis=1)
        k = int(np.argmin(dist))
        if dist[k] > self.DIST_TOL:
            raise LocationError(x)
        bary = np.clip(self._bary(tris[k : k + 1], x[None])[0], 0.0, None)
        return int(tris[k]), bary / bary.sum()


def locate_point(mesh: Mesh, point) -> PointLocation:
    """Containing triangle and barycentric coordinates of a single point."""
    tri, bary = mesh.locator.locate(np.asarray(point, dtype=float)[None])
    return PointLocation(int(tri[0]), tuple(float(v) for v in bary[0]))


# ---------------------------------------------------------------------------
# validation and I/O
# ---------------------------------------------------------------------------

def check_mesh(mesh: Mesh) -> None:
    """Raise :class:`MeshError` unless positivity, conformity and boundary closure hold."""
    if (mesh.signed_areas <= 0).any():
        raise MeshError(f"{int((mesh.signed_areas <= 0).sum())} triangles with non-positive area")
    edges, t2e = mesh.edge_data
    share = np.bincount(t2e.ravel(), minlength=len(edges))
    if (share > 2).any():
        raise MeshError("edge shared by more than two triangles")
    open_edges = edges[share == 1]
    b = mesh.boundary_edges
    bkeys = np.sort(_edge_keys(b[:, 0], b[:, 1], mesh.n_vertices))
    okeys = np.sort(_edge_keys(open_edges[:, 0], open_edges[:, 1], mesh.n_vertices))
    if len(bkeys) != len(okeys) or (bkeys != okeys).any():
        raise MeshError("boundary edges do not match the edges owned by a single triangle (hanging node?)")
    if not set(np.unique(mesh.boundary_markers)) <= set(MARKERS):
        raise MeshError("unknown boundary marker")
    # closed polygon: every boundary vertex has one incoming and one outgoing edge
    if (np.bincount(b[:, 0], minlength=mesh.n_vertices) != np.bincount(b[:, 1], minlength=mesh.n_vertices)).any():
        raise MeshError("boundary is not a closed polygon")


def dump_mesh(mesh: Mesh, target) -> None:
    """Write the plain-text mesh format to a path or text stream."""
    lines = [f"vertices {mesh.n_vertices} triangles {mesh.n_triangles} edges {len(mesh.boundary_edges)}"]
    lines += [f"{x:.17g} {y:.17g}" for x, y in mesh.vertices]
    lines += [f"{i} {j} {k} {r}" for (i, j, k), r in zip(mesh.triangles, mesh.refinement_edge)]
    lines += [f"{i} {j} {m}" for (i, j), m in zip(mesh.boundary_edges, mesh.boundary_markers)]
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w") as fh:
            fh.write(text)
    else:
        target.write(text)


def load_mesh(source) -> Mesh:
    """Read the format written by :func:`dump_mesh`."""
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            text = fh.read()
    else:
        text = source.read()
    stream = io.StringIO(text)
    head = stream.readline().split()
    if len(head) != 6 or head[0::2] != ["vertices", "triangles", "edges"]:
        raise MeshError(f"bad mesh header: {' '.join(head)}")
    nv, nt, nb = int(head[1]), int(head[3]), int(head[5])
    rows = [stream.readline().split() for _ in range(nv + nt + nb)]
    vertices = np.array([[float(a), float(b)] for a, b in rows[:nv]]).reshape(nv, 2)
    tri = np.array([[int(c) for c in r] for r in rows[nv : nv + nt]], dtype=np.int64).reshape(nt, 4)
    bed = rows[nv + nt :]
    bedges = np.array([[int(r[0]), int(r[1])] for r in bed], dtype=np.int64).reshape(nb, 2)
    markers = np.array([r[2] for r in bed])
    arc_radius = None
    if (markers == "arc").any():
        arc_radius = float(np.linalg.norm(vertices[np.unique(bedges[markers == "arc"])], axis=1).mean())
    return Mesh(vertices, tri[:, :3].copy(), bedges, markers, tri[:, 3].copy(), arc_radius)
