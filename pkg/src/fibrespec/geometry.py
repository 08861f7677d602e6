"""Discretized manifolds, fibred domains and model-fiber volume functions.

Three kinds of discrete objects live here:

* :class:`Grid1D` -- uniform grids on a circle or an interval, used for the
  one-dimensional bases of every fibred example.
* :class:`MeshManifold` -- simplicial meshes (segments or triangles) carrying
  either an induced metric (embedded coordinates) or per-cell chart metrics.
* :class:`ProductMesh` -- structured tensor grids ``base x fiber`` with the
  warped metric ``ds^2 + rho(s)^2 g_F``.  These are never triangulated; the
  assembly module works on them through Kronecker products.

The volume helpers (:func:`cap_volume`, :func:`ball_volume` and their
inverses) define the model fibers used by the rearrangement operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from fibrespec.errors import MeshError, ValidationError

MIN_GRID_NODES = 8
MIN_TUBE_RESOLUTION = 8

_QUAD_EPSABS = 1e-12
_QUAD_EPSREL = 1e-13
_INVERT_TOL = 1e-12


# ---------------------------------------------------------------------------
# one-dimensional grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on a circle of length ``length`` or on ``[start, start+length]``.

    A circle grid with ``n`` intervals has ``n`` nodes (the node at
    ``start + length`` is identified with ``start``); an interval grid has
    ``n + 1`` nodes and its two end nodes form ``boundary_nodes``.
    """

    nodes: np.ndarray
    spacing: float
    topology: str
    length: float
    start: float = 0.0
    boundary_nodes: tuple = ()

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def closed(self) -> bool:
        return self.topology == "circle"

    def weights(self) -> np.ndarray:
        """Lumped (dual-cell) lengths of the nodes."""
        w = np.full(self.n, self.spacing)
        if not self.closed:
            w[0] = w[-1] = 0.5 * self.spacing
        return w

    def sample(self, func: Callable | Sequence[float] | float) -> np.ndarray:
        """Evaluate a callable at the nodes, or validate a per-node array."""
        return _sample(func, self.nodes)


def _sample(func, nodes):
    if callable(func):
        values = np.asarray(func(nodes), dtype=float)
        if values.ndim == 0:
            values = np.full(len(nodes), float(values))
    else:
        values = np.asarray(func, dtype=float)
        if values.ndim == 0:
            values = np.full(len(nodes), float(values))
    if values.shape != (len(nodes),):
        raise ValidationError(
            f"expected {len(nodes)} per-node values, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise ValidationError("per-node values must be finite")
    return values


def make_circle_grid(length: float, n: int) -> Grid1D:
    """Uniform grid of ``n`` nodes on the circle of the given length."""
    if not length > 0:
        raise ValidationError(f"circle length must be positive, got {length}")
    if int(n) != n or n < MIN_GRID_NODES:
        raise ValidationError(f"circle grid needs n >= {MIN_GRID_NODES}, got {n}")
    n = int(n)
    h = length / n
    return Grid1D(nodes=h * np.arange(n), spacing=h, topology="circle", length=float(length))


def make_interval_grid(a: float, b: float, n: int) -> Grid1D:
    """Uniform grid with ``n`` intervals (``n + 1`` nodes) on ``[a, b]``."""
    if not b > a:
        raise ValidationError(f"need a < b, got [{a}, {b}]")
    if int(n) != n or n < MIN_GRID_NODES:
        raise ValidationError(f"interval grid needs n >= {MIN_GRID_NODES}, got {n}")
    n = int(n)
    h = (b - a) / n
    nodes = a + h * np.arange(n + 1)
    return Grid1D(nodes=nodes, spacing=h, topology="interval", length=float(b - a),
                  start=float(a), boundary_nodes=(0, n))


# ---------------------------------------------------------------------------
# simplicial meshes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeshManifold:
    """Simplicial discretization of a Riemannian 1-, 2- or 3-manifold.

    ``vertices`` holds coordinates: embedding coordinates when ``metric`` is
    None (induced metric), chart coordinates otherwise, in which case
    ``metric[c]`` is the symmetric positive-definite chart metric on cell
    ``c``.  ``period`` gives, per coordinate, the period of a periodic chart
    direction (or None); edge vectors are wrapped accordingly.

    ``boundary_vertices`` are the vertices eliminated by Dirichlet conditions.
    ``lumped_volume`` is the barycentric dual volume of each vertex.
    """

    vertices: np.ndarray
    cells: np.ndarray
    boundary_vertices: np.ndarray
    cell_volume: np.ndarray
    lumped_volume: np.ndarray
    metric: np.ndarray | None = None
    period: tuple | None = None
    kind: str = "generic"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def dim(self) -> int:
        """Intrinsic dimension (1 for segments, 2 for triangles, 3 for tetrahedra)."""
        return self.cells.shape[1] - 1

    @property
    def closed(self) -> bool:
        return len(self.boundary_vertices) == 0

    @property
    def total_volume(self) -> float:
        return float(math.fsum(self.cell_volume))


def edge_vectors(vertices, cells, period=None):
    """Edge vectors ``x_k - x_0`` of every cell, shape (nc, coord_dim, dim)."""
    x = np.asarray(vertices, dtype=float)
    base = x[cells[:, 0]]
    vecs = x[cells[:, 1:]] - base[:, None, :]
    if period is not None:
        for axis, p in enumerate(period):
            if p:
                d = vecs[:, :, axis]
                vecs[:, :, axis] = d - p * np.round(d / p)
    return np.transpose(vecs, (0, 2, 1))


def cell_gram(vertices, cells, metric=None, period=None):
    """Gram matrices ``J^T g J`` and Riemannian volumes of all cells."""
    J = edge_vectors(vertices, cells, period)
    if metric is None:
        G = np.einsum("cik,cil->ckl", J, J)
    else:
        G = np.einsum("cik,cij,cjl->ckl", J, metric, J)
    d = G.shape[1]
    det = np.linalg.det(G) if d > 1 else G[:, 0, 0]
    vol = np.sqrt(np.clip(det, 0.0, None)) / math.factorial(d)
    return G, vol


def boundary_of(cells: np.ndarray) -> np.ndarray:
    """Vertices lying on boundary facets (facets used by exactly one cell)."""
    cells = np.asarray(cells)
    k = cells.shape[1]
    if k == 2:
        facets = cells.reshape(-1, 1)
    elif k == 3:
        facets = np.concatenate([cells[:, [0, 1]], cells[:, [1, 2]], cells[:, [2, 0]]])
        facets = np.sort(facets, axis=1)
    elif k == 4:
        facets = np.concatenate([cells[:, [1, 2, 3]], cells[:, [0, 2, 3]],
                                 cells[:, [0, 1, 3]], cells[:, [0, 1, 2]]])
        facets = np.sort(facets, axis=1)
    else:
        raise MeshError(f"unsupported cell size {k}")
    uniq, counts = np.unique(facets, axis=0, return_counts=True)
    return np.unique(uniq[counts == 1].ravel())


def mesh_from_cells(vertices, cells, *, metric=None, period=None, boundary=None,
                    kind="generic", meta=None) -> MeshManifold:
    """Build a :class:`MeshManifold`, computing volumes and (by default) boundary."""
    vertices = np.ascontiguousarray(vertices, dtype=float)
    if vertices.ndim == 1:
        vertices = vertices[:, None]
    cells = np.ascontiguousarray(cells, dtype=np.int64)
    if cells.ndim != 2 or cells.shape[1] not in (2, 3, 4):
        raise MeshError("cells must be segments, triangles or tetrahedra")
    if cells.size and (cells.min() < 0 or cells.max() >= len(vertices)):
        raise MeshError("cell index out of range")
    if metric is not None:
        metric = np.asarray(metric, dtype=float)
    _, vol = cell_gram(vertices, cells, metric, period)
    lumped = np.zeros(len(vertices))
    np.add.at(lumped, cells.ravel(), np.repeat(vol / cells.shape[1], cells.shape[1]))
    if boundary is None:
        boundary = boundary_of(cells)
    return MeshManifold(
        vertices=vertices,
        cells=cells,
        boundary_vertices=np.asarray(sorted(set(int(b) for b in boundary)), dtype=np.int64),
        cell_volume=vol,
        lumped_volume=lumped,
        metric=metric,
        period=None if period is None else tuple(period),
        kind=kind,
        meta=dict(meta or {}),
    )


def grid_as_mesh(grid: Grid1D) -> MeshManifold:
    """The segment mesh of a one-dimensional grid."""
    n = grid.n
    if grid.closed:
        cells = np.column_stack([np.arange(n), (np.arange(n) + 1) % n])
        return mesh_from_cells(grid.nodes[:, None], cells, period=(grid.length,),
                               boundary=(), kind="circle")
    cells = np.column_stack([np.arange(n - 1), np.arange(1, n)])
    return mesh_from_cells(grid.nodes[:, None], cells, kind="interval")


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

_PHI = (1.0 + math.sqrt(5.0)) / 2.0
_ICO_VERTICES = np.array([
    [-1.0, _PHI, 0.0], [1.0, _PHI, 0.0], [-1.0, -_PHI, 0.0], [1.0, -_PHI, 0.0],
    [0.0, -1.0, _PHI], [0.0, 1.0, _PHI], [0.0, -1.0, -_PHI], [0.0, 1.0, -_PHI],
    [_PHI, 0.0, -1.0], [_PHI, 0.0, 1.0], [-_PHI, 0.0, -1.0], [-_PHI, 0.0, 1.0],
])
_ICO_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def make_icosphere(subdivisions: int, radius: float = 1.0) -> MeshManifold:
    """Subdivided icosahedron projected onto the sphere of the given radius.

    Every level splits each triangle into four through edge midpoints, so the
    mesh has ``10 * 4**subdivisions + 2`` vertices.
    """
    if int(subdivisions) != subdivisions or subdivisions < 0:
        raise ValidationError(f"subdivisions must be a non-negative integer, got {subdivisions}")
    if not radius > 0:
        raise ValidationError(f"radius must be positive, got {radius}")
    verts = _ICO_VERTICES / np.linalg.norm(_ICO_VERTICES, axis=1, keepdims=True)
    faces = _ICO_FACES.copy()
    for _ in range(int(subdivisions)):
        edges = np.sort(np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]), axis=1)
        uniq, inverse = np.unique(edges, axis=0, return_inverse=True)
        mids = verts[uniq[:, 0]] + verts[uniq[:, 1]]
        mids /= np.linalg.norm(mids, axis=1, keepdims=True)
        nv = len(verts)
        verts = np.vstack([verts, mids])
        inverse = inverse.ravel()
        nf = len(faces)
        m01, m12, m20 = (nv + inverse[k * nf:(k + 1) * nf] for k in range(3))
        a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
        faces = np.concatenate([
            np.column_stack([a, m01, m20]),
            np.column_stack([b, m12, m01]),
            np.column_stack([c, m20, m12]),
            np.column_stack([m01, m12, m20]),
        ])
    return mesh_from_cells(radius * verts, faces, boundary=(), kind="sphere",
                           meta={"radius": float(radius), "subdivisions": int(subdivisions)})


def _quad_strip_cells(n_cols: int, n_rows: int, periodic: bool) -> np.ndarray:
    """Triangles of a column-major structured grid, each quad split along one diagonal.

    Vertex ``(i, j)`` has index ``i * n_rows + j``; with ``periodic`` the last
    column connects back to the first.
    """
    cols = np.arange(n_cols if periodic else n_cols - 1)
    i0 = cols[:, None]
    i1 = ((cols + 1) % n_cols)[:, None]
    j = np.arange(n_rows - 1)[None, :]
    v00 = (i0 * n_rows + j).ravel()
    v10 = (i1 * n_rows + j).ravel()
    v11 = (i1 * n_rows + j + 1).ravel()
    v01 = (i0 * n_rows + j + 1).ravel()
    return np.concatenate([np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])])


@dataclass(frozen=True)
class Hole:
    """Circular hole of radius ``radius`` centred at ``(s, q)`` in a tube chart."""

    s: float
    q: float
    radius: float


def make_tube_domain(base: Grid1D, half_width, resolution: int, *, center=0.0,
                     holes: Sequence[Hole] = ()) -> MeshManifold:
    """Boundary-fitted strip ``{(s, q) : |q - c(s)| < w(s)}`` in ``S^1 x R``.

    Each base node carries a column of ``resolution + 1`` nodes spanning the
    fiber interval; neighbouring columns are joined by quads split along a
    diagonal.  Circular ``holes`` are cut out by snapping the column nodes
    nearest to the hole's chord ends onto the exact chord ends and removing
    the cells inside; the snapped nodes and everything between them become
    boundary vertices.

    ``meta["columns"]`` maps each (base node, row) to its vertex index (or -1
    for removed vertices); :func:`fiber_volumes` uses it.
    """
    if not base.closed:
        raise ValidationError("tube domains need a circle base")
    if int(resolution) != resolution or resolution < MIN_TUBE_RESOLUTION:
        raise ValidationError(
            f"tube resolution must be an integer >= {MIN_TUBE_RESOLUTION}, got {resolution}")
    resolution = int(resolution)
    w = base.sample(half_width)
    if np.any(w <= 0):
        raise ValidationError("tube half-width must be positive everywhere")
    c = base.sample(center)
    n, rows = base.n, resolution + 1
    t = -1.0 + 2.0 * np.arange(rows) / resolution
    q = c[:, None] + w[:, None] * t[None, :]
    in_hole = np.zeros((n, rows), dtype=np.int64) - 1
    delta = 2.0 * w / resolution
    for h_id, hole in enumerate(holes):
        if not hole.radius > 0:
            raise ValidationError("hole radius must be positive")
        ds = (base.nodes - hole.s + 0.5 * base.length) % base.length - 0.5 * base.length
        for i in np.nonzero(np.abs(ds) < hole.radius)[0]:
            a = math.sqrt(hole.radius ** 2 - ds[i] ** 2)
            lo, hi = hole.q - a, hole.q + a
            if lo <= q[i, 0] + delta[i] or hi >= q[i, -1] - delta[i]:
                raise ValidationError("hole must lie strictly inside the tube")
            j_lo = int(np.argmin(np.abs(q[i, 1:-1] - lo))) + 1
            j_hi = int(np.argmin(np.abs(q[i, 1:-1] - hi))) + 1
            if np.any(in_hole[i, j_lo:j_hi + 1] >= 0):
                raise ValidationError("holes overlap")
            if j_lo == j_hi:
                q[i, j_lo] = hole.q
            else:
                q[i, j_lo], q[i, j_hi] = lo, hi
            in_hole[i, j_lo:j_hi + 1] = h_id
    verts = np.column_stack([np.repeat(base.nodes, rows), q.ravel()])
    cells = _quad_strip_cells(n, rows, periodic=True)
    flat = in_hole.ravel()
    hole_of_cell = flat[cells]
    drop = (hole_of_cell[:, 0] >= 0) & (hole_of_cell[:, 0] == hole_of_cell[:, 1]) & (
        hole_of_cell[:, 0] == hole_of_cell[:, 2])
    cells = cells[~drop]
    used = np.zeros(len(verts), dtype=bool)
    used[cells.ravel()] = True
    new_index = np.full(len(verts), -1, dtype=np.int64)
    new_index[used] = np.arange(used.sum())
    cells = new_index[cells]
    hole_vertices = new_index[(flat >= 0) & used]
    boundary = set(boundary_of(cells).tolist()) | set(hole_vertices.tolist())
    meta = {
        "columns": new_index.reshape(n, rows),
        "base": base,
        "half_width": w,
        "center": c,
        "holes": tuple(holes),
    }
    return mesh_from_cells(verts[used], cells, period=(base.length, None), boundary=boundary,
                           kind="tube", meta=meta)


def make_rectangle_mesh(width: float, height: float, nx: int, ny: int) -> MeshManifold:
    """Triangulated rectangle ``[0, width] x [0, height]`` with ``nx * ny`` quads."""
    if not (width > 0 and height > 0):
        raise ValidationError("rectangle sides must be positive")
    if nx < 1 or ny < 1:
        raise ValidationError("need at least one cell per direction")
    x = np.linspace(0.0, width, nx + 1)
    y = np.linspace(0.0, height, ny + 1)
    verts = np.column_stack([np.repeat(x, ny + 1), np.tile(y, nx + 1)])
    cells = _quad_strip_cells(nx + 1, ny + 1, periodic=False)
    return mesh_from_cells(verts, cells, kind="rectangle")


def _ring_disk(rings: int):
    """Unit-disk triangulation by concentric rings of ``6 k`` nodes."""
    if int(rings) != rings or rings < 1:
        raise ValidationError(f"rings must be a positive integer, got {rings}")
    rings = int(rings)
    pts = [np.zeros((1, 2))]
    starts = [0]
    for k in range(1, rings + 1):
        ang = 2.0 * np.pi * np.arange(6 * k) / (6 * k)
        pts.append((k / rings) * np.column_stack([np.cos(ang), np.sin(ang)]))
        starts.append(starts[-1] + (1 if k == 1 else 6 * (k - 1)))
    tris = []
    for k in range(1, rings + 1):
        outer, n_out = starts[k], 6 * k
        if k == 1:
            for a in range(6):
                tris.append((0, outer + a, outer + (a + 1) % 6))
            continue
        inner, n_in = starts[k - 1], 6 * (k - 1)
        # walk both rings by angle, emitting one triangle per step
        a = b = 0
        while a < n_out or b < n_in:
            ta = (a + 1) / n_out
            tb = (b + 1) / n_in
            if b >= n_in or (a < n_out and ta <= tb):
                tris.append((inner + b % n_in, outer + a, outer + (a + 1) % n_out))
                a += 1
            else:
                tris.append((inner + b, outer + a % n_out, inner + (b + 1) % n_in))
                b += 1
    return np.vstack(pts), np.asarray(tris, dtype=np.int64)


def make_disk_mesh(radius: float, rings: int) -> MeshManifold:
    """Euclidean disk of the given radius, centred at the origin."""
    if not radius > 0:
        raise ValidationError("disk radius must be positive")
    pts, tris = _ring_disk(rings)
    return mesh_from_cells(radius * pts, tris, kind="disk", meta={"radius": float(radius)})


def make_poincare_disk(geodesic_radius: float, rings: int) -> MeshManifold:
    """Hyperbolic disk of the given geodesic radius in Poincare-ball coordinates.

    Vertices are Euclidean chart coordinates; each cell carries the conformal
    metric ``(2 / (1 - |x|^2))^2 I`` evaluated at its centroid.
    """
    if not geodesic_radius > 0:
        raise ValidationError("hyperbolic radius must be positive")
    pts, tris = _ring_disk(rings)
    pts = math.tanh(0.5 * geodesic_radius) * pts
    cen = pts[tris].mean(axis=1)
    factor = (2.0 / (1.0 - np.sum(cen ** 2, axis=1))) ** 2
    metric = factor[:, None, None] * np.eye(2)[None, :, :]
    return mesh_from_cells(pts, tris, metric=metric, kind="hyperbolic_disk",
                           meta={"geodesic_radius": float(geodesic_radius)})


def _prism_tets(tris: np.ndarray, n_layers: int, layer_size: int) -> np.ndarray:
    """Split the prisms ``tri x [layer, layer+1]`` (periodic in layers) into tetrahedra.

    Triangle corners are sorted first, so every quad face is cut by the
    diagonal from its lower-index bottom corner to its higher-index top
    corner and neighbouring prisms conform.
    """
    a, b, c = np.sort(tris, axis=1).T
    tets = []
    for i in range(n_layers):
        lo, hi = i * layer_size, ((i + 1) % n_layers) * layer_size
        tets.append(np.column_stack([a + lo, b + lo, c + lo, c + hi]))
        tets.append(np.column_stack([a + lo, b + lo, b + hi, c + hi]))
        tets.append(np.column_stack([a + lo, a + hi, b + hi, c + hi]))
    return np.vstack(tets)


def make_band_domain(base: Grid1D, radius, rings: int, *, model: str = "spherical",
                     fiber_radius: float = 1.0, tilt=0.0) -> MeshManifold:
    """Boundary-fitted band ``{(s, q) : dist(q, c(s)) < radius(s)}`` over a circle.

    ``model="spherical"``: the fiber is the round 2-sphere of radius
    ``fiber_radius`` and each slice is a geodesic cap of geodesic radius
    ``radius(s)``, centred at the south pole rotated by ``tilt(s)`` radians
    about the x axis.  ``model="euclidean"``: each slice is a flat disk of
    radius ``radius(s)`` centred at ``(tilt(s), 0)``.

    A ring triangulation of the unit disk is mapped onto every slice and
    consecutive slices are joined by prisms split into tetrahedra.  Vertices
    are embedding coordinates ``(s, x, y[, z])`` with ``s`` periodic; the
    outer ring of every slice forms the boundary.
    """
    if not base.closed:
        raise ValidationError("band domains need a circle base")
    r = base.sample(radius)
    alpha = base.sample(tilt)
    if np.any(r <= 0):
        raise ValidationError("band radius must be positive everywhere")
    pts, tris = _ring_disk(rings)
    rho_ref = np.hypot(pts[:, 0], pts[:, 1])
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    n, k = base.n, len(pts)
    layers = []
    if model == "spherical":
        if not fiber_radius > 0:
            raise ValidationError("fiber radius must be positive")
        if np.any(r >= math.pi * fiber_radius):
            raise ValidationError("cap radius must stay below pi * fiber_radius")
        for i in range(n):
            theta = (r[i] / fiber_radius) * rho_ref
            x = np.sin(theta) * np.cos(phi)
            y = np.sin(theta) * np.sin(phi)
            z = -np.cos(theta)
            ca, sa = math.cos(alpha[i]), math.sin(alpha[i])
            xyz = fiber_radius * np.column_stack([x, ca * y - sa * z, sa * y + ca * z])
            layers.append(np.column_stack([np.full(k, base.nodes[i]), xyz]))
    elif model == "euclidean":
        for i in range(n):
            xy = r[i] * pts + np.array([alpha[i], 0.0])
            layers.append(np.column_stack([np.full(k, base.nodes[i]), xy]))
    else:
        raise ValidationError(f"unknown band model {model!r}")
    verts = np.vstack(layers)
    cells = _prism_tets(tris, n, k)
    rim = np.nonzero(np.isclose(rho_ref, 1.0))[0]
    boundary = (np.arange(n)[:, None] * k + rim[None, :]).ravel()
    period = (base.length,) + (None,) * (verts.shape[1] - 1)
    meta = {"base": base, "radius": r, "tilt": alpha, "model": model,
            "fiber_radius": float(fiber_radius), "rings": int(rings)}
    return mesh_from_cells(verts, cells, period=period, boundary=boundary, kind="band", meta=meta)


def make_interval_mesh(half_length: float, n: int) -> MeshManifold:
    """Segment mesh of ``[-half_length, half_length]`` (the m = 1 Euclidean disk)."""
    grid = make_interval_grid(-half_length, half_length, n)
    mesh = grid_as_mesh(grid)
    return MeshManifold(**{**mesh.__dict__, "kind": "interval",
                           "meta": {"half_length": float(half_length)}})


# ---------------------------------------------------------------------------
# structured warped products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductMesh:
    """Structured grid on ``base x fiber`` with metric ``ds^2 + warp(s)^2 g_F``.

    Node ``(i, v)`` (base node ``i``, fiber vertex ``v``) has flat index
    ``i * n_fiber + v``.  ``boundary_vertices`` are the nodes eliminated by
    Dirichlet conditions: the product of boundaries, plus every node outside
    the subdomain when the grid has been restricted with
    :func:`restrict_product`.
    """

    base: Grid1D
    fiber: MeshManifold
    warp: np.ndarray
    boundary_vertices: np.ndarray
    kind: str = "product"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def fiber_dim(self) -> int:
        return self.fiber.dim

    @property
    def n_fiber(self) -> int:
        return self.fiber.n_vertices

    @property
    def n_vertices(self) -> int:
        return self.base.n * self.fiber.n_vertices

    @property
    def shape(self) -> tuple:
        return (self.base.n, self.fiber.n_vertices)

    @property
    def closed(self) -> bool:
        return len(self.boundary_vertices) == 0

    @property
    def lumped_volume(self) -> np.ndarray:
        w = self.base.weights() * self.warp ** self.fiber_dim
        return np.kron(w, self.fiber.lumped_volume)

    @property
    def total_volume(self) -> float:
        w = self.base.weights() * self.warp ** self.fiber_dim
        return float(math.fsum(w) * math.fsum(self.fiber.cell_volume))


def make_product_mesh(base: Grid1D, fiber: Grid1D | MeshManifold, warp=1.0) -> ProductMesh:
    """Warped product grid ``base x_rho fiber``; closed iff both factors are closed."""
    rho = base.sample(warp)
    if np.any(rho <= 0):
        raise ValidationError("warp must be strictly positive")
    if isinstance(fiber, Grid1D):
        fiber = grid_as_mesh(fiber)
    nf = fiber.n_vertices
    bnd = set()
    for i in base.boundary_nodes:
        bnd.update(range(i * nf, (i + 1) * nf))
    if len(fiber.boundary_vertices):
        offs = np.arange(base.n)[:, None] * nf
        bnd.update((offs + fiber.boundary_vertices[None, :]).ravel().tolist())
    return ProductMesh(base=base, fiber=fiber, warp=rho,
                       boundary_vertices=np.asarray(sorted(bnd), dtype=np.int64))


def restrict_product(mesh: ProductMesh, inside) -> ProductMesh:
    """Mark every node with ``inside == False`` for Dirichlet elimination.

    ``inside`` is a boolean array of shape ``(n_base, n_fiber)``.  The
    resulting discrete domain is the support of the P1-in-fiber functions that
    vanish at the excluded nodes.
    """
    inside = np.asarray(inside, dtype=bool)
    if inside.shape != mesh.shape:
        raise ValidationError(f"mask shape {inside.shape} does not match grid {mesh.shape}")
    if not inside.any():
        raise ValidationError("restricted domain is empty")
    outside = np.nonzero(~inside.ravel())[0]
    bnd = np.union1d(mesh.boundary_vertices, outside).astype(np.int64)
    return ProductMesh(base=mesh.base, fiber=mesh.fiber, warp=mesh.warp,
                       boundary_vertices=bnd, kind="product_subdomain",
                       meta={**mesh.meta, "inside": inside})


# ---------------------------------------------------------------------------
# model-fiber volumes
# ---------------------------------------------------------------------------


def sphere_volume(k: int) -> float:
    """Volume of the unit round k-sphere in R^(k+1) (``V_0 = 2``)."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


def unit_ball_volume(m: int) -> float:
    return math.pi ** (m / 2.0) / math.gamma(m / 2.0 + 1.0)


def _check_dim(m):
    if int(m) != m or m < 1:
        raise ValidationError(f"dimension must be a positive integer, got {m}")
    return int(m)


def cap_volume(m: int, R: float, scale: float = 1.0) -> float:
    """Volume of a geodesic ball of radius R in the round m-sphere of radius ``scale``."""
    m = _check_dim(m)
    if not scale > 0:
        raise ValidationError("sphere scale must be positive")
    if not (0.0 <= R <= math.pi * scale * (1 + 1e-14)):
        raise ValidationError(f"cap radius {R} outside [0, pi*scale]")
    t = min(R / scale, math.pi)
    integral, _ = integrate.quad(lambda x: math.sin(x) ** (m - 1), 0.0, t,
                                 epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)
    return sphere_volume(m - 1) * scale ** m * integral


def ball_volume(m: int, r: float, model: str = "euclidean") -> float:
    """Volume of the radius-r ball of R^m (``euclidean``) or H^m (``hyperbolic``)."""
    m = _check_dim(m)
    if not r >= 0:
        raise ValidationError(f"radius must be non-negative, got {r}")
    if model == "euclidean":
        return unit_ball_volume(m) * r ** m
    if model == "hyperbolic":
        integral, _ = integrate.quad(lambda x: math.sinh(x) ** (m - 1), 0.0, r,
                                     epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL, limit=200)
        return sphere_volume(m - 1) * integral
    raise ValidationError(f"unknown ball model {model!r}")


def _invert_increasing(f, df, target, lo, hi, tol=_INVERT_TOL):
    """Solve ``f(x) = target`` on a bracket by bisection, then Newton polish."""
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo > 0 or fhi < 0:
        raise ValidationError("target outside the bracketed range")
    for _ in range(60):
        if hi - lo <= 1e-3 * max(abs(hi), 1e-300):
            break
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(50):
        d = df(x)
        r = f(x) - target
        if r < 0:
            lo = max(lo, x)
        elif r > 0:
            hi = min(hi, x)
        step = r / d if d > 0 else 0.0
        x_new = x - step
        if not (lo <= x_new <= hi) or d <= 0:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def radius_from_volume(m: int, v: float, model: str = "euclidean") -> float:
    """Inverse of :func:`ball_volume` in its radius argument."""
    m = _check_dim(m)
    if not v >= 0:
        raise ValidationError(f"volume must be non-negative, got {v}")
    if v == 0:
        return 0.0
    if model == "euclidean":
        return (v / unit_ball_volume(m)) ** (1.0 / m)
    if model != "hyperbolic":
        raise ValidationError(f"unknown ball model {model!r}")
    hi = 1.0
    while ball_volume(m, hi, model) < v:
        hi *= 2.0
    return _invert_increasing(lambda r: ball_volume(m, r, model),
                              lambda r: sphere_volume(m - 1) * math.sinh(r) ** (m - 1),
                              v, 0.0, hi)


def cap_radius_from_volume(m: int, v: float, scale: float = 1.0) -> float:
    """Inverse of :func:`cap_volume`: the geodesic radius enclosing volume v."""
    m = _check_dim(m)
    full = sphere_volume(m) * scale ** m
    if not (0.0 <= v <= full * (1 + 1e-12)):
        raise ValidationError(f"cap volume {v} outside [0, {full}]")
    if v == 0:
        return 0.0
    if v >= full:
        return math.pi * scale
    return _invert_increasing(
        lambda R: cap_volume(m, R, scale),
        lambda R: sphere_volume(m - 1) * scale ** (m - 1) * math.sin(R / scale) ** (m - 1),
        v, 0.0, math.pi * scale)


# ---------------------------------------------------------------------------
# fiber volume profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberVolumeProfile:
    """Per-fiber volumes ``V(s)`` over a discretized base.

    ``fiber_model`` is ``"euclidean"``, ``"hyperbolic"`` or ``"spherical"``;
    the spherical model needs ``total_volume`` (the fiber volume V of the
    ambient closed fiber), and then every ``V(s)`` must lie in ``(0, V)``.
    """

    base: Grid1D
    values: np.ndarray
    fiber_dim: int
    fiber_model: str = "euclidean"
    total_volume: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.base.n,):
            raise ValidationError("one fiber volume per base node is required")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValidationError("fiber volumes must be finite and positive")
        if self.fiber_model == "spherical":
            if self.total_volume is None or not self.total_volume > 0:
                raise ValidationError("spherical profiles need a positive total volume")
            if np.any(vals >= self.total_volume):
                raise ValidationError("spherical fiber volumes must satisfy 0 < V(s) < V")
        elif self.fiber_model not in ("euclidean", "hyperbolic"):
            raise ValidationError(f"unknown fiber model {self.fiber_model!r}")
        object.__setattr__(self, "values", vals)


def fiber_volumes(mesh: MeshManifold) -> FiberVolumeProfile:
    """Measured fiber lengths ``V(s_i)`` of a tube mesh.

    The length at base node ``i`` is the total length of the column edges at
    that node that belong to a retained cell and are not boundary slits (both
    endpoints on the boundary, where every admissible function vanishes).
    """
    if mesh.kind != "tube":
        raise ValidationError("fiber volumes are measured on tube meshes")
    columns = mesh.meta["columns"]
    base = mesh.meta["base"]
    present = set(map(tuple, np.sort(np.concatenate(
        [mesh.cells[:, [0, 1]], mesh.cells[:, [1, 2]], mesh.cells[:, [2, 0]]]), axis=1).tolist()))
    q = mesh.vertices[:, 1]
    on_bnd = np.zeros(mesh.n_vertices, dtype=bool)
    on_bnd[mesh.boundary_vertices] = True
    values = np.zeros(base.n)
    for i in range(base.n):
        col = columns[i]
        parts = []
        for a, b in zip(col[:-1], col[1:]):
            if a < 0 or b < 0 or (on_bnd[a] and on_bnd[b]):
                continue
            if (min(a, b), max(a, b)) in present:
                parts.append(abs(q[b] - q[a]))
        values[i] = math.fsum(parts)
    return FiberVolumeProfile(base=base, values=values, fiber_dim=1, fiber_model="euclidean")


# ---------------------------------------------------------------------------
# plain-text mesh format
# ---------------------------------------------------------------------------


def write_mesh(mesh: MeshManifold, path) -> None:
    """Write ``dim nv nc nb``, vertex, cell and boundary lines (0-based).

    A leading ``# period ...`` comment records periodic chart directions so
    that tube meshes round-trip.
    """
    lines = []
    if mesh.period is not None:
        lines.append("# period " + " ".join("none" if p is None else repr(float(p)) for p in mesh.period))
    lines.append(f"# kind {mesh.kind}")
    nb = len(mesh.boundary_vertices)
    lines.append(f"{mesh.vertices.shape[1]} {mesh.n_vertices} {len(mesh.cells)} {nb}")
    lines.extend(" ".join(repr(float(x)) for x in row) for row in mesh.vertices)
    lines.extend(" ".join(str(int(i)) for i in row) for row in mesh.cells)
    lines.extend(str(int(b)) for b in mesh.boundary_vertices)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_mesh(path) -> MeshManifold:
    period = None
    kind = "generic"
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            words = line[1:].split()
            if words and words[0] == "period":
                period = tuple(None if w == "none" else float(w) for w in words[1:])
            elif words and words[0] == "kind" and len(words) > 1:
                kind = words[1]
            continue
        rows.append(line.split())
    try:
        dim, nv, nc, nb = (int(x) for x in rows[0])
        verts = np.array([[float(x) for x in r] for r in rows[1:1 + nv]]).reshape(nv, dim)
        cells = np.array([[int(x) for x in r] for r in rows[1 + nv:1 + nv + nc]], dtype=np.int64)
        bnd = [int(r[0]) for r in rows[1 + nv + nc:1 + nv + nc + nb]]
    except (IndexError, ValueError) as exc:
        raise MeshError(f"malformed mesh file {path}: {exc}") from exc
    if len(bnd) != nb or len(cells) != nc:
        raise MeshError(f"truncated mesh file {path}")
    return mesh_from_cells(verts, cells, period=period, boundary=bnd, kind=kind)
