"""Stiffness and mass operators for ``K u = lambda M u``.

Simplicial meshes use piecewise-linear elements: for a cell with edge-vector
Gram matrix ``G`` (the metric pulled back to the reference simplex) the
element stiffness is ``vol * D^T G^{-1} D``, which reduces to the cotangent
formula on embedded triangles.  Structured warped products
``ds^2 + rho(s)^2 g_F`` are assembled as Kronecker products of a
rho^m-weighted base operator with the fiber operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from fibrespec.errors import MeshError, ValidationError
from fibrespec.geometry import Grid1D, MeshManifold, ProductMesh, cell_gram, grid_as_mesh

_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralPair:
    """Assembled pencil ``(K, M)`` on the retained degrees of freedom.

    ``dof_map[k]`` is the mesh vertex carried by unknown ``k``.  Closed
    warped products keep their Kronecker factors in ``kron`` so that the
    eigensolver can invert shifted operators mode by mode.
    """

    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    dof_map: np.ndarray
    boundary_condition: str = "closed"
    lumped: bool = True
    kron: KronFactors | None = None

    @property
    def n_dofs(self) -> int:
        return self.stiffness.shape[0]


@dataclass(frozen=True)
class KronFactors:
    """``K = B (x) M_F + diag(a) (x) K_F`` and ``M = diag(w) (x) M_F``."""

    base_stiffness: sp.csr_matrix
    fiber_weight: np.ndarray
    base_mass: np.ndarray
    fiber_stiffness: sp.csr_matrix
    fiber_mass: sp.csr_matrix


def _reference_gradients(d):
    # gradients of the barycentric hat functions on the reference d-simplex
    return np.hstack([-np.ones((d, 1)), np.eye(d)])


def simplicial_operators(mesh: MeshManifold, mass: str = "lumped"):
    """P1 stiffness and mass matrices of a simplicial mesh (all vertices)."""
    G, vol = cell_gram(mesh.vertices, mesh.cells, mesh.metric, mesh.period)
    if len(vol) == 0:
        raise MeshError("mesh has no cells")
    tiny = _DEGENERATE_RTOL * max(float(vol.max()), np.finfo(float).tiny)
    if not np.all(vol > tiny):
        bad = int(np.argmin(vol))
        raise MeshError(f"degenerate cell {bad} (volume {vol[bad]:.3e})")
    d = mesh.dim
    D = _reference_gradients(d)
    Ginv = np.linalg.inv(G)
    Ke = vol[:, None, None] * np.einsum("ki,ckl,lj->cij", D, Ginv, D)
    k = d + 1
    rows = np.repeat(mesh.cells, k, axis=1).ravel()
    cols = np.tile(mesh.cells, (1, k)).ravel()
    n = mesh.n_vertices
    K = sp.csr_matrix((Ke.ravel(), (rows, cols)), shape=(n, n))
    K = 0.5 * (K + K.T)
    if mass == "lumped":
        M = sp.diags(mesh.lumped_volume).tocsr()
    elif mass == "consistent":
        ref = (np.ones((k, k)) + np.eye(k)) / ((d + 1) * (d + 2))
        Me = vol[:, None, None] * ref[None, :, :]
        M = sp.csr_matrix((Me.ravel(), (rows, cols)), shape=(n, n))
        M = 0.5 * (M + M.T)
    else:
        raise ValidationError(f"unknown mass option {mass!r}")
    return K.tocsr(), M.tocsr()


def base_operator(base: Grid1D, weight: np.ndarray) -> sp.csr_matrix:
    """Second-order weighted base stiffness for ``-(w u')'`` (midpoint-averaged weights)."""
    n, h = base.n, base.spacing
    if base.closed:
        nxt = (np.arange(n) + 1) % n
        w_mid = 0.5 * (weight + weight[nxt])
        i = np.arange(n)
        j = nxt
    else:
        w_mid = 0.5 * (weight[:-1] + weight[1:])
        i = np.arange(n - 1)
        j = i + 1
    c = w_mid / h
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([j, i, i, j])
    vals = np.concatenate([-c, -c, c, c])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def product_parts(mesh: ProductMesh, mass: str = "lumped"):
    """Base-direction stiffness, fiber-direction stiffness and mass of a warped product.

    With ``w = rho^m`` on the base,

        K_base  = B(w) (x) M_F
        K_fiber = diag(h_i rho_i^(m-2)) (x) K_F
        M       = diag(h_i rho_i^m) (x) M_F

    so a constant rescaling ``rho -> c rho`` multiplies ``K_base`` and ``M`` by
    ``c^m`` and ``K_fiber`` by ``c^(m-2)``.
    """
    f = _kron_factors(mesh, mass)
    K_base = sp.kron(f.base_stiffness, f.fiber_mass, format="csr")
    K_fiber = sp.kron(sp.diags(f.fiber_weight), f.fiber_stiffness, format="csr")
    M = sp.kron(sp.diags(f.base_mass), f.fiber_mass, format="csr")
    return K_base, K_fiber, M


def _kron_factors(mesh: ProductMesh, mass: str) -> KronFactors:
    m = mesh.fiber_dim
    K_F, M_F = simplicial_operators(mesh.fiber, mass=mass)
    rho = mesh.warp
    w_base = mesh.base.weights()
    return KronFactors(base_stiffness=base_operator(mesh.base, rho ** m),
                       fiber_weight=w_base * rho ** (m - 2),
                       base_mass=w_base * rho ** m,
                       fiber_stiffness=K_F, fiber_mass=M_F)


def assemble(mesh, mass: str = "lumped") -> SpectralPair:
    """Assemble the closed pencil of a grid, simplicial mesh or warped product."""
    if isinstance(mesh, Grid1D):
        mesh = grid_as_mesh(mesh)
    kron = None
    if isinstance(mesh, ProductMesh):
        K_base, K_fiber, M = product_parts(mesh, mass=mass)
        K = (K_base + K_fiber).tocsr()
        kron = _kron_factors(mesh, mass)
    elif isinstance(mesh, MeshManifold):
        K, M = simplicial_operators(mesh, mass=mass)
    else:
        raise ValidationError(f"cannot assemble {type(mesh).__name__}")
    return SpectralPair(stiffness=K, mass=M, dof_map=np.arange(K.shape[0]),
                        boundary_condition="closed", lumped=(mass == "lumped"), kron=kron)


def apply_dirichlet(pair: SpectralPair, mesh) -> SpectralPair:
    """Eliminate the mesh's boundary vertices from the pencil."""
    bnd = np.asarray(mesh.boundary_vertices, dtype=np.int64)
    if len(bnd) == 0:
        raise MeshError("mesh is closed: no boundary to impose Dirichlet conditions on")
    keep = ~np.isin(pair.dof_map, bnd)
    if not keep.any():
        raise MeshError("every degree of freedom lies on the boundary")
    idx = np.nonzero(keep)[0]
    K = pair.stiffness[idx][:, idx].tocsr()
    M = pair.mass[idx][:, idx].tocsr()
    return SpectralPair(stiffness=K, mass=M, dof_map=pair.dof_map[idx],
                        boundary_condition="dirichlet", lumped=pair.lumped)


def rayleigh_quotient(pair: SpectralPair, u) -> float:
    """``u^T K u / u^T M u`` for a per-dof vector ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (pair.n_dofs,):
        raise ValidationError(f"expected a vector of length {pair.n_dofs}, got {u.shape}")
    den = float(u @ (pair.mass @ u))
    if not np.any(u) or den <= 0:
        raise ValidationError("Rayleigh quotient of the zero vector is undefined")
    return float(u @ (pair.stiffness @ u)) / den


def dirichlet_energy(pair: SpectralPair, u) -> float:
    u = np.asarray(u, dtype=float)
    return float(u @ (pair.stiffness @ u))


def write_coo(matrix, path) -> None:
    """Dump a sparse matrix as ``row col value`` lines (0-based)."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    lines.extend(f"{r} {c} {v!r}" for r, c, v in
                 zip(coo.row[order].tolist(), coo.col[order].tolist(), coo.data[order].tolist()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_coo(path) -> sp.csr_matrix:
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    nr, nc, _ = (int(x) for x in lines[0].split())
    data = np.array([ln.split() for ln in lines[1:] if ln.strip()], dtype=object)
    if len(data) == 0:
        return sp.csr_matrix((nr, nc))
    return sp.csr_matrix((data[:, 2].astype(float), (data[:, 0].astype(int), data[:, 1].astype(int))),
                         shape=(nr, nc))
