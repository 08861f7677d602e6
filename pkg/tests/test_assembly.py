import math

import numpy as np
import pytest
import scipy.sparse as sp

from fibrespec.assembly import (
    apply_dirichlet,
    assemble,
    product_parts,
    rayleigh_quotient,
    read_coo,
    write_coo,
)
from fibrespec.errors import MeshError, ValidationError
from fibrespec.geometry import (
    make_circle_grid,
    make_icosphere,
    make_product_mesh,
    make_rectangle_mesh,
    make_tube_domain,
)


def _check_pair(pair, closed=True, seed=0):
    K, M = pair.stiffness, pair.mass
    assert abs(K - K.T).max() <= 1e-12
    assert abs(M - M.T).max() <= 1e-12
    rng = np.random.default_rng(seed)
    for _ in range(5):
        u = rng.standard_normal(pair.n_dofs)
        assert u @ (K @ u) >= -1e-10 * abs(K).max() * (u @ u)
        assert u @ (M @ u) > 0
    if closed:
        ones = np.ones(pair.n_dofs)
        assert np.abs(K @ ones).max() <= 1e-10 * abs(K).max()


def test_torus_grid_rayleigh():
    c = make_circle_grid(2 * math.pi, 64)
    mesh = make_product_mesh(c, make_circle_grid(2 * math.pi, 64))
    pair = assemble(mesh)
    _check_pair(pair)
    s = np.repeat(c.nodes, 64)
    h = c.spacing
    # lumped P1 on a uniform circle gives (2 - 2 cos h) / h^2 for cos s
    exact = (2 - 2 * math.cos(h)) / h ** 2
    assert rayleigh_quotient(pair, np.cos(s)) == pytest.approx(exact, rel=1e-10)
    assert rayleigh_quotient(pair, np.cos(s)) == pytest.approx(1.0, abs=h ** 2)


def test_icosphere_rayleigh_of_z():
    mesh = make_icosphere(4)
    pair = assemble(mesh)
    _check_pair(pair)
    assert rayleigh_quotient(pair, mesh.vertices[:, 2]) == pytest.approx(2.0, rel=1e-2)


def test_circle_rayleigh_cos():
    grid = make_circle_grid(2 * math.pi, 128)
    pair = assemble(grid)
    assert rayleigh_quotient(pair, np.cos(grid.nodes)) == pytest.approx(1.0, abs=grid.spacing ** 2)
    assert rayleigh_quotient(pair, np.ones(grid.n)) == pytest.approx(0.0, abs=1e-14)


def test_rayleigh_rejects_zero():
    pair = assemble(make_circle_grid(1, 8))
    with pytest.raises(ValidationError):
        rayleigh_quotient(pair, np.zeros(8))


def test_dirichlet_square_interior_dofs():
    mesh = make_rectangle_mesh(1.0, 1.0, 8, 8)
    pair = apply_dirichlet(assemble(mesh), mesh)
    assert pair.n_dofs == 7 * 7
    assert pair.boundary_condition == "dirichlet"
    assert not np.isin(pair.dof_map, mesh.boundary_vertices).any()
    _check_pair(pair, closed=False)


def test_dirichlet_rejects_closed():
    mesh = make_icosphere(1)
    with pytest.raises(MeshError):
        apply_dirichlet(assemble(mesh), mesh)


def test_strip_dirichlet_lowest():
    from fibrespec.eigensolve import smallest_eigs

    w = 0.5
    mesh = make_tube_domain(make_circle_grid(2 * math.pi, 64), w, 64)
    pair = apply_dirichlet(assemble(mesh), mesh)
    lam = smallest_eigs(pair, 1).eigenvalues[0]
    assert lam == pytest.approx((math.pi / (2 * w)) ** 2, rel=1e-2)


def test_consistent_mass_total():
    mesh = make_icosphere(2)
    pair = assemble(mesh, mass="consistent")
    ones = np.ones(mesh.n_vertices)
    assert ones @ (pair.mass @ ones) == pytest.approx(mesh.total_volume, rel=1e-12)
    _check_pair(pair)


def test_warp_scaling_covariance():
    base = make_circle_grid(2 * math.pi, 16)
    fiber = make_icosphere(1)
    warp = 1 + 0.3 * np.cos(base.nodes)
    c, m = 1.7, 2
    Kb1, Kf1, M1 = product_parts(make_product_mesh(base, fiber, warp))
    Kb2, Kf2, M2 = product_parts(make_product_mesh(base, fiber, c * warp))
    assert abs(Kf2 - c ** (m - 2) * Kf1).max() <= 1e-10 * abs(Kf1).max()
    assert abs(M2 - c ** m * M1).max() <= 1e-10 * abs(M1).max()
    assert abs(Kb2 - c ** m * Kb1).max() <= 1e-10 * abs(Kb1).max()


def test_symmetry_exhaustive_small():
    mesh = make_product_mesh(make_circle_grid(2 * math.pi, 8), make_icosphere(1),
                             lambda s: 1 + 0.3 * np.cos(s))
    pair = assemble(mesh)
    K = pair.stiffness.toarray()
    M = pair.mass.toarray()
    assert np.array_equal(K, K.T) or np.abs(K - K.T).max() <= 1e-12
    assert np.abs(M - M.T).max() <= 1e-12


def test_coo_roundtrip(tmp_path):
    pair = assemble(make_icosphere(1))
    path = tmp_path / "k.txt"
    write_coo(pair.stiffness, path)
    back = read_coo(path)
    assert (back != pair.stiffness).nnz == 0
    assert sp.issparse(back)
