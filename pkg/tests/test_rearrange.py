import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibrespec.assembly import simplicial_operators
from fibrespec.errors import ValidationError
from fibrespec.geometry import (
    FiberVolumeProfile,
    fiber_volumes,
    make_circle_grid,
    make_icosphere,
    make_interval_mesh,
    make_poincare_disk,
    make_tube_domain,
)
from fibrespec.rearrange import (
    FiberedField,
    FiberModel,
    enclosed_volume,
    gradient_constant,
    lipschitz_gap,
    model_for_mesh,
    push_profile,
    read_profile_csv,
    rearrange_field,
    rearrange_fiber,
    symmetrize_domain,
    write_profile_csv,
)

SPHERE3 = make_icosphere(3)
SPHERE_MODEL = model_for_mesh(SPHERE3)


def test_constant_field():
    prof = rearrange_fiber(np.full(SPHERE3.n_vertices, 2.5), SPHERE3.lumped_volume, SPHERE_MODEL)
    assert np.all(prof.values == 2.5)
    assert np.all(push_profile(prof, SPHERE3) == 2.5)


def test_two_vertex_step():
    prof = rearrange_fiber([3.0, 1.0], [1.0, 1.0], FiberModel("euclidean", 1))
    assert prof.lower.tolist() == [0.0, 1.0]
    assert prof.values.tolist() == [1.0, 3.0]
    assert prof.total_volume == 2.0
    assert prof.value_at([0.0, 0.999, 1.0, 2.0]).tolist() == [1.0, 1.0, 3.0, 3.0]


def test_height_function_distribution():
    # mu({z < t}) = 2 pi (1 + t) on the unit sphere
    errors = []
    for subdiv in (3, 4, 5):
        mesh = make_icosphere(subdiv)
        z = mesh.vertices[:, 2]
        prof = rearrange_fiber(z, mesh.lumped_volume, model_for_mesh(mesh))
        errors.append(np.max(np.abs(prof.lower - 2 * math.pi * (1 + prof.values))))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-2 * 4 * math.pi


def test_spherical_volume_mismatch():
    with pytest.raises(ValidationError):
        rearrange_fiber(np.zeros(SPHERE3.n_vertices), SPHERE3.lumped_volume,
                        FiberModel("spherical", 2, total_volume=4 * math.pi * 1.01))


def test_push_model_mismatch():
    prof = rearrange_fiber(np.arange(5.0), np.ones(5), FiberModel("euclidean", 1))
    with pytest.raises(ValidationError):
        push_profile(prof, SPHERE3)
    with pytest.raises(ValidationError):
        enclosed_volume(FiberModel("euclidean", 2), SPHERE3)


def test_interval_push_is_symmetric():
    fiber = make_interval_mesh(1.0, 16)
    rng = np.random.default_rng(3)
    prof = rearrange_fiber(rng.standard_normal(fiber.n_vertices), fiber.lumped_volume,
                           model_for_mesh(fiber))
    pushed = push_profile(prof, fiber)
    q = fiber.vertices[:, 0]
    order = np.argsort(q)
    assert np.array_equal(pushed[order], pushed[order][::-1])
    assert np.all(np.diff(pushed[order][len(q) // 2:]) >= 0)


@pytest.mark.parametrize("mode", ["step", "linear"])
def test_height_function_energy(mode):
    mesh = make_icosphere(4)
    K, M = simplicial_operators(mesh)
    z = mesh.vertices[:, 2]
    prof = rearrange_fiber(z, mesh.lumped_volume, model_for_mesh(mesh))
    pushed = push_profile(prof, mesh, mode)

    def rq(u):
        u = u - (u @ (M @ np.ones_like(u))) / mesh.total_volume
        return (u @ (K @ u)) / (u @ (M @ u))

    assert rq(pushed) <= rq(z) * 1.03


def test_fiber_constant_field_unchanged():
    base = make_circle_grid(2 * math.pi, 16)
    a = np.cos(base.nodes)
    F = FiberedField(base, SPHERE3, np.repeat(a[:, None], SPHERE3.n_vertices, axis=1))
    out = rearrange_field(F)
    assert np.array_equal(out.values, F.values)


def test_positive_scaling_commutes():
    base = make_circle_grid(2 * math.pi, 16)
    a = 1.5 + np.sin(base.nodes)
    z = SPHERE3.vertices[:, 2]
    out = rearrange_field(FiberedField(base, SPHERE3, a[:, None] * z[None, :]))
    ref = rearrange_fiber(z, SPHERE3.lumped_volume, SPHERE_MODEL)
    for ai, prof in zip(a, out.profiles):
        assert np.allclose(prof.values, ai * ref.values, rtol=1e-15, atol=0)


def smooth_fields(seed, base, mesh, count=1):
    rng = np.random.default_rng(seed)
    x, y, z = mesh.vertices.T
    basis = np.vstack([np.ones_like(x), x, y, z, x * y, z * z, x ** 3])
    modes = np.vstack([np.ones(base.n), np.cos(base.nodes), np.sin(2 * base.nodes)])
    return [(modes.T @ rng.standard_normal((3, 7))) @ basis for _ in range(count)]


@given(seed=st.integers(0, 2 ** 31))
@settings(max_examples=15, deadline=None)
def test_equimeasurable_and_powers(seed):
    base = make_circle_grid(2 * math.pi, 8)
    rng = np.random.default_rng(seed)
    vals = smooth_fields(seed, base, SPHERE3)[0]
    # round half the fibers to create ties
    vals[::2] = np.round(vals[::2], 1)
    F = FiberedField(base, SPHERE3, vals)
    vols = SPHERE3.lumped_volume
    for row, prof in zip(F.values, F.fiber_profiles(SPHERE_MODEL)):
        for t in rng.choice(row, 10):
            assert math.fsum(vols[row < t]) == prof.distribution(t)
        for p in (1, 2):
            direct = math.fsum(vols * row ** p)
            assert abs(direct - prof.power_integral(p)) <= 1e-8 * math.fsum(vols * np.abs(row) ** p)


@given(seed=st.integers(0, 2 ** 31))
@settings(max_examples=15, deadline=None)
def test_monotone_equivariance(seed):
    base = make_circle_grid(2 * math.pi, 8)
    F = FiberedField(base, SPHERE3, smooth_fields(seed, base, SPHERE3)[0])
    Fs = rearrange_field(F)
    for phi in (np.tanh, lambda u: np.floor(3 * u), lambda u: np.clip(u, -0.5, 0.5)):
        lhs = rearrange_field(FiberedField(base, SPHERE3, phi(F.values))).values
        assert np.array_equal(lhs, phi(Fs.values))


def test_lipschitz_examples():
    base = make_circle_grid(2 * math.pi, 8)
    F = FiberedField(base, SPHERE3, smooth_fields(1, base, SPHERE3)[0])
    assert lipschitz_gap(F, F) == (0.0, 0.0)
    G = FiberedField(base, SPHERE3, F.values + 0.75)
    lhs, rhs = lipschitz_gap(F, G)
    assert lhs == pytest.approx(0.75, rel=1e-14) and rhs == pytest.approx(0.75, rel=1e-14)


@given(seed=st.integers(0, 2 ** 31), eps=st.floats(1e-6, 2.0))
@settings(max_examples=25, deadline=None)
def test_lipschitz_random(seed, eps):
    base = make_circle_grid(2 * math.pi, 8)
    f, g = smooth_fields(seed, base, SPHERE3, count=2)
    F = FiberedField(base, SPHERE3, f)
    G = FiberedField(base, SPHERE3, f + eps * g)
    lhs, rhs = lipschitz_gap(F, G)
    assert lhs <= rhs + 1e-8


def test_near_ties_deterministic():
    base = make_circle_grid(2 * math.pi, 8)
    vals = np.ones((8, SPHERE3.n_vertices))
    vals[:, ::3] += 1e-16
    vals[:, ::5] = np.nextafter(1.0, 2.0)
    a = rearrange_field(FiberedField(base, SPHERE3, vals)).values
    b = rearrange_field(FiberedField(base, SPHERE3, vals.copy())).values
    assert np.array_equal(a, b)


def test_symmetrize_constant_strip():
    base = make_circle_grid(2 * math.pi, 32)
    X = symmetrize_domain(FiberVolumeProfile(base=base, values=np.ones(32), fiber_dim=1),
                          resolution=16)
    q = X.vertices[X.boundary_vertices, 1]
    assert np.allclose(np.abs(q), 0.5)
    assert np.allclose(fiber_volumes(X).values, 1.0)


def test_symmetrize_tube_width():
    base = make_circle_grid(2 * math.pi, 32)
    tube = make_tube_domain(base, lambda s: 0.5 + 0.2 * np.cos(s), 16, center=0.3)
    Xs = symmetrize_domain(fiber_volumes(tube), resolution=16)
    assert np.allclose(fiber_volumes(Xs).values, 1 + 0.4 * np.cos(base.nodes), rtol=1e-12)
    assert np.allclose(Xs.vertices[:, 1].max(), 0.7)


def test_symmetrize_hemispheres():
    base = make_circle_grid(2 * math.pi, 8)
    prof = FiberVolumeProfile(base=base, values=np.full(8, 2 * math.pi), fiber_dim=2,
                              fiber_model="spherical", total_volume=4 * math.pi)
    X = symmetrize_domain(prof, rings=4)
    assert np.allclose(X.meta["radius"], math.pi / 2)


def test_symmetrize_rejects_hyperbolic_and_high_dim():
    base = make_circle_grid(2 * math.pi, 8)
    with pytest.raises(ValidationError):
        symmetrize_domain(FiberVolumeProfile(base=base, values=np.ones(8), fiber_dim=2,
                                             fiber_model="hyperbolic"))
    with pytest.raises(ValidationError):
        symmetrize_domain(FiberVolumeProfile(base=base, values=np.ones(8), fiber_dim=3))


def test_hyperbolic_profile():
    disk = make_poincare_disk(1.0, 12)
    r = np.linalg.norm(disk.vertices, axis=1)
    prof = rearrange_fiber(-r, disk.lumped_volume, model_for_mesh(disk))
    pushed = push_profile(prof, disk)
    # the rearrangement of a radially decreasing function is increasing in r
    order = np.argsort(r, kind="stable")
    assert np.all(np.diff(pushed[order]) >= -1e-12 * np.ptp(r))


def test_gradient_constant():
    assert gradient_constant(2, 4 * math.pi, 1.0) == pytest.approx(1.0)
    assert gradient_constant(2, math.pi, 1.0) == pytest.approx(2.0)


def test_profile_csv_roundtrip(tmp_path):
    z = SPHERE3.vertices[:, 2]
    prof = rearrange_fiber(z, SPHERE3.lumped_volume, SPHERE_MODEL)
    path = tmp_path / "p.csv"
    write_profile_csv(prof, path)
    assert path.read_text().splitlines()[1] == "enclosed_volume,value"
    back = read_profile_csv(path)
    assert np.array_equal(back.values, prof.values)
    assert np.allclose(back.volumes, prof.volumes, rtol=1e-12)
