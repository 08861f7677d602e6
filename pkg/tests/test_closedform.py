import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibrespec import closedform as cf
from fibrespec.assembly import assemble
from fibrespec.eigensolve import smallest_eigs
from fibrespec.errors import ValidationError
from fibrespec.geometry import make_icosphere


def test_sphere_spectrum_examples():
    s = cf.sphere_spectrum(2, 1.0, 2)
    assert s.values.tolist() == [0, 2, 6]
    assert s.multiplicities.tolist() == [1, 3, 5]
    for m in range(1, 7):
        assert cf.sphere_spectrum(m, 1.0, 1).values[1] == m
    assert cf.sphere_spectrum(2, 0.5, 1).values[1] == 8


@pytest.mark.parametrize("m", [1, 2, 3, 4, 7])
def test_sphere_multiplicity_dimension_count(m):
    # harmonic polynomials of degree k: dim P_k - dim P_{k-2} in m + 1 variables
    for k in range(6):
        dim = math.comb(m + k, m) - (math.comb(m + k - 2, m) if k >= 2 else 0)
        assert cf.sphere_multiplicity(m, k) == dim


def test_sphere_spectrum_matches_fem():
    res = smallest_eigs(assemble(make_icosphere(5)), 10)
    exact = cf.sphere_spectrum(2, 1.0, 3).expanded()[:10]
    assert np.allclose(res.eigenvalues[1:], exact[1:], rtol=1e-2)


def test_squashed_values():
    assert cf.lambda1_squashed_sphere(1, 0.3) == 16
    assert cf.lambda1_squashed_sphere(1, 1.0) == 7
    assert cf.lambda1_squashed_cp(1, 0.5) == 16
    assert cf.lambda1_squashed_cp(1, 2.0) == 10
    assert cf.lambda1_squashed_s15(0.4) == 32
    assert cf.lambda1_squashed_s15(1.0) == 15


@pytest.mark.parametrize("q", [1, 2, 3, 7])
def test_breakpoints_continuous_and_decreasing(q):
    for family in (cf.squashed_sphere_family(q), cf.squashed_cp_family(q),
                   cf.squashed_s15_family()):
        assert family.continuity_error() <= 1e-12
        assert family.decreasing_beyond()


def test_breakpoint_locations():
    assert cf.squashed_sphere_family(1).breakpoint == pytest.approx(0.5)
    assert cf.squashed_s15_family().breakpoint == pytest.approx(0.5401, abs=1e-4)
    assert cf.squashed_cp_family(3).breakpoint == 1.0


@given(q=st.integers(1, 20), rho=st.floats(0.01, 0.5))
@settings(max_examples=50, deadline=None)
def test_small_branch_equals_base(q, rho):
    bp = cf.squashed_sphere_family(q).breakpoint
    if rho <= bp:
        assert cf.lambda1_squashed_sphere(q, rho) == cf.lambda1_hpq(q)
    assert cf.lambda1_squashed_cp(q, min(rho, 1.0)) == cf.lambda1_hpq(q)


def test_projective_spaces():
    assert cf.lambda1_hpq(1) == 16
    assert cf.lambda1_cpn(3) == 16
    assert cf.lambda1_cpn(2 * 2 + 1) == cf.lambda1_hpq(2)


def test_predict_examples():
    p = cf.canonical_variation_predict([0, 4, 4, 4, 4, 4], 3, 0.5, 2.0, 1)
    assert p.applies and p.predicted.tolist() == [0, 4]
    q = 2
    rho = math.sqrt(6) / (4 * math.sqrt(q + 1))
    p = cf.canonical_variation_predict([0, cf.lambda1_hpq(q)], 3, rho, 2.0, 1)
    assert p.applies and p.predicted[1] == 8 * (q + 1)
    assert not cf.canonical_variation_predict([0, 4], 3, 1e6, 2.0, 1).applies


def test_predict_rescaled_fibre():
    # curvature-4 S^2 fibers: a^2 = 4, threshold 8 / rho^2
    p = cf.canonical_variation_predict([0, 16], 2, 0.7, 4.0, 1)
    assert p.threshold == pytest.approx(8 / 0.49)


def test_lichnerowicz():
    assert cf.lichnerowicz_bound(2, 1) == 2
    assert cf.lichnerowicz_bound(3, 2) == 3
    for m in range(2, 9):
        assert cf.lichnerowicz_bound(m, m - 1) == m


def test_rho_grid():
    g = cf.parse_rho_grid("0.1:1.5:0.05")
    assert len(g) == 29 and g[0] == 0.1 and g[-1] == 1.5
    assert cf.parse_rho_grid("1:1:0.1").tolist() == [1.0]
    for bad in ("1:0.5:0.1", "a:b:c", "0.1:1", "0.1:1:0"):
        with pytest.raises(ValidationError):
            cf.parse_rho_grid(bad)


def test_tabulate_kink():
    text = cf.tabulate("squashed-sphere", cf.parse_rho_grid("0.1:1.5:0.05"), q=1)
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    rho = np.array([float(r[0]) for r in rows])
    lam = np.array([float(r[1]) for r in rows])
    assert np.all(lam[rho <= 0.5] == 16)
    assert np.all(lam[rho > 0.5] < 16)
    with pytest.raises(ValidationError):
        cf.tabulate("berger", [0.5])
