"""Spectra of warped products ``S^1 x_rho F`` by separation of variables.

An eigenfunction ``phi(s) psi(x)`` with ``Delta_F psi = nu psi`` reduces the
Laplacian of ``ds^2 + rho(s)^2 g_F`` to the periodic Sturm-Liouville problem

    -rho^(-m) (rho^m phi')' + nu rho^(-2) phi = lambda phi,

so the spectrum of the total space is the union over fiber eigenvalues ``nu``
of the spectra of these one-dimensional problems, each repeated with the
multiplicity of ``nu``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from fibrespec.eigensolve import DEFAULT_CLUSTER_TOL, SpectrumResult, cluster_multiplicities
from fibrespec.errors import EigenSolverError, ValidationError
from fibrespec.geometry import Grid1D, make_circle_grid

logger = logging.getLogger(__name__)

DEFAULT_SL_NODES = 512
_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class FiberSpectrum:
    """Distinct fiber eigenvalues ``nu_k`` with their multiplicities.

    ``complete`` says the list is exhaustive (for instance a point fiber);
    otherwise consumers must not assume anything about eigenvalues beyond
    the last one listed.
    """

    values: np.ndarray
    multiplicities: np.ndarray
    source: str = "computed"
    complete: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        mult = np.asarray(self.multiplicities, dtype=np.int64)
        if vals.ndim != 1 or vals.shape != mult.shape:
            raise ValidationError("fiber spectrum needs one multiplicity per value")
        if len(vals) and (np.any(np.diff(vals) <= 0) or not np.all(np.isfinite(vals))):
            raise ValidationError("fiber eigenvalues must be finite and strictly ascending")
        if np.any(mult < 1):
            raise ValidationError("multiplicities must be positive")
        if len(vals) and vals[0] < -_ZERO_TOL * max(1.0, abs(vals[-1])):
            raise ValidationError("fiber eigenvalues must be non-negative")
        if self.source not in ("closedform", "computed"):
            raise ValidationError(f"unknown spectrum source {self.source!r}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "multiplicities", mult)

    def __len__(self):
        return len(self.values)

    def expanded(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat(self.values, self.multiplicities)

    def as_result(self) -> SpectrumResult:
        return SpectrumResult.from_values(self.expanded(), complete=self.complete)

    @classmethod
    def from_result(cls, result: SpectrumResult) -> "FiberSpectrum":
        """Collapse clustered eigenvalues to their means."""
        vals = np.asarray(result.eigenvalues, dtype=float)
        mult = list(result.multiplicities)
        if sum(mult) != len(vals):
            mult = cluster_multiplicities(vals, result.cluster_tol)
        edges = np.concatenate([[0], np.cumsum(mult)])
        means = np.array([vals[a:b].mean() for a, b in zip(edges[:-1], edges[1:])])
        if len(means) and abs(means[0]) <= _ZERO_TOL * max(1.0, abs(means[-1])):
            means[0] = 0.0
        return cls(values=means, multiplicities=np.asarray(mult), source="computed",
                   complete=result.complete)


@dataclass(frozen=True)
class WarpedSpec:
    """``base x_rho F`` with ``rho`` sampled at the nodes of a circle grid."""

    base: Grid1D
    warp: np.ndarray
    fiber_dim: int
    fiber_spectrum: FiberSpectrum

    def __post_init__(self):
        if not self.base.closed:
            raise ValidationError("warped spectra need a circle base")
        rho = self.base.sample(self.warp)
        if np.any(rho <= 0):
            raise ValidationError("warp must be strictly positive")
        if int(self.fiber_dim) != self.fiber_dim or self.fiber_dim < 1:
            raise ValidationError("fiber dimension must be a positive integer")
        object.__setattr__(self, "warp", rho)


def make_warped_spec(length: float, n: int, warp, fiber_dim: int,
                     fiber_spectrum: FiberSpectrum) -> WarpedSpec:
    """Convenience constructor sampling a callable (or constant) warp on ``n`` nodes."""
    base = make_circle_grid(length, n)
    return WarpedSpec(base=base, warp=base.sample(warp), fiber_dim=fiber_dim,
                      fiber_spectrum=fiber_spectrum)


def _sl_operators(base: Grid1D, rho: np.ndarray, m: int, nu: float):
    # fourth-order staggered scheme: derivatives and weights live on the
    # midpoints s_{i+1/2}; the midpoint sum of a periodic integrand is exact
    # up to spectral accuracy, so the scheme keeps the order of its stencils
    n, h = base.n, base.spacing
    w = rho ** m
    idx = np.arange(n)
    D = np.zeros((n, n))
    for offset, coef in ((-1, 1.0), (0, -27.0), (1, 27.0), (2, -1.0)):
        D[idx, (idx + offset) % n] += coef / (24.0 * h)
    w_mid = (-np.roll(w, 1) + 9.0 * w + 9.0 * np.roll(w, -1) - np.roll(w, -2)) / 16.0
    K = D.T @ (h * w_mid[:, None] * D)
    K = 0.5 * (K + K.T) + np.diag(h * nu * rho ** (m - 2))
    mass = h * w
    return K, mass


def sturm_liouville_eigs(base: Grid1D, rho, m: int, nu: float, k: int, *,
                         return_residuals: bool = False):
    """The ``k`` smallest eigenvalues of ``-rho^(-m)(rho^m phi')' + nu rho^(-2) phi``.

    The operator is discretized on the circle grid ``base`` as a symmetric
    pencil ``(K, diag(h rho^m))`` and solved densely.
    """
    if not isinstance(base, Grid1D) or not base.closed:
        raise ValidationError("Sturm-Liouville reduction needs a circle base")
    rho = base.sample(rho)
    if np.any(rho <= 0):
        raise ValidationError("warp must be strictly positive")
    if int(m) != m or m < 1:
        raise ValidationError("fiber dimension must be a positive integer")
    if not nu >= 0 or not math.isfinite(nu):
        raise ValidationError(f"fiber eigenvalue must be finite and non-negative, got {nu}")
    if int(k) != k or not 1 <= k <= base.n:
        raise ValidationError(f"k must lie in [1, {base.n}], got {k}")
    K, mass = _sl_operators(base, rho, int(m), float(nu))
    scale = 1.0 / np.sqrt(mass)
    A = scale[:, None] * K * scale[None, :]
    try:
        vals, vecs = la.eigh(A, subset_by_index=[0, int(k) - 1])
    except la.LinAlgError as exc:
        raise EigenSolverError(f"Sturm-Liouville solve failed: {exc}") from exc
    if not return_residuals:
        return vals
    U = scale[:, None] * vecs
    Mu = mass[:, None] * U
    res = np.linalg.norm(K @ U - Mu * vals[None, :], axis=0) / np.linalg.norm(Mu, axis=0)
    return vals, res


def warped_spectrum(spec: WarpedSpec, k: int, *,
                    cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SpectrumResult:
    """The ``k`` smallest eigenvalues of the warped product, branch by branch.

    On the ``nu`` branch every eigenvalue is at least ``nu / max(rho)^2``, so
    branches are visited in increasing ``nu`` until that bound exceeds the
    current k-th value.
    """
    if int(k) != k or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    k = int(k)
    fib = spec.fiber_spectrum
    if len(fib) == 0:
        raise ValidationError("fiber spectrum is empty")
    rho_max2 = float(np.max(spec.warp)) ** 2
    vals, res = [], []
    exhausted = True
    for nu, mult in zip(fib.values, fib.multiplicities):
        if len(vals) >= k and nu / rho_max2 > np.partition(vals, k - 1)[k - 1]:
            exhausted = False
            break
        count = min(spec.base.n, -(-k // int(mult)))
        branch, branch_res = sturm_liouville_eigs(spec.base, spec.warp, spec.fiber_dim, nu, count,
                                                  return_residuals=True)
        vals.extend(np.repeat(branch, mult).tolist())
        res.extend(np.repeat(branch_res, mult).tolist())
    if exhausted and not fib.complete:
        kth = np.partition(vals, k - 1)[k - 1] if len(vals) >= k else math.inf
        needed = kth * rho_max2
        raise ValidationError(
            f"insufficient fiber modes: every fiber eigenvalue up to nu = {needed:.6g} is needed "
            f"(largest supplied: {fib.values[-1]:.6g}); supply at least one more")
    if len(vals) < k:
        raise ValidationError(f"only {len(vals)} eigenvalues available, {k} requested")
    order = np.argsort(vals, kind="stable")[:k]
    values = np.asarray(vals)[order]
    return SpectrumResult(eigenvalues=values,
                          multiplicities=cluster_multiplicities(values, cluster_tol),
                          residuals=np.asarray(res)[order], k_requested=k,
                          cluster_tol=cluster_tol)


def product_spectrum(a: SpectrumResult, b: SpectrumResult, k: int, *,
                     cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SpectrumResult:
    """The ``k`` smallest sums ``a_i + b_j`` (spectrum of a Riemannian product).

    Sums beyond ``min(a_last + b_0, a_0 + b_last)`` may be missing from a
    truncated pair of spectra; asking for more than that is an error unless
    the factor spectra are flagged complete.
    """
    if int(k) != k or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    k = int(k)
    av = np.asarray(a.eigenvalues, dtype=float)
    bv = np.asarray(b.eigenvalues, dtype=float)
    if len(av) == 0 or len(bv) == 0:
        raise ValidationError("factor spectra must be non-empty")
    for name, v in (("first", av), ("second", bv)):
        if abs(v[0]) > _ZERO_TOL * max(1.0, abs(v[-1])):
            raise ValidationError(f"{name} factor spectrum does not start at 0")
    sums = np.sort((av[:, None] + bv[None, :]).ravel(), kind="stable")
    bound = math.inf
    if not a.complete:
        bound = min(bound, av[-1] + bv[0])
    if not b.complete:
        bound = min(bound, av[0] + bv[-1])
    if len(sums) < k:
        raise ValidationError(f"only {len(sums)} sums available, {k} requested")
    if sums[k - 1] > bound:
        reliable = int(np.searchsorted(sums, bound, side="right"))
        raise ValidationError(
            f"truncation shortfall: only the {reliable} smallest sums are certain "
            f"(bound {bound:.6g}); extend the factor spectra to get {k}")
    values = sums[:k]
    return SpectrumResult(eigenvalues=values,
                          multiplicities=cluster_multiplicities(values, cluster_tol),
                          residuals=np.zeros(k), k_requested=k, cluster_tol=cluster_tol,
                          complete=a.complete and b.complete)
