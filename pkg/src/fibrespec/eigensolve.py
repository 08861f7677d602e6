"""Smallest eigenpairs of the symmetric generalized pencil ``(K, M)``."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, splu

from fibrespec.assembly import SpectralPair
from fibrespec.errors import EigenSolverError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_CLUSTER_TOL = 1e-3
DEFAULT_SEED = 20240601


@dataclass
class SpectrumResult:
    """Ascending eigenvalues with clustered multiplicities and residual norms.

    ``complete`` marks a spectrum known to be exhaustive (a point, say), which
    lets :func:`fibrespec.warped.product_spectrum` skip its truncation check.
    """

    eigenvalues: np.ndarray
    multiplicities: list
    residuals: np.ndarray
    k_requested: int
    cluster_tol: float = DEFAULT_CLUSTER_TOL
    vectors: np.ndarray | None = field(default=None, repr=False)
    complete: bool = False

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def lambda1(self) -> float:
        """The first eigenvalue after lambda_0."""
        if len(self.eigenvalues) < 2:
            raise ValidationError("spectrum has no lambda_1")
        return float(self.eigenvalues[1])

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "multiplicities": [int(x) for x in self.multiplicities],
            "residuals": [float(x) for x in self.residuals],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_values(cls, values, *, cluster_tol=DEFAULT_CLUSTER_TOL, residuals=None,
                    complete=False) -> "SpectrumResult":
        vals = np.sort(np.asarray(values, dtype=float))
        res = np.zeros(len(vals)) if residuals is None else np.asarray(residuals, dtype=float)
        return cls(eigenvalues=vals, multiplicities=cluster_multiplicities(vals, cluster_tol),
                   residuals=res, k_requested=len(vals), cluster_tol=cluster_tol,
                   complete=complete)

    @classmethod
    def from_json(cls, text: str) -> "SpectrumResult":
        data = json.loads(text)
        vals = np.asarray(data["eigenvalues"], dtype=float)
        return cls(eigenvalues=vals, multiplicities=list(data["multiplicities"]),
                   residuals=np.asarray(data["residuals"], dtype=float), k_requested=len(vals))


def cluster_multiplicities(eigenvalues, rel_tol: float = DEFAULT_CLUSTER_TOL) -> list:
    """Group sorted eigenvalues whose consecutive gaps are below ``rel_tol * max(1, lambda)``."""
    vals = np.asarray(eigenvalues, dtype=float)
    if len(vals) == 0:
        return []
    mult = [1]
    for prev, cur in zip(vals[:-1], vals[1:]):
        if cur - prev <= rel_tol * max(1.0, abs(cur)):
            mult[-1] += 1
        else:
            mult.append(1)
    return mult


def _check_mass(M):
    diag = M.diagonal()
    if np.any(diag <= 0) or not np.all(np.isfinite(diag)):
        raise ValidationError("mass operator is singular (non-positive diagonal)")
    if M.nnz != np.count_nonzero(diag):
        try:
            splu(M.tocsc())
        except RuntimeError as exc:
            raise ValidationError(f"mass operator is singular: {exc}") from exc


def _shifted_inverse(pair: SpectralPair, sigma: float) -> LinearOperator:
    """``(K - sigma M)^{-1}`` as a linear operator.

    Closed warped products are inverted exactly through the fiber
    eigenbasis: with ``K_F Psi = M_F Psi Lambda`` and ``Psi^T M_F Psi = I``
    the shifted operator decouples into one cyclic tridiagonal base system per
    fiber mode.  Everything else goes through a sparse LU with a symmetric
    minimum-degree ordering.
    """
    n = pair.n_dofs
    f = pair.kron
    if f is not None and len(pair.dof_map) == f.base_stiffness.shape[0] * f.fiber_mass.shape[0]:
        lam, psi = la.eigh(f.fiber_stiffness.toarray(), f.fiber_mass.toarray())
        nb, nf = f.base_stiffness.shape[0], len(lam)
        blocks = sp.kron(sp.eye(nf), f.base_stiffness) + sp.diags(
            np.kron(lam, f.fiber_weight) - sigma * np.tile(f.base_mass, nf))
        lu = splu(blocks.tocsc(), permc_spec="MMD_AT_PLUS_A",
                  options=dict(SymmetricMode=True))

        def solve(x):
            X = np.asarray(x, dtype=float).reshape(nb, nf)
            Z = lu.solve(np.ascontiguousarray((X @ psi).T).ravel()).reshape(nf, nb).T
            return (Z @ psi.T).ravel()
    else:
        A = (pair.stiffness - sigma * pair.mass).tocsc()
        lu = splu(A, permc_spec="MMD_AT_PLUS_A", options=dict(SymmetricMode=True))

        def solve(x):
            return lu.solve(np.asarray(x, dtype=float).ravel())

    return LinearOperator((n, n), matvec=solve, dtype=float)


def residual_norms(K, M, values, vectors):
    """``||K u - lambda M u|| / ||M u||`` for each pair."""
    Mu = M @ vectors
    R = K @ vectors - Mu * values[None, :]
    return np.linalg.norm(R, axis=0) / np.linalg.norm(Mu, axis=0)


def smallest_eigs(pair: SpectralPair, k: int, tol: float = DEFAULT_TOL, *,
                  seed: int = DEFAULT_SEED, cluster_tol: float = DEFAULT_CLUSTER_TOL,
                  return_vectors: bool = False, maxiter: int | None = None) -> SpectrumResult:
    """The ``k`` smallest eigenpairs by shift-invert Lanczos (ARPACK).

    The shift ``sigma = -1e-8 * trace(K) / n`` keeps ``K - sigma M`` definite
    in the presence of the constant zero mode.  The start vector comes from a
    seeded generator, so repeated calls return identical results.
    """
    n = pair.n_dofs
    if int(k) != k or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    if k > n - 1:
        raise ValidationError(f"k = {k} exceeds dof count - 1 = {n - 1}")
    if not tol > 0:
        raise ValidationError("tolerance must be positive")
    K = pair.stiffness.tocsc()
    M = pair.mass.tocsc()
    _check_mass(M)
    sigma = -1e-8 * float(K.diagonal().sum()) / n
    v0 = np.random.default_rng(seed).standard_normal(n)
    try:
        vals, vecs = eigsh(K, k=int(k), M=M, sigma=sigma, which="LM", v0=v0, tol=0.0,
                           maxiter=maxiter, OPinv=_shifted_inverse(pair, sigma))
    except ArpackNoConvergence as exc:
        res = None
        if exc.eigenvalues is not None and len(exc.eigenvalues):
            res = residual_norms(K, M, exc.eigenvalues, exc.eigenvectors)
        raise EigenSolverError(f"eigensolver did not converge: {exc}", residuals=res) from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    res = residual_norms(K, M, vals, vecs)
    bad = res > tol * np.maximum(1.0, np.abs(vals))
    if np.any(bad):
        raise EigenSolverError(
            f"residuals {res[bad]} exceed tolerance {tol}", residuals=res)
    return SpectrumResult(
        eigenvalues=vals,
        multiplicities=cluster_multiplicities(vals, cluster_tol),
        residuals=res,
        k_requested=int(k),
        cluster_tol=cluster_tol,
        vectors=vecs if return_vectors else None,
    )


def dense_eigs(pair: SpectralPair, k: int) -> np.ndarray:
    """Reference: the ``k`` smallest eigenvalues from a dense LAPACK solve."""
    K = pair.stiffness.toarray() if sp.issparse(pair.stiffness) else np.asarray(pair.stiffness)
    M = pair.mass.toarray() if sp.issparse(pair.mass) else np.asarray(pair.mass)
    return la.eigh(K, M, eigvals_only=True, subset_by_index=[0, int(k) - 1])
