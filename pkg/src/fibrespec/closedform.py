"""Exact spectra and first eigenvalues of model spaces.

Covers round spheres, projective spaces and the squashed (canonically varied)
homogeneous fibrations ``S^{4q+3} -> HP^q``, ``CP^{2q+1} -> HP^q`` and
``S^15 -> S^8``, together with the rule that predicts when shrinking the
fibers of a totally geodesic submersion leaves the low spectrum of the base
unchanged.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from fibrespec.errors import ValidationError
from fibrespec.warped import FiberSpectrum

CONTINUITY_RTOL = 1e-12


def _positive_int(name, value, minimum=1):
    if int(value) != value or value < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}, got {value}")
    return int(value)


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ValidationError(f"{name} must be positive and finite, got {value}")
    return float(value)


def sphere_multiplicity(m: int, k: int) -> int:
    """Dimension of the degree-k spherical harmonics on ``S^m``."""
    top = math.comb(m + k, k)
    low = math.comb(m + k - 2, k - 2) if k >= 2 else 0
    return top - low


def sphere_spectrum(m: int, scale: float, k_max: int) -> FiberSpectrum:
    """``k(k+m-1)/scale^2`` for ``k = 0..k_max`` on the round m-sphere of radius ``scale``."""
    m = _positive_int("m", m)
    scale = _positive("scale", scale)
    k_max = _positive_int("k_max", k_max, minimum=0)
    ks = np.arange(k_max + 1)
    values = ks * (ks + m - 1) / scale ** 2
    mult = [sphere_multiplicity(m, int(k)) for k in ks]
    return FiberSpectrum(values=values, multiplicities=np.asarray(mult), source="closedform")


def lambda1_cpn(n: int) -> float:
    """First eigenvalue of ``CP^n`` with the Fubini-Study metric (curvature in [1, 4])."""
    return 4.0 * (_positive_int("n", n) + 1)


def lambda1_hpq(q: int) -> float:
    """First eigenvalue of ``HP^q`` with its quaternionic Kahler metric (curvature in [1, 4])."""
    return 8.0 * (_positive_int("q", q) + 1)


@dataclass(frozen=True)
class PiecewiseLambda1:
    """``small_branch`` for ``rho <= breakpoint``, ``large_branch(rho)`` beyond."""

    name: str
    breakpoint: float
    small_branch: float
    large_branch: Callable[[float], float]

    def __call__(self, rho: float) -> float:
        rho = _positive("rho", rho)
        return self.small_branch if rho <= self.breakpoint else float(self.large_branch(rho))

    def continuity_error(self) -> float:
        """Relative jump between the branches at the breakpoint."""
        return abs(self.large_branch(self.breakpoint) - self.small_branch) / abs(self.small_branch)

    def decreasing_beyond(self, samples: int = 64, span: float = 10.0) -> bool:
        rhos = self.breakpoint * np.linspace(1.0, span, samples + 1)[1:]
        vals = np.array([self.large_branch(r) for r in rhos])
        return bool(np.all(np.diff(vals) < 0) and vals[0] < self.small_branch)


def squashed_sphere_family(q: int) -> PiecewiseLambda1:
    """``S^{4q+3}`` over ``HP^q`` with fibers ``S^3`` shrunk by ``rho``."""
    q = _positive_int("q", q)
    return PiecewiseLambda1(name="squashed-sphere", breakpoint=math.sqrt(3.0) / (2.0 * math.sqrt(q + 2)),
                            small_branch=8.0 * (q + 1),
                            large_branch=lambda rho: 4.0 * q + 3.0 / rho ** 2)


def squashed_cp_family(q: int) -> PiecewiseLambda1:
    """``CP^{2q+1}`` over ``HP^q`` with curvature-4 ``S^2`` fibers shrunk by ``rho``."""
    q = _positive_int("q", q)
    return PiecewiseLambda1(name="squashed-cp", breakpoint=1.0, small_branch=8.0 * (q + 1),
                            large_branch=lambda rho: 8.0 * (q + 1.0 / rho ** 2))


def squashed_s15_family() -> PiecewiseLambda1:
    """``S^15`` over ``S^8(1/2)`` with ``S^7`` fibers shrunk by ``rho``."""
    return PiecewiseLambda1(name="squashed-s15", breakpoint=math.sqrt(7.0) / (2.0 * math.sqrt(6.0)),
                            small_branch=32.0, large_branch=lambda rho: 8.0 + 7.0 / rho ** 2)


def lambda1_squashed_sphere(q: int, rho: float) -> float:
    return squashed_sphere_family(q)(rho)


def lambda1_squashed_cp(q: int, rho: float) -> float:
    return squashed_cp_family(q)(rho)


def lambda1_squashed_s15(rho: float) -> float:
    return squashed_s15_family()(rho)


FAMILIES = {
    "squashed-sphere": squashed_sphere_family,
    "squashed-cp": squashed_cp_family,
    "squashed-s15": lambda q=None: squashed_s15_family(),
}


@dataclass(frozen=True)
class Prediction:
    applies: bool
    predicted: np.ndarray
    threshold: float


def canonical_variation_predict(base_spectrum, m: int, rho: float, ric_lower: float,
                                I: int) -> Prediction:
    """Whether fibers of Ricci curvature ``>= (m-1) a^2`` shrunk by ``rho`` keep lambda_0..lambda_I.

    The rule applies when ``lambda_I(base) <= m a^2 / rho^2``; the prediction
    is then the base's own first ``I + 1`` eigenvalues.
    """
    m = _positive_int("m", m, minimum=2)
    rho = _positive("rho", rho)
    I = _positive_int("I", I)
    ric_lower = _positive("ric_lower", ric_lower)
    vals = np.asarray(getattr(base_spectrum, "eigenvalues", base_spectrum), dtype=float)
    if len(vals) <= I:
        raise ValidationError(f"base spectrum has {len(vals)} values, lambda_{I} needed")
    if np.any(np.diff(vals) < 0):
        raise ValidationError("base spectrum must be ascending")
    a2 = ric_lower / (m - 1)
    threshold = m * a2 / rho ** 2
    applies = bool(vals[I] <= threshold)
    predicted = vals[:I + 1].copy() if applies else np.array([])
    return Prediction(applies=applies, predicted=predicted, threshold=threshold)


def lichnerowicz_bound(m: int, k: float) -> float:
    """Lower bound ``m k / (m - 1)`` on lambda_1 when ``Ric >= k > 0``."""
    m = _positive_int("m", m, minimum=2)
    return m * _positive("k", k) / (m - 1)


def parse_rho_grid(text: str) -> np.ndarray:
    """``start:stop:step`` grid including ``stop`` when it is within half a step."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"rho grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(f"rho grid must be numeric: {text!r}") from exc
    if not step > 0 or not start > 0:
        raise ValidationError("rho grid needs a positive start and step")
    if stop < start:
        raise ValidationError(f"empty rho grid {text!r}")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    # rounding strips the representation noise of start + i * step
    return np.round(start + step * np.arange(count), 12)


def tabulate(family: str, rhos, q: int | None = 1) -> str:
    """CSV of ``(rho, lambda1)`` for a named squashed family."""
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    curve = FAMILIES[family](q)
    rhos = np.asarray(rhos, dtype=float)
    if len(rhos) == 0:
        raise ValidationError("empty rho grid")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rho", "lambda1"])
    for r in rhos:
        writer.writerow([repr(float(r)), repr(float(curve(float(r))))])
    return out.getvalue()
