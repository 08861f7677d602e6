"""Fiberwise rearrangement of discrete fields onto model fibers.

With lumped quadrature a nodal field on a fiber is the piecewise-constant
function taking the value ``F_v`` on a dual cell of volume ``mu_v``.  Its
rearrangement is therefore a step function of the enclosed volume: sort the
vertices by value (ties by index) and lay their volumes end to end from the
centre of the model fiber (south pole or origin).  Level-set volumes, and
hence every power integral, are preserved exactly by construction.

The profile is sampled back onto a mesh of the model fiber either as that
step function (``mode="step"``, the exact quantile) or through the linear
interpolant of the step midpoints (``mode="linear"``), which is the variant
used when Dirichlet energies are compared.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fibrespec.errors import ValidationError
from fibrespec.geometry import (
    FiberVolumeProfile,
    Grid1D,
    MeshManifold,
    ball_volume,
    cap_radius_from_volume,
    cap_volume,
    make_band_domain,
    make_tube_domain,
    radius_from_volume,
    sphere_volume,
)

MODELS = ("spherical", "euclidean", "hyperbolic")
VOLUME_RTOL = 1e-8
PUSH_MODES = ("step", "linear")


@dataclass(frozen=True)
class FiberModel:
    """Model fiber: round sphere ``S^m_V``, Euclidean disk or hyperbolic disk.

    ``total_volume`` is mandatory for the spherical model; for the disks it
    is filled in from the data being rearranged when left as None.
    """

    kind: str
    dim: int
    total_volume: float | None = None

    def __post_init__(self):
        if self.kind not in MODELS:
            raise ValidationError(f"unknown fiber model {self.kind!r}; choose from {MODELS}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValidationError(f"fiber dimension must be a positive integer, got {self.dim}")
        if self.kind == "spherical" and self.total_volume is None:
            raise ValidationError("the spherical model needs its total volume")
        if self.total_volume is not None and not (self.total_volume > 0
                                                  and math.isfinite(self.total_volume)):
            raise ValidationError("model total volume must be positive and finite")

    def with_volume(self, volume: float) -> "FiberModel":
        return FiberModel(kind=self.kind, dim=self.dim, total_volume=float(volume))


def model_for_mesh(mesh: MeshManifold) -> FiberModel:
    """The model fiber a generated mesh discretizes, with its discrete volume."""
    kinds = {"sphere": "spherical", "circle": "spherical", "disk": "euclidean",
             "interval": "euclidean", "hyperbolic_disk": "hyperbolic"}
    if mesh.kind not in kinds:
        raise ValidationError(f"mesh of kind {mesh.kind!r} is not a model fiber")
    return FiberModel(kind=kinds[mesh.kind], dim=mesh.dim, total_volume=mesh.total_volume)


def enclosed_volume(model: FiberModel, mesh: MeshManifold) -> np.ndarray:
    """Volume coordinate of every vertex: measure of the centred ball through it.

    The exact geometric ball volume is expressed as a fraction of the exact
    model volume and then scaled to the mesh's discrete total, so that the
    coordinate spans ``[0, mesh.total_volume]``.
    """
    expected = model_for_mesh(mesh)
    if expected.kind != model.kind or expected.dim != model.dim:
        raise ValidationError(
            f"model mismatch: profile lives on a {model.kind} {model.dim}-fiber, "
            f"mesh discretizes a {expected.kind} {expected.dim}-fiber")
    x = mesh.vertices
    total = mesh.total_volume
    if mesh.kind == "sphere":
        radius = mesh.meta["radius"]
        cosang = np.clip(-x[:, 2] / np.linalg.norm(x, axis=1), -1.0, 1.0)
        dist = radius * np.arccos(cosang)
        full = sphere_volume(2) * radius ** 2
        ball = np.array([cap_volume(2, d, radius) for d in dist])
    elif mesh.kind == "circle":
        length = mesh.period[0]
        s = np.mod(x[:, 0], length)
        ball = 2.0 * np.minimum(s, length - s)
        full = length
    elif mesh.kind == "interval":
        half = mesh.meta.get("half_length", float(np.max(np.abs(x[:, 0]))))
        ball = 2.0 * np.abs(x[:, 0])
        full = 2.0 * half
    elif mesh.kind == "disk":
        r = np.linalg.norm(x, axis=1)
        ball = math.pi * r ** 2
        full = math.pi * mesh.meta["radius"] ** 2
    else:
        geo = 2.0 * np.arctanh(np.clip(np.linalg.norm(x, axis=1), 0.0, 1.0 - 1e-16))
        ball = np.array([ball_volume(2, g, "hyperbolic") for g in geo])
        full = ball_volume(2, mesh.meta["geodesic_radius"], "hyperbolic")
    return np.clip(ball / full, 0.0, 1.0) * total


@dataclass(frozen=True)
class RadialProfile:
    """Nondecreasing step function of enclosed volume on a model fiber.

    Step ``i`` covers ``[lower[i], lower[i] + volumes[i])`` with value
    ``values[i]``; ``knots`` gives the step midpoints used by linear sampling.
    """

    model: FiberModel
    lower: np.ndarray
    volumes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vols = np.asarray(self.volumes, dtype=float)
        low = np.asarray(self.lower, dtype=float)
        if not (vals.shape == vols.shape == low.shape) or vals.ndim != 1 or len(vals) == 0:
            raise ValidationError("profile arrays must be non-empty and of equal length")
        if np.any(np.diff(vals) < 0):
            raise ValidationError("profile values must be nondecreasing in enclosed volume")
        if np.any(vols <= 0) or low[0] != 0.0 or np.any(np.diff(low) <= 0):
            raise ValidationError("profile steps must have positive volume and start at 0")
        for name, arr in (("values", vals), ("volumes", vols), ("lower", low)):
            object.__setattr__(self, name, arr)

    @property
    def fiber_dim(self) -> int:
        return self.model.dim

    @property
    def total_volume(self) -> float:
        return float(math.fsum(self.volumes))

    @property
    def knots(self):
        """``(enclosed_volume, value)`` at the step midpoints."""
        return self.lower + 0.5 * self.volumes, self.values

    def value_at(self, v, mode: str = "step") -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if mode == "step":
            upper = self.lower + self.volumes
            idx = np.searchsorted(upper, v, side="right")
            return self.values[np.clip(idx, 0, len(self.values) - 1)]
        if mode == "linear":
            mid, vals = self.knots
            return np.interp(v, mid, vals)
        raise ValidationError(f"unknown sampling mode {mode!r}; choose from {PUSH_MODES}")

    def distribution(self, t: float) -> float:
        """Volume of ``{profile < t}``."""
        return math.fsum(self.volumes[self.values < t])

    def power_integral(self, p: float) -> float:
        return math.fsum(self.volumes * self.values ** p)


def _sorted_order(values):
    return np.lexsort((np.arange(len(values)), values))


def rearrange_fiber(values, volumes, target: FiberModel) -> RadialProfile:
    """Rearrange one fiber's nodal values onto the model fiber ``target``."""
    values = np.asarray(values, dtype=float)
    volumes = np.asarray(volumes, dtype=float)
    if values.ndim != 1 or values.shape != volumes.shape or len(values) == 0:
        raise ValidationError("need one volume per value")
    if not np.all(np.isfinite(values)):
        raise ValidationError("field values must be finite")
    if not np.all(volumes > 0):
        raise ValidationError("vertex volumes must be positive")
    total = math.fsum(volumes)
    if target.kind == "spherical":
        if abs(total - target.total_volume) > VOLUME_RTOL * target.total_volume:
            raise ValidationError(
                f"fiber volume {total:.12g} does not match the model volume "
                f"{target.total_volume:.12g}")
    else:
        target = target.with_volume(total)
    order = _sorted_order(values)
    vols = volumes[order]
    lower = np.concatenate([[0.0], np.cumsum(vols)[:-1]])
    return RadialProfile(model=target, lower=lower, volumes=vols, values=values[order])


def push_profile(profile: RadialProfile, target_mesh: MeshManifold, mode: str = "step",
                 coordinates=None) -> np.ndarray:
    """Sample a profile at the vertices of a mesh of its model fiber.

    ``coordinates`` may pass precomputed :func:`enclosed_volume` values.
    """
    if mode not in PUSH_MODES:
        raise ValidationError(f"unknown sampling mode {mode!r}; choose from {PUSH_MODES}")
    total = profile.total_volume
    if abs(target_mesh.total_volume - total) > VOLUME_RTOL * total:
        raise ValidationError(
            f"model mismatch: mesh volume {target_mesh.total_volume:.12g} "
            f"differs from profile volume {total:.12g}")
    if coordinates is None:
        coordinates = enclosed_volume(profile.model, target_mesh)
    return profile.value_at(coordinates, mode)


def write_profile_csv(profile: RadialProfile, path) -> None:
    """CSV with columns ``enclosed_volume,value`` (one row per step start)."""
    out = io.StringIO()
    model = profile.model
    out.write(f"# model={model.kind} dim={model.dim} total_volume={profile.total_volume!r}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["enclosed_volume", "value"])
    for v, t in zip(profile.lower.tolist(), profile.values.tolist()):
        writer.writerow([repr(v), repr(t)])
    Path(path).write_text(out.getvalue(), encoding="utf-8")


def read_profile_csv(path) -> RadialProfile:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("#"):
        raise ValidationError(f"{path}: missing model header line")
    try:
        header = dict(item.split("=", 1) for item in text[0][1:].split())
        total = float(header["total_volume"])
        rows = list(csv.reader(text[1:]))[1:]
        lower = np.array([float(r[0]) for r in rows])
        values = np.array([float(r[1]) for r in rows])
        model = FiberModel(kind=header["model"], dim=int(header["dim"]), total_volume=total)
    except (KeyError, ValueError, IndexError) as exc:
        raise ValidationError(f"{path}: malformed profile CSV ({exc})") from exc
    volumes = np.diff(np.append(lower, total))
    return RadialProfile(model=model, lower=lower, volumes=volumes, values=values)


@dataclass(frozen=True)
class FiberedField:
    """Values on ``base x fiber_mesh``, one row per base node.

    ``profiles`` is filled in by :func:`rearrange_field` with the per-fiber
    step profiles the values were sampled from.
    """

    base: Grid1D
    fiber_mesh: MeshManifold
    values: np.ndarray
    profiles: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.base.n, self.fiber_mesh.n_vertices):
            raise ValidationError(
                f"field shape {vals.shape} does not match "
                f"({self.base.n}, {self.fiber_mesh.n_vertices})")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("field values must be finite")
        object.__setattr__(self, "values", vals)

    def fiber_profiles(self, target: FiberModel) -> list:
        vols = self.fiber_mesh.lumped_volume
        return [rearrange_fiber(row, vols, target) for row in self.values]


def rearrange_field(fibered: FiberedField, target: FiberModel | None = None,
                    target_mesh: MeshManifold | None = None, mode: str = "step") -> FiberedField:
    """Rearrange every fiber and sample the profiles on ``target_mesh``.

    Both default to the field's own fiber mesh, which must then be a model
    fiber (an icosphere, a disk, ...).
    """
    if target_mesh is None:
        target_mesh = fibered.fiber_mesh
    if target is None:
        target = model_for_mesh(target_mesh)
        if target.kind == "spherical":
            target = target.with_volume(fibered.fiber_mesh.total_volume)
    profiles = fibered.fiber_profiles(target)
    coords = enclosed_volume(profiles[0].model, target_mesh)
    rows = [push_profile(p, target_mesh, mode, coordinates=coords) for p in profiles]
    return FiberedField(base=fibered.base, fiber_mesh=target_mesh, values=np.vstack(rows),
                        profiles=tuple(profiles))


def lipschitz_gap(F: FiberedField, G: FiberedField, target: FiberModel | None = None,
                  target_mesh: MeshManifold | None = None) -> tuple:
    """``(||G_* - F_*||_inf, ||G - F||_inf)`` with step sampling on a common model mesh."""
    if F.base.n != G.base.n or F.fiber_mesh.n_vertices != G.fiber_mesh.n_vertices:
        raise ValidationError("fields must share base and fiber mesh")
    if not np.array_equal(F.fiber_mesh.lumped_volume, G.fiber_mesh.lumped_volume):
        raise ValidationError("fields must share the fiber mesh")
    Fs = rearrange_field(F, target, target_mesh, mode="step")
    Gs = rearrange_field(G, target, target_mesh, mode="step")
    lhs = float(np.max(np.abs(Gs.values - Fs.values)))
    rhs = float(np.max(np.abs(G.values - F.values)))
    return lhs, rhs


def gradient_constant(m: int, volume: float, ric_lower: float) -> float:
    """``(V_m / V)^(1/m) sqrt((m-1)/k)`` for a fiber of volume V with ``Ric >= k``."""
    if int(m) != m or m < 2:
        raise ValidationError("gradient comparison needs fiber dimension >= 2")
    if not (volume > 0 and ric_lower > 0):
        raise ValidationError("volume and Ricci bound must be positive")
    return (sphere_volume(m) / volume) ** (1.0 / m) * math.sqrt((m - 1) / ric_lower)


def symmetrize_domain(profile: FiberVolumeProfile, *, resolution: int = 64,
                      rings: int | None = None) -> MeshManifold:
    """Mesh of the fiberwise symmetrized domain with fiber volumes ``V(s)``.

    Euclidean model: ``{|q| < radius_from_volume(m, V(s))}``, a tube for
    ``m = 1`` and a band of flat disks for ``m = 2``.  Spherical model: the
    band of south-pole caps in the unit sphere whose volume fraction is
    ``V(s) / V``.  ``resolution`` sets the fiber resolution of a tube;
    ``rings`` that of a band (default ``resolution // 8``).
    """
    m = profile.fiber_dim
    base = profile.base
    vals = profile.values
    if rings is None:
        rings = max(1, int(resolution) // 8)
    if profile.fiber_model == "hyperbolic":
        raise ValidationError("meshed hyperbolic symmetrization is not supported")
    if m not in (1, 2):
        raise ValidationError(f"meshed symmetrization needs fiber dimension 1 or 2, got {m}")
    if profile.fiber_model == "euclidean":
        radius = np.array([radius_from_volume(m, v) for v in vals])
        if m == 1:
            return make_tube_domain(base, radius, resolution)
        return make_band_domain(base, radius, rings, model="euclidean")
    V = profile.total_volume
    if np.any(vals >= V):
        raise ValidationError("spherical symmetrization needs V(s) < V everywhere")
    Vm = sphere_volume(m)
    radius = np.array([cap_radius_from_volume(m, v / V * Vm) for v in vals])
    if m == 1:
        return make_tube_domain(base, radius, resolution)
    return make_band_domain(base, radius, rings, model="spherical", fiber_radius=1.0)
