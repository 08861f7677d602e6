"""Named experiment configurations for the verification checks.

Each preset is a check name plus overrides of that check's config
dataclass.  The first preset listed for a check is its default.
"""

from __future__ import annotations

import math

from fibrespec.errors import ValidationError

PRESETS = {
    # product formula
    "torus": ("eq1", {"fiber": "circle", "fiber_length": 4 * math.pi, "n": 64, "fiber_n": 64}),
    "circle-sphere": ("eq1", {"fiber": "sphere", "n": 64, "subdiv": 3}),
    "circle-point": ("eq1", {"fiber": "point", "n": 64}),
    # warped products with a shrunk round fiber
    "warped-small-fiber": ("t1_1", {"fiber_radius": 0.8, "warp_amp": 0.3}),
    "warped-unit-fiber": ("t1_1", {"fiber_radius": 1.0, "warp_amp": 0.3}),
    "warped-constant": ("t1_1", {"fiber_radius": 0.8, "warp_amp": 0.0, "warp_mean": 1.0}),
    # canonical variations
    "canonical-circle-sphere": ("t1_2", {"family": "product", "rho": 0.5, "I": 3}),
    "squashed-s7": ("t1_2", {"family": "squashed-sphere", "q": 1, "rho": 0.3}),
    "squashed-cp3": ("t1_2", {"family": "squashed-cp", "q": 1, "rho": 0.5}),
    "squashed-s15": ("t1_2", {"family": "squashed-s15", "rho": 0.4}),
    # tubes in S^1 x R; tube-cos also moves the centerline so X differs from its symmetrization
    "tube-cos": ("t1_3", {"width_mean": 0.5, "width_amp": 0.2, "center_amp": 0.2}),
    "tube-cos-centered": ("t1_3", {"width_mean": 0.5, "width_amp": 0.2}),
    "tube-hole": ("t1_3", {"width_mean": 0.5, "width_amp": 0.2, "hole_s": 0.0, "hole_q": 0.0,
                           "hole_radius": 0.2}),
    "strip-centered": ("t1_3", {"width_mean": 0.5, "width_amp": 0.0}),
    "strip-offset": ("t1_3", {"width_mean": 0.5, "width_amp": 0.0, "center_shift": 0.3}),
    "faber-krahn-2d": ("fk2d", {}),
    # bands in S^1 x r_M S^2
    "band-varying": ("t1_4", {"fiber_radius": 0.9, "theta_mean": 1.0, "theta_amp": 0.3,
                              "tilt_amp": 0.25}),
    "band-fixed": ("t1_4", {"fiber_radius": 1.0, "theta_mean": 1.2, "theta_amp": 0.0,
                            "tilt_amp": 0.0}),
    "ball-shrunk": ("c1_5", {"r": 1.0, "fiber_radius": 0.9}),
    "ball-unit": ("c1_5", {"r": 1.0, "fiber_radius": 1.0}),
    "rearrange-100": ("rearrange", {"trials": 100}),
    "closedform": ("closedform", {}),
}


def preset(name: str, check: str | None = None) -> dict:
    """Overrides of the named preset, checked against ``check`` when given."""
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    owner, overrides = PRESETS[name]
    if check is not None and owner != check:
        raise ValidationError(f"preset {name!r} belongs to check {owner!r}, not {check!r}")
    return dict(overrides)


def presets_for(check: str) -> list:
    return [name for name, (owner, _) in PRESETS.items() if owner == check]


def default_preset(check: str) -> str:
    names = presets_for(check)
    if not names:
        raise ValidationError(f"no presets for check {check!r}")
    return names[0]
