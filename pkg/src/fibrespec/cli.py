"""Command-line front end.

Subcommands: ``geom`` (write a mesh), ``spectrum`` (smallest eigenvalues),
``symmetrize`` (domains and fields), ``verify`` (comparison checks) and
``tabulate`` (closed-form first eigenvalues over a rho grid).

Exit codes: 0 success, 1 invalid input, 2 eigensolver failure, 3 a
verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from fibrespec import __version__
from fibrespec import closedform as cf
from fibrespec import presets as presets_mod
from fibrespec import verify
from fibrespec.assembly import apply_dirichlet, assemble
from fibrespec.eigensolve import DEFAULT_SEED, DEFAULT_TOL, smallest_eigs
from fibrespec.errors import EigenSolverError, ValidationError
from fibrespec.geometry import (
    Hole,
    fiber_volumes,
    grid_as_mesh,
    make_circle_grid,
    make_disk_mesh,
    make_icosphere,
    make_interval_grid,
    make_poincare_disk,
    make_product_mesh,
    make_rectangle_mesh,
    make_tube_domain,
    read_mesh,
    write_mesh,
)
from fibrespec.rearrange import FiberedField, model_for_mesh, rearrange_field, symmetrize_domain
from fibrespec.warped import make_warped_spec, warped_spectrum

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_CHECK_FAILED = 0, 1, 2, 3
SEED_ENV = "SPECTRAL_SEED"
TWO_PI = 2 * math.pi

# parameters each generator reads, with their defaults
MANIFOLDS = {
    "circle": {"length": TWO_PI, "n": 64},
    "interval": {"length": math.pi, "n": 64},
    "icosphere": {"subdiv": 3, "radius": 1.0},
    "rectangle": {"width": 1.0, "height": 1.0, "nx": 32, "ny": 32},
    "disk": {"radius": 1.0, "rings": 16},
    "poincare-disk": {"radius": 1.0, "rings": 16},
    "tube": {"length": TWO_PI, "n": 128, "resolution": 64, "width_mean": 0.5, "width_amp": 0.2,
             "center_amp": 0.0, "center_shift": 0.0, "hole": None},
    "band": {"length": TWO_PI, "n": 24, "rings": 6, "fiber_radius": 1.0, "theta_mean": 1.0,
             "theta_amp": 0.0, "tilt_amp": 0.0},
    "product": {"length": TWO_PI, "n": 64, "fiber": "sphere", "fiber_length": TWO_PI,
                "fiber_n": 64, "subdiv": 3, "radius": 1.0, "warp_mean": 1.0, "warp_amp": 0.0},
    "warped": {"length": TWO_PI, "n": 512, "fiber_dim": 2, "fiber_radius": 1.0, "warp_mean": 1.0,
               "warp_amp": 0.0, "fiber_modes": 12},
    "mesh": {"mesh": None},
}
MESH_PARAMS = sorted({key for params in MANIFOLDS.values() for key in params})
FLOAT_PARAMS = {"length", "radius", "width", "height", "width_mean", "width_amp", "center_amp",
                "center_shift", "fiber_radius", "theta_mean", "theta_amp", "tilt_amp",
                "fiber_length", "warp_mean", "warp_amp"}
INT_PARAMS = {"n", "subdiv", "nx", "ny", "rings", "resolution", "fiber_n", "fiber_dim",
              "fiber_modes"}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    atomic_write(path, lambda tmp: Path(tmp).write_text(text, encoding="utf-8"))


def atomic_write(path, writer) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".",
                               prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(out, text)


def _check_output_dir(*paths) -> None:
    for p in paths:
        if p is not None and not Path(p).parent.resolve().is_dir():
            raise ValidationError(f"output directory of {p} does not exist")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    config = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{number}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValidationError(f"{path}:{number}: empty key")
        config[key.replace("-", "_")] = value
    return config


def resolve_seed(seed) -> int:
    """``SPECTRAL_SEED`` wins over the flag; the flag wins over the default."""
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return DEFAULT_SEED if seed is None else int(seed)


def _convert(action, value):
    if action.type is None or not isinstance(value, str):
        return value
    try:
        return action.type(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"invalid value {value!r} for {action.dest}") from exc


def apply_config(args, parser, extras: dict) -> None:
    """Fill options not given on the command line from ``--config``.

    Keys the subcommand does not know go to ``extras`` for ``verify`` and are
    rejected everywhere else.
    """
    if not getattr(args, "config", None):
        return
    actions = {a.dest: a for a in parser._actions}
    for key, value in read_config_file(args.config).items():
        if key in ("config", "command", "help"):
            raise ValidationError(f"config key {key!r} is not allowed")
        if key in actions:
            if getattr(args, key, None) is None:
                if isinstance(actions[key], argparse._StoreTrueAction):
                    value = value.lower() in ("1", "true", "yes")
                setattr(args, key, _convert(actions[key], value))
        elif args.command == "verify":
            extras.setdefault(key, value)
        else:
            raise ValidationError(f"unknown config key {key!r} for {args.command}")


def parse_overrides(tokens) -> dict:
    """``--key value`` / ``--key=value`` pairs left over by argparse."""
    out = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or len(tok) <= 2:
            raise ValidationError(f"unexpected argument {tok!r}")
        if "=" in tok:
            key, value = tok[2:].split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise ValidationError(f"missing value for {tok}")
            key, value = tok[2:], tokens[i + 1]
            i += 2
        out[key.replace("-", "_")] = value
    return out


def typed_config(cls, overrides: dict) -> dict:
    """Convert string overrides to the field types of a config dataclass."""
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(overrides) - set(fields))
    if unknown:
        raise ValidationError(f"unknown parameters for this check: {unknown}; "
                              f"known: {sorted(fields)}")
    out = {}
    for key, value in overrides.items():
        kind = fields[key].type
        if not isinstance(value, str):
            out[key] = value
            continue
        try:
            if kind == "int":
                out[key] = int(value)
            elif kind == "float":
                out[key] = float(value)
            else:
                out[key] = value
        except ValueError as exc:
            raise ValidationError(f"parameter {key} expects {kind}, got {value!r}") from exc
    return out


# ---------------------------------------------------------------------------
# manifold generators
# ---------------------------------------------------------------------------


def manifold_params(args) -> dict:
    """Defaults of ``args.manifold`` overridden by given flags; stray flags are errors."""
    if args.manifold not in MANIFOLDS:
        raise ValidationError(f"unknown manifold {args.manifold!r}; choose from {sorted(MANIFOLDS)}")
    defaults = MANIFOLDS[args.manifold]
    given = {k: getattr(args, k) for k in MESH_PARAMS if getattr(args, k, None) is not None}
    stray = sorted(set(given) - set(defaults))
    if stray:
        raise ValidationError(f"manifold {args.manifold!r} does not take {stray}")
    params = {**defaults, **given}
    if args.manifold == "mesh" and params["mesh"] is None:
        raise ValidationError("--mesh FILE is required for manifold 'mesh'")
    return params


def _cosine(mean, amp, length):
    return lambda s: mean + amp * np.cos(TWO_PI * np.asarray(s) / length)


def _parse_holes(text):
    if not text:
        return ()
    holes = []
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 3:
            raise ValidationError(f"hole must be s,q,radius, got {chunk!r}")
        try:
            s, q, r = (float(x) for x in parts)
        except ValueError as exc:
            raise ValidationError(f"hole must be numeric, got {chunk!r}") from exc
        holes.append(Hole(s=s, q=q, radius=r))
    return tuple(holes)


def build_manifold(name: str, p: dict):
    """Mesh (or product mesh) for a named generator and its parameters."""
    if name == "circle":
        return grid_as_mesh(make_circle_grid(p["length"], p["n"]))
    if name == "interval":
        return grid_as_mesh(make_interval_grid(0.0, p["length"], p["n"]))
    if name == "icosphere":
        return make_icosphere(p["subdiv"], p["radius"])
    if name == "rectangle":
        return make_rectangle_mesh(p["width"], p["height"], p["nx"], p["ny"])
    if name == "disk":
        return make_disk_mesh(p["radius"], p["rings"])
    if name == "poincare-disk":
        return make_poincare_disk(p["radius"], p["rings"])
    if name == "tube":
        base = make_circle_grid(p["length"], p["n"])
        omega = TWO_PI / p["length"]
        return make_tube_domain(
            base, _cosine(p["width_mean"], p["width_amp"], p["length"]), p["resolution"],
            center=lambda s: p["center_shift"] + p["center_amp"] * np.sin(omega * np.asarray(s)),
            holes=_parse_holes(p["hole"]))
    if name == "band":
        cfg = verify.BandConfig(length=p["length"], n=p["n"], rings=p["rings"],
                                fiber_radius=p["fiber_radius"], theta_mean=p["theta_mean"],
                                theta_amp=p["theta_amp"], tilt_amp=p["tilt_amp"])
        return verify.band_pair(cfg, cfg.n, cfg.rings)[0]
    if name == "product":
        base = make_circle_grid(p["length"], p["n"])
        if p["fiber"] == "circle":
            fiber = make_circle_grid(p["fiber_length"], p["fiber_n"])
        elif p["fiber"] == "sphere":
            fiber = make_icosphere(p["subdiv"], p["radius"])
        else:
            raise ValidationError(f"product fiber must be circle or sphere, got {p['fiber']!r}")
        return make_product_mesh(base, fiber, _cosine(p["warp_mean"], p["warp_amp"], p["length"]))
    if name == "mesh":
        path = Path(p["mesh"])
        if not path.is_file():
            raise ValidationError(f"mesh file {path} does not exist")
        return read_mesh(path)
    raise ValidationError(f"manifold {name!r} has no mesh")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_geom(args, extras) -> int:
    params = manifold_params(args)
    if args.manifold in ("product", "warped"):
        raise ValidationError(f"{args.manifold!r} is not exported as a mesh file")
    _check_output_dir(args.out)
    mesh = build_manifold(args.manifold, params)
    if args.out is None:
        with tempfile.TemporaryDirectory() as tmp:
            write_mesh(mesh, Path(tmp) / "mesh.txt")
            sys.stdout.write((Path(tmp) / "mesh.txt").read_text(encoding="utf-8"))
    else:
        atomic_write(args.out, lambda tmp: write_mesh(mesh, tmp))
    return EXIT_OK


def format_spectrum(result, fmt: str) -> str:
    if fmt == "json":
        return result.to_json() + "\n"
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["index", "eigenvalue", "residual"])
        for i, (val, res) in enumerate(zip(result.eigenvalues, result.residuals)):
            writer.writerow([i, repr(float(val)), repr(float(res))])
        return out.getvalue()
    lines = [f"{'index':>5}  {'eigenvalue':>22}  {'residual':>10}"]
    for i, (val, res) in enumerate(zip(result.eigenvalues, result.residuals)):
        lines.append(f"{i:>5}  {float(val):>22.15g}  {float(res):>10.2e}")
    lines.append("multiplicities: " + " ".join(str(int(m)) for m in result.multiplicities))
    return "\n".join(lines) + "\n"


def cmd_spectrum(args, extras) -> int:
    params = manifold_params(args)
    k = 5 if args.k is None else args.k
    tol = DEFAULT_TOL if args.tol is None else args.tol
    fmt = args.format or "json"
    if fmt not in ("json", "csv", "text"):
        raise ValidationError(f"unknown format {fmt!r}")
    boundary = args.boundary or "dirichlet"
    if k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    if not tol > 0:
        raise ValidationError("tolerance must be positive")
    _check_output_dir(args.out)
    seed = resolve_seed(args.seed)
    if args.manifold == "warped":
        length = params["length"]
        fiber = cf.sphere_spectrum(params["fiber_dim"], params["fiber_radius"],
                                   params["fiber_modes"])
        spec = make_warped_spec(length, params["n"],
                                _cosine(params["warp_mean"], params["warp_amp"], length),
                                params["fiber_dim"], fiber)
        result = warped_spectrum(spec, k)
    else:
        mesh = build_manifold(args.manifold, params)
        pair = assemble(mesh, args.mass or "lumped")
        if boundary == "dirichlet" and len(mesh.boundary_vertices):
            pair = apply_dirichlet(pair, mesh)
        result = smallest_eigs(pair, k, tol, seed=seed)
    _emit(format_spectrum(result, fmt), args.out)
    return EXIT_OK


def _volume_csv(profile) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["s", "volume"])
    for s, v in zip(profile.base.nodes.tolist(), np.asarray(profile.values).tolist()):
        writer.writerow([repr(s), repr(v)])
    return out.getvalue()


def _symmetrize_domain(args, params) -> int:
    _check_output_dir(args.out, args.profile_out)
    if args.manifold == "tube":
        X = build_manifold("tube", params)
        profile = fiber_volumes(X)
        Xs = symmetrize_domain(profile, resolution=params["resolution"])
    elif args.manifold == "band":
        cfg = verify.BandConfig(length=params["length"], n=params["n"], rings=params["rings"],
                                fiber_radius=params["fiber_radius"],
                                theta_mean=params["theta_mean"], theta_amp=params["theta_amp"],
                                tilt_amp=params["tilt_amp"])
        _, Xs, profile = verify.band_pair(cfg, cfg.n, cfg.rings)
    else:
        raise ValidationError(f"symmetrize works on tube or band domains, not {args.manifold!r}")
    text = _volume_csv(profile)
    if args.out is None:
        raise ValidationError("--out is required for the symmetrized mesh")
    atomic_write(args.out, lambda tmp: write_mesh(Xs, tmp))
    if args.profile_out is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(args.profile_out, text)
    return EXIT_OK


def read_field(path) -> np.ndarray:
    """Comma-separated matrix with one row per base node."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"field file {path} does not exist")
    try:
        values = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    except ValueError as exc:
        raise ValidationError(f"malformed field file {path}: {exc}") from exc
    return values


def equimeasurability_error(values, volumes, profile) -> float:
    """Largest gap between input and profile distribution functions at the data values."""
    worst = 0.0
    for t in np.unique(values):
        direct = math.fsum(volumes[values < t])
        worst = max(worst, abs(direct - profile.distribution(t)))
    return worst


def _symmetrize_field(args) -> int:
    _check_output_dir(args.out)
    values = read_field(args.field)
    length = TWO_PI if args.length is None else args.length
    subdiv = 3 if args.subdiv is None else args.subdiv
    radius = 1.0 if args.radius is None else args.radius
    fiber = make_icosphere(subdiv, radius)
    if values.shape[1] != fiber.n_vertices:
        raise ValidationError(f"field has {values.shape[1]} columns, icosphere subdivision "
                              f"{subdiv} has {fiber.n_vertices} vertices")
    base = make_circle_grid(length, values.shape[0])
    field = FiberedField(base, fiber, values)
    result = rearrange_field(field, model_for_mesh(fiber))
    out = io.StringIO()
    model = result.profiles[0].model
    out.write(f"# model={model.kind} dim={model.dim} total_volume={model.total_volume!r}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["s", "enclosed_volume", "value"])
    worst = 0.0
    vols = fiber.lumped_volume
    for s, row, prof in zip(base.nodes.tolist(), values, result.profiles):
        for v, t in zip(prof.lower.tolist(), prof.values.tolist()):
            writer.writerow([repr(s), repr(v), repr(t)])
        worst = max(worst, equimeasurability_error(row, vols, prof))
    out.write(f"# equimeasurability max_abs_error={worst!r} "
              f"status={'ok' if worst == 0.0 else 'mismatch'}\n")
    _emit(out.getvalue(), args.out)
    return EXIT_OK


def cmd_symmetrize(args, extras) -> int:
    if args.field is not None:
        if args.manifold is not None:
            raise ValidationError("give either --field or --manifold, not both")
        return _symmetrize_field(args)
    if args.manifold is None:
        raise ValidationError("symmetrize needs --manifold tube|band or --field FILE")
    return _symmetrize_domain(args, manifold_params(args))


def _check_config(name: str, preset: str | None, overrides: dict, seed) -> dict:
    cls = verify.CONFIGS[name]
    config = {}
    if preset is not None:
        config.update(presets_mod.preset(preset, name))
    config.update(typed_config(cls, overrides))
    if "seed" in {f.name for f in dataclasses.fields(cls)} and seed is not None:
        config["seed"] = seed
    return typed_config(cls, config)


def cmd_verify(args, extras) -> int:
    fmt = args.format or "text"
    if fmt not in ("json", "text"):
        raise ValidationError(f"verify writes json or text, not {fmt!r}")
    env_seed = os.environ.get(SEED_ENV)
    seed = resolve_seed(args.seed) if (args.seed is not None or env_seed) else None
    if args.check == "all":
        if args.preset is not None or extras:
            raise ValidationError("'verify all' runs the default presets and takes no parameters")
        jobs = [(name, presets_mod.presets_for(name)) for name in verify.CHECKS]
        plan = [(name, p) for name, names in jobs for p in names]
    elif args.check in verify.CHECKS:
        plan = [(args.check, args.preset)]
    else:
        raise ValidationError(f"unknown check {args.check!r}; choose from "
                              f"{sorted(verify.CHECKS) + ['all']}")
    _check_output_dir(args.out)
    configs = [(name, p, _check_config(name, p, extras if args.check != "all" else {}, seed))
               for name, p in plan]
    reports = []
    for name, p, config in configs:
        report = verify.run_check(name, config)
        if p is not None:
            report.provenance["preset"] = p
        reports.append(report)
    if fmt == "json":
        text = "".join(r.to_json() + "\n" for r in reports)
    else:
        text = "".join(r.to_text() + "\n" for r in reports)
    _emit(text, args.out)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_CHECK_FAILED


def cmd_tabulate(args, extras) -> int:
    if args.rho is None:
        raise ValidationError("--rho start:stop:step is required")
    if args.family not in cf.FAMILIES:
        raise ValidationError(f"unknown family {args.family!r}; choose from {sorted(cf.FAMILIES)}")
    q = 1 if args.q is None else args.q
    _check_output_dir(args.out)
    text = cf.tabulate(args.family, cf.parse_rho_grid(args.rho), q)
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p, formats=None):
    p.add_argument("--config", help="flat key=value file; command-line flags take precedence")
    p.add_argument("--seed", type=int, help=f"start-vector seed (overridden by {SEED_ENV})")
    p.add_argument("--out", help="output path (default: standard output)")
    if formats:
        p.add_argument("--format", choices=formats)


def _add_mesh_params(p):
    for key in MESH_PARAMS:
        flag = "--" + key.replace("_", "-")
        if key in FLOAT_PARAMS:
            p.add_argument(flag, dest=key, type=float)
        elif key in INT_PARAMS:
            p.add_argument(flag, dest=key, type=int)
        else:
            p.add_argument(flag, dest=key)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fibrespec",
                                     description="Laplace eigenvalues on fibred spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("geom", help="generate a mesh file")
    p.add_argument("manifold", choices=[m for m in MANIFOLDS if m not in ("product", "warped")])
    _add_common(p)
    _add_mesh_params(p)

    p = sub.add_parser("spectrum", help="smallest Laplace eigenvalues")
    p.add_argument("--manifold", required=False, choices=sorted(MANIFOLDS))
    p.add_argument("--k", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--boundary", choices=("dirichlet", "neumann"))
    p.add_argument("--mass", choices=("lumped", "consistent"))
    _add_common(p, ("json", "csv", "text"))
    _add_mesh_params(p)

    p = sub.add_parser("symmetrize", help="fiberwise symmetrization of a domain or field")
    p.add_argument("--manifold", choices=("tube", "band"))
    p.add_argument("--field", help="comma-separated field on S^1 x S^2, one row per base node")
    p.add_argument("--profile-out", dest="profile_out", help="CSV of fiber volumes V(s)")
    _add_common(p)
    _add_mesh_params(p)

    p = sub.add_parser("verify", help="run comparison checks",
                       description="Extra --key value pairs override fields of the check config.")
    p.add_argument("check", help=f"one of {sorted(verify.CHECKS)} or 'all'")
    p.add_argument("--preset", choices=sorted(presets_mod.PRESETS))
    _add_common(p, ("json", "text"))

    p = sub.add_parser("tabulate", help="closed-form lambda_1 of a squashed family")
    p.add_argument("family", choices=sorted(cf.FAMILIES))
    p.add_argument("--q", type=int)
    p.add_argument("--rho", help="start:stop:step, stop included within half a step")
    _add_common(p)
    return parser


COMMANDS = {"geom": cmd_geom, "spectrum": cmd_spectrum, "symmetrize": cmd_symmetrize,
            "verify": cmd_verify, "tabulate": cmd_tabulate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        extras = {}
        if rest:
            if args.command != "verify":
                raise ValidationError(f"unrecognized arguments: {' '.join(rest)}")
            extras = parse_overrides(rest)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        apply_config(args, subparser, extras)
        if args.command == "spectrum" and args.manifold is None:
            raise ValidationError("--manifold is required")
        return COMMANDS[args.command](args, extras)
    except EigenSolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
