"""JSON configuration: loading, schema validation and construction of the problem."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np

from .classify import CLOSED_FORM_TOL, SolutionDescriptor, family_a_descriptor, family_b_descriptor
from .crosscheck import ORACLE_TOL
from .errors import ConstraintError, ParameterError, SolitonError
from .oracle import DEFAULT_STEP, flat_fiber, round_sphere, sphere_product
from .profiles import Signature, SolitonParams, as_exact, make_power_profile, make_tabulated_profile, schouten_rho

SCHEMA_VERSION = 1


class ConfigError(SolitonError):
    """Config file missing, not JSON, or not matching the schema."""


def load_schema() -> dict:
    text = resources.files("soliton_forge").joinpath("config_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_config(path) -> dict:
    """Read a config file, or the ``config`` embedded in a previously written report."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if isinstance(data, dict) and "config" in data and "command" in data:
        data = data["config"]
    validate_config(data)
    return data


def validate_config(data) -> None:
    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config does not match schema at {where}: {exc.message}") from exc


@dataclass
class Problem:
    descriptor: SolutionDescriptor
    fiber: object
    grid: np.ndarray
    tol_closed: float
    tol_oracle: float
    seed: int
    oracle_points: int
    oracle_step: float
    oracle_r_range: tuple


def _exact_or_none(value):
    return None if value is None else as_exact(value)


def build_fiber(spec, m=None):
    if spec is None:
        return None
    kind, params = spec["kind"], spec.get("params", {})
    if kind == "round_sphere":
        dim = int(params.get("m", m if m is not None else 2))
        if "R_squared" in params:
            return round_sphere(dim, R_squared=params["R_squared"])
        return round_sphere(dim, params.get("R", 1))
    if kind == "flat":
        return flat_fiber(int(params.get("m", m if m is not None else 1)))
    factors = [(int(a), b) for a, b in params["factors"]]
    return sphere_product(factors)


def default_fiber(m, lambdaF):
    """Flat fiber when ``lambda_F = 0``, otherwise the round sphere with that constant."""
    lam = as_exact(lambdaF)
    if lam == 0:
        return flat_fiber(m)
    if lam > 0 and m >= 2:
        return round_sphere(m, R_squared=(m - 1) / lam)
    raise ConstraintError(f"no default Einstein fiber of dimension {m} with lambdaF={lam}")


def apply_overrides(cfg: dict, seed=None, tol_closed=None, tol_oracle=None, grid=None, points=None) -> dict:
    """Copy of ``cfg`` with command-line settings folded in, so reports embed what actually ran."""
    out = copy.deepcopy(cfg)
    if seed is not None:
        out["seed"] = int(seed)
    if tol_closed is not None:
        out.setdefault("tolerances", {})["closed"] = float(tol_closed)
    if tol_oracle is not None:
        out.setdefault("tolerances", {})["oracle"] = float(tol_oracle)
    if grid is not None:
        out["grid"] = dict(grid)
    if points is not None:
        out.setdefault("oracle", {})["points"] = int(points)
    validate_config(out)
    return out


def parse_grid(text: str) -> dict:
    """``"r_min:r_max:count"`` to a grid block."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like r_min:r_max:count, got {text!r}")
    try:
        return {"r_min": float(parts[0]), "r_max": float(parts[1]), "count": int(parts[2])}
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from exc


def build_problem(cfg: dict) -> Problem:
    """Turn a validated config into a descriptor plus evaluation settings."""
    if "signature" in cfg:
        sig = Signature(tuple(cfg["signature"]))
        if "n" in cfg and cfg["n"] != sig.n:
            raise ConstraintError(f"n={cfg['n']} disagrees with signature length {sig.n}")
    elif "n" in cfg:
        sig = Signature.riemannian(cfg["n"])
    else:
        raise ConfigError("config needs either n or signature")
    n = sig.n

    fiber = build_fiber(cfg.get("fiber"), cfg.get("m"))
    m = cfg.get("m", fiber.m if fiber is not None else None)
    if m is None:
        raise ConfigError("config needs m or a fiber")
    if fiber is not None and fiber.m != m:
        raise ConstraintError(f"m={m} disagrees with fiber dimension {fiber.m}")

    lam_f = _exact_or_none(cfg.get("lambdaF"))
    if fiber is not None:
        if lam_f is not None and lam_f != fiber.lambdaF:
            raise ConstraintError(f"lambdaF={lam_f} disagrees with the fiber's Einstein constant {fiber.lambdaF}")
        lam_f = fiber.lambdaF
    lam_t = _exact_or_none(cfg.get("lambdaTilde"))
    rho_spec = cfg.get("rho", "schouten")
    rho = schouten_rho(n) if rho_spec == "schouten" else as_exact(rho_spec)

    prof_spec = cfg["profile"]
    kind, pp = prof_spec["kind"], prof_spec.get("params", {})
    if kind == "family_A":
        if lam_f is None:
            raise ConfigError("family_A needs lambdaF (directly or from the fiber)")
        desc = family_a_descriptor(n, m, lam_f, pp.get("k2", 1), pp.get("k1", 0),
                                   negative_r=bool(pp.get("negative_r", False)), sig=sig)
    elif kind == "family_B":
        desc = family_b_descriptor(n, m, pp.get("k2", 1), pp.get("c", 0), pp.get("c1", 0),
                                   lambdaF=lam_f, sig=sig)
    elif kind == "power":
        h = pp.get("h", "zero")
        prof = make_power_profile(pp.get("k", 1), as_exact(pp["s"]), h)
        params = SolitonParams(n, m, rho, lam_f if lam_f is not None else 0,
                               lam_t if lam_t is not None else 0)
        desc = SolutionDescriptor("power", prof, params, sig=sig, name=prof.label)
    else:
        prof = make_tabulated_profile(pp["r"], pp["psi"], pp.get("h"), order=int(pp.get("order", 3)))
        params = SolitonParams(n, m, rho, lam_f if lam_f is not None else 0,
                               lam_t if lam_t is not None else 0)
        desc = SolutionDescriptor("tabulated", prof, params, sig=sig, name=prof.label)

    p = desc.params
    changes = {}
    if lam_t is not None and lam_t != p.lambdaTilde:
        changes["lambdaTilde"] = lam_t
    if rho != p.rho:
        changes["rho"] = rho
    if changes:
        desc = replace(desc, params=p.with_(**changes), solution=None)

    grid_cfg = cfg.get("grid", {})
    dom = desc.profile.domain
    lo = grid_cfg.get("r_min", 0.1 if dom[1] > 0 else -10.0)
    hi = grid_cfg.get("r_max", 10.0 if dom[1] > 0 else -0.1)
    count = int(grid_cfg.get("count", 1000))
    if lo * hi <= 0:
        raise ParameterError("grid must not contain r = 0")
    grid = np.geomspace(lo, hi, count) if count > 1 else np.array([float(lo)])
    desc.profile.check(grid)

    tol = cfg.get("tolerances", {})
    orc = cfg.get("oracle", {})
    return Problem(
        descriptor=desc,
        fiber=fiber,
        grid=grid,
        tol_closed=float(tol.get("closed", CLOSED_FORM_TOL)),
        tol_oracle=float(tol.get("oracle", ORACLE_TOL)),
        seed=int(cfg.get("seed", 0)),
        oracle_points=int(orc.get("points", 50)),
        oracle_step=float(orc.get("step", DEFAULT_STEP)),
        oracle_r_range=(float(orc.get("r_min", 0.25)), float(orc.get("r_max", 4.0))),
    )


def jsonable(value):
    """Fractions become strings, numpy scalars and arrays become Python values."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {k: jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value
