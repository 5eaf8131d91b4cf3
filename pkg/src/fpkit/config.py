"""Experiment configuration: schema validation and coefficient builders.

Configurations are plain JSON mappings. Validation is strict: unknown keys
are rejected by name (catching typos like "betaa2" instead of "beta2"),
types are checked, and range constraints are enforced before any numerics
run. Validators return the config with defaults filled in, so downstream
code never guesses a default twice.

Builders turn validated sub-configs into coefficient objects: named example
fields, expression fields (parsed through the restricted expression
grammar), constants, diffusion matrices, drifts with declared growth
envelopes, and interaction kernels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .fields import (ConstantField, DiffusionMatrixField, DriftField, ExpressionField,
                     GrowthParams, ScalarField, make_example_field)
from .fpk import ModelSpec, builtin_models
from .grids import GridSpec, default_radius
from .meanfield import InteractionKernel

_NUM = (int, float)


@dataclass(frozen=True)
class Key:
    """Schema entry for one config key."""

    types: tuple
    required: bool = False
    default: object = None
    check: Callable | None = None
    expect: str = ""


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def validate_mapping(obj, schema: dict[str, Key], path: str = "") -> dict:
    """Check one mapping against a schema; returns it with defaults applied."""
    if not isinstance(obj, dict):
        raise ValidationError(f"expected a mapping at {path or '<root>'}, got {type(obj).__name__}",
                              path=path)
    for k in obj:
        if k not in schema:
            raise ValidationError(f"unknown key {k!r} at {path or '<root>'} "
                                  f"(known keys: {', '.join(sorted(schema))})",
                                  path=_join(path, str(k)))
    out = {}
    for name, spec in schema.items():
        if name not in obj:
            if spec.required:
                raise ValidationError(f"missing required key {name!r} at {path or '<root>'}",
                                      path=_join(path, name))
            out[name] = spec.default
            continue
        val = obj[name]
        if spec.types and not isinstance(val, spec.types):
            if not (float in spec.types and isinstance(val, int) and not isinstance(val, bool)):
                raise ValidationError(
                    f"key {name!r} has type {type(val).__name__}, expected "
                    f"{'/'.join(t.__name__ for t in spec.types)}", path=_join(path, name))
        if spec.check is not None and not spec.check(val):
            raise ValidationError(f"key {name!r} fails its range check"
                                  + (f" ({spec.expect})" if spec.expect else ""),
                                  path=_join(path, name))
        out[name] = val
    return out


def _pow2(n) -> bool:
    return isinstance(n, int) and n >= 16 and (n & (n - 1)) == 0


def _positive(v) -> bool:
    return isinstance(v, _NUM) and not isinstance(v, bool) and v > 0


def _num_list(v, minimum=1, positive=True) -> bool:
    if not isinstance(v, list) or len(v) < minimum:
        return False
    return all(isinstance(t, _NUM) and not isinstance(t, bool) and (t > 0 or not positive)
               for t in v)


_FIELD_SCHEMA = {
    "name": Key((str,)),
    "params": Key((dict,), default=None),
    "expression": Key((str,)),
    "constant": Key(_NUM),
    "dim": Key((int,), default=1, check=lambda v: v in (1, 2), expect="1 or 2"),
}

_DIFFUSION_SCHEMA = {
    "constant": Key(_NUM, check=_positive, expect="> 0"),
    "expression": Key((str,)),
    "name": Key((str,)),
    "params": Key((dict,), default=None),
    "lam": Key(_NUM, default=None, check=lambda v: 0 < v <= 1, expect="in (0, 1]"),
}

_DRIFT_SCHEMA = {
    "expressions": Key((list,), required=True,
                       check=lambda v: len(v) >= 1 and all(isinstance(s, str) for s in v),
                       expect="list of expression strings"),
    "beta": Key(_NUM, default=1.0, check=lambda v: v >= 1, expect=">= 1"),
    "beta1": Key(_NUM, required=True, check=_positive, expect="> 0"),
    "beta2": Key(_NUM, required=True, check=_positive, expect="> 0"),
    "beta3": Key(_NUM, required=True, check=_positive, expect="> 0"),
}

_COEFF_SCHEMA = {
    "dim": Key((int,), default=1, check=lambda v: v in (1, 2), expect="1 or 2"),
    "diffusion": Key((dict,), required=True),
    "drift": Key((dict,), required=True),
}

_RADII_SCHEMA = {
    "min": Key(_NUM, default=1e-3, check=_positive, expect="> 0"),
    "max": Key(_NUM, default=0.4, check=_positive, expect="> 0"),
    "count": Key((int,), default=12, check=lambda v: v >= 4, expect=">= 4"),
}

SCHEMAS: dict[str, dict[str, Key]] = {
    "dini": {
        "field": Key((dict,), required=True),
        "radii": Key((dict,), default=None),
        "t0": Key(_NUM, default=0.5, check=_positive, expect="> 0"),
        "box_radius": Key(_NUM, default=1.0, check=_positive, expect="> 0"),
        "n_centers": Key((int,), default=24, check=lambda v: v >= 4, expect=">= 4"),
        "seed": Key((int,), default=0, check=lambda v: v >= 0, expect=">= 0"),
    },
    "solve": {
        "model": Key((str,)),
        "coefficients": Key((dict,)),
        "radius": Key(_NUM, default=None, check=lambda v: v >= 4, expect=">= 4"),
        "n": Key((int,), default=None, check=_pow2, expect="power of two >= 16"),
        "weight_order": Key(_NUM, default=1.0, check=lambda v: v >= 0, expect=">= 0"),
        "method": Key((str,), default="auto",
                      check=lambda v: v in ("auto", "exact-1d", "grid"),
                      expect="auto, exact-1d, or grid"),
        "strict": Key((bool,), default=False),
        "seed": Key((int,), default=0, check=lambda v: v >= 0, expect=">= 0"),
    },
    "poisson": {
        "model": Key((str,)),
        "coefficients": Key((dict,)),
        "psi": Key((dict,), required=True),
        "k": Key(_NUM, default=1.0, check=lambda v: v >= 1, expect=">= 1"),
        "p": Key(_NUM, default=None, check=_positive, expect="> 0"),
        "radius": Key(_NUM, default=8.0, check=lambda v: v >= 4, expect=">= 4"),
        "n": Key((int,), default=None, check=_pow2, expect="power of two >= 16"),
        "check_radii": Key((list,), default=None, check=lambda v: _num_list(v, 2),
                           expect="list of >= 2 positive radii"),
        "seed": Key((int,), default=0, check=lambda v: v >= 0, expect=">= 0"),
    },
    "stability": {
        "family": Key((str,), required=True,
                      check=lambda v: v in ("drift-linear", "diffusion-constant"),
                      expect="drift-linear or diffusion-constant"),
        "deltas": Key((list,), default=[1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
                      check=lambda v: _num_list(v, 2), expect="list of >= 2 positive sizes"),
        "k": Key(_NUM, default=1.0, check=lambda v: v >= 0, expect=">= 0"),
        "r": Key(_NUM, default=2.0, check=lambda v: v >= 1, expect=">= 1"),
        "dim": Key((int,), default=1, check=lambda v: v in (1, 2), expect="1 or 2"),
        "radius": Key(_NUM, default=8.0, check=lambda v: v >= 4, expect=">= 4"),
        "n": Key((int,), default=None, check=_pow2, expect="power of two >= 16"),
        "seed": Key((int,), default=0, check=lambda v: v >= 0, expect=">= 0"),
    },
    "meanfield": {
        "eps": Key(_NUM, required=True, check=lambda v: 0 <= v <= 1, expect="in [0, 1]"),
        "kernel": Key((str,), default="tanh",
                      check=lambda v: v in ("tanh", "tanh-relative", "gaussian-diffusion"),
                      expect="tanh, tanh-relative, or gaussian-diffusion"),
        "weight_order": Key(_NUM, default=1.0, check=lambda v: v >= 1, expect=">= 1"),
        "starts": Key((list,), default=[0.5, -0.5],
                      check=lambda v: _num_list(v, 1, positive=False), expect="list of means"),
        "tol": Key(_NUM, default=1e-8, check=_positive, expect="> 0"),
        "max_iter": Key((int,), default=60, check=lambda v: v >= 1, expect=">= 1"),
        "eps_grid": Key((list,), default=None, check=lambda v: _num_list(v, 2),
                        expect="list of >= 2 positive couplings"),
        "threshold": Key((bool,), default=True),
        "dim": Key((int,), default=1, check=lambda v: v in (1, 2), expect="1 or 2"),
        "radius": Key(_NUM, default=8.0, check=lambda v: v >= 4, expect=">= 4"),
        "n": Key((int,), default=None, check=_pow2, expect="power of two >= 16"),
        "seed": Key((int,), default=0, check=lambda v: v >= 0, expect=">= 0"),
    },
    "sweep": {
        "task": Key((str,), required=True, check=lambda v: v in ("stability", "meanfield"),
                    expect="stability or meanfield"),
        "axis": Key((list,), required=True, check=lambda v: _num_list(v, 3),
                    expect="list of >= 3 positive values"),
        "base": Key((dict,), required=True),
        "seed": Key((int,), default=0, check=lambda v: v >= 0, expect=">= 0"),
    },
}


def validate_command_config(command: str, obj: dict) -> dict:
    """Validate a config mapping for one CLI command; fills defaults.

    Nested sub-configs (fields, coefficient blocks, sweep bases) are
    validated recursively with their own schemas so error paths point at the
    offending key.
    """
    if command not in SCHEMAS:
        raise ValidationError(f"unknown command {command!r}", path="")
    cfg = validate_mapping(obj, SCHEMAS[command])
    if command == "dini":
        cfg["field"] = validate_mapping(cfg["field"], _FIELD_SCHEMA, "field")
        cfg["radii"] = validate_mapping(cfg["radii"] or {}, _RADII_SCHEMA, "radii")
        if cfg["radii"]["max"] <= cfg["radii"]["min"]:
            raise ValidationError("radii.max must exceed radii.min", path="radii.max")
    if command in ("solve", "poisson", "stability", "meanfield"):
        if command in ("solve", "poisson"):
            has_model = cfg.get("model") is not None
            has_coeff = cfg.get("coefficients") is not None
            if has_model == has_coeff:
                raise ValidationError(
                    "exactly one of 'model' or 'coefficients' must be given", path="model")
            if has_coeff:
                sub = validate_mapping(cfg["coefficients"], _COEFF_SCHEMA, "coefficients")
                sub["diffusion"] = validate_mapping(sub["diffusion"], _DIFFUSION_SCHEMA,
                                                    "coefficients.diffusion")
                sub["drift"] = validate_mapping(sub["drift"], _DRIFT_SCHEMA,
                                                "coefficients.drift")
                cfg["coefficients"] = sub
    if command == "poisson":
        cfg["psi"] = validate_mapping(cfg["psi"], _FIELD_SCHEMA, "psi")
        if cfg["check_radii"] is None:
            cfg["check_radii"] = [cfg["radius"], 2 * cfg["radius"]]
    if command == "sweep":
        task = cfg["task"]
        axis_key = "deltas" if task == "stability" else "eps"
        base = dict(cfg["base"])
        if axis_key in base:
            raise ValidationError(f"base must not set {axis_key!r}; the sweep axis provides it",
                                  path=f"base.{axis_key}")
        # validate base under the task schema with a placeholder axis value;
        # the sweep runner replaces it point by point
        filler = [0.01, 0.02] if axis_key == "deltas" else 0.01
        cfg["base"] = validate_command_config(task, {**base, axis_key: filler})
        cfg["axis_key"] = axis_key
    return cfg


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"config file not found: {path}", path="")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file is not valid JSON: {exc}", path="")


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def field_from_config(cfg: dict, dim: int | None = None, path: str = "field") -> ScalarField:
    """Build a scalar field from a validated field sub-config."""
    d = int(cfg.get("dim") or dim or 1)
    given = [k for k in ("name", "expression", "constant") if cfg.get(k) is not None]
    if len(given) != 1:
        raise ValidationError(
            f"exactly one of 'name', 'expression', 'constant' must be set at {path}", path=path)
    if cfg.get("name") is not None:
        params = dict(cfg.get("params") or {})
        params.setdefault("d", d)
        return make_example_field(cfg["name"], **params)
    if cfg.get("expression") is not None:
        return ExpressionField(cfg["expression"], d)
    return ConstantField(float(cfg["constant"]), d)


def coefficients_from_config(cfg: dict) -> tuple[DiffusionMatrixField, DriftField, int]:
    """Build (A, b, dim) from a validated coefficients block."""
    d = cfg["dim"]
    dc = cfg["diffusion"]
    a_field = field_from_config(dc, dim=d, path="coefficients.diffusion")
    lam = dc.get("lam")
    if lam is None:
        probe = np.linspace(-4.0, 4.0, 257)
        pts = probe[:, None] if d == 1 else np.stack(
            [t.ravel() for t in np.meshgrid(probe[::8], probe[::8], indexing="ij")], axis=1)
        vals = a_field.values(pts)
        lam = min(1.0, float(vals.min()), 1.0 / float(vals.max()))
        if lam <= 0:
            raise ValidationError("diffusion is not elliptic on the probe box; give 'lam'",
                                  path="coefficients.diffusion")
    A = DiffusionMatrixField.isotropic(a_field, float(lam))
    drc = cfg["drift"]
    exprs = drc["expressions"]
    if len(exprs) != d:
        raise ValidationError(f"drift needs {d} expressions, got {len(exprs)}",
                              path="coefficients.drift.expressions")
    comps = [ExpressionField(e, d) for e in exprs]
    growth = GrowthParams(beta=float(drc["beta"]), beta1=float(drc["beta1"]),
                          beta2=float(drc["beta2"]), beta3=float(drc["beta3"]))
    return A, DriftField(comps, growth), d


def model_from_config(cfg: dict) -> tuple[DiffusionMatrixField, DriftField, int, str]:
    """Resolve the model/coefficients choice to (A, b, dim, name)."""
    if cfg.get("model") is not None:
        catalog = {m.name: m for m in builtin_models()}
        name = cfg["model"]
        if name not in catalog:
            raise ValidationError(f"unknown model {name!r} (built-ins: "
                                  f"{', '.join(sorted(catalog))})", path="model")
        m = catalog[name]
        return m.A, m.b, m.dim, m.name
    A, b, d = coefficients_from_config(cfg["coefficients"])
    return A, b, d, "custom"


def grid_from_config(cfg: dict, dim: int, beta2: float) -> GridSpec:
    """GridSpec with radius defaulting from the confinement constant."""
    radius = cfg.get("radius")
    if radius is None:
        radius = default_radius(beta2)
    n = cfg.get("n")
    if n is None:
        n = 1024 if dim == 1 else 128
    return GridSpec(dim, float(radius), int(n))


def kernel_from_name(name: str, dim: int) -> dict:
    """Interaction kernels the CLI knows by name."""
    if name == "tanh":
        return {"drift_kernel": InteractionKernel("drift", np.tanh, dim, sup_bound=1.0,
                                                  depends_on_x=False, name="tanh")}
    if name == "tanh-relative":
        def rel(x, y):
            return np.tanh(y[None, :, :] - x[:, None, :])
        return {"drift_kernel": InteractionKernel("drift", rel, dim, sup_bound=1.0,
                                                  depends_on_x=True, name="tanh-relative")}
    if name == "gaussian-diffusion":
        def gq(y):
            g = np.exp(-np.sum(y * y, axis=1))
            return g[:, None, None] * np.eye(dim)[None, :, :]
        return {"diffusion_kernel": InteractionKernel("diffusion", gq, dim, sup_bound=1.0,
                                                      depends_on_x=False,
                                                      name="gaussian-diffusion")}
    raise ValidationError(f"unknown kernel {name!r}", path="kernel")
