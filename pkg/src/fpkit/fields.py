"""Coefficient fields: scalars, diffusion matrices, drifts, and mollification.

A field is a vectorized map from points in R^d (arrays of shape (m, d)) to
values, carrying a dimension and a smoothness tag. Diffusion matrices store
one field object per upper-triangle entry and mirror it, so the (i, j) and
(j, i) entries can never drift apart. Drifts carry their declared growth and
confinement parameters alongside the component fields.

The example library (`make_example_field`) builds the coefficient families
used throughout the test-suite and CLI: constants, a log-modulus field with a
controlled oscillation decay, a truncated lacunary cosine field with Holder
regularity, and the two standard confining drifts.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import EllipticityError, EvaluationError
from .quadrature import ball_average_rule, gauss_interval

_EVAL_CHUNK = 65536


# ---------------------------------------------------------------------------
# smoothness tags
# ---------------------------------------------------------------------------

_TAG_KINDS = ("smooth", "holder", "dini-log", "rough")


@dataclass(frozen=True)
class SmoothnessTag:
    """Declared regularity of a field.

    kind is one of "smooth", "holder", "dini-log", "rough"; `param` is the
    Holder exponent alpha or the logarithmic decay exponent gamma when the
    kind calls for one.
    """

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in _TAG_KINDS:
            raise ValueError(f"unknown smoothness kind {self.kind!r}, expected one of {_TAG_KINDS}")
        if self.kind in ("holder", "dini-log"):
            if self.param is None or not (0.0 < float(self.param) < 1.0):
                raise ValueError(f"{self.kind} tag needs a parameter in (0, 1), got {self.param}")
        elif self.param is not None:
            raise ValueError(f"{self.kind} tag takes no parameter")


SMOOTH = SmoothnessTag("smooth")
ROUGH = SmoothnessTag("rough")


def holder(alpha: float) -> SmoothnessTag:
    return SmoothnessTag("holder", float(alpha))


def dini_log(gamma: float) -> SmoothnessTag:
    return SmoothnessTag("dini-log", float(gamma))


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------


def _as_points(x, dim: int) -> np.ndarray:
    """Coerce array-like input to an (m, dim) float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        if dim != 1:
            raise ValueError(f"scalar input for a field of dimension {dim}")
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        if dim == 1:
            return arr.reshape(-1, 1)
        if arr.shape[0] == dim:
            return arr.reshape(1, dim)
        raise ValueError(f"1-d input of length {arr.shape[0]} for a field of dimension {dim}")
    if arr.ndim == 2 and arr.shape[1] == dim:
        return arr
    raise ValueError(f"expected points of shape (m, {dim}), got {arr.shape}")


class ScalarField:
    """A scalar-valued coefficient field on R^d.

    Subclasses implement `_values(x)` for x of shape (m, d). Public callers
    use `values` (strict shape) or call the field directly with forgiving
    input shapes. Evaluations are checked for finiteness; a NaN or infinity
    raises EvaluationError carrying the first offending point.
    """

    def __init__(self, dim: int, tag: SmoothnessTag = SMOOTH, name: str = "field"):
        if dim not in (1, 2):
            raise ValueError(f"fields support d in {{1, 2}}, got {dim}")
        self.dim = int(dim)
        self.tag = tag
        self.name = name

    def _values(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def values(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ValueError(f"expected shape (m, {self.dim}), got {x.shape}")
        out = np.asarray(self._values(x), dtype=float)
        if out.shape != (x.shape[0],):
            out = np.broadcast_to(out, (x.shape[0],)).copy()
        bad = ~np.isfinite(out)
        if bad.any():
            i = int(np.argmax(bad))
            raise EvaluationError(f"field {self.name!r} non-finite at {x[i]}", point=x[i])
        return out

    def __call__(self, x):
        pts = _as_points(x, self.dim)
        out = self.values(pts)
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0 or (arr.ndim == 1 and self.dim > 1):
            return float(out[0])
        return out

    def ball_average(self, center: np.ndarray, radius: float, n_radial: int = 32, n_angular: int = 32) -> float:
        """Average of the field over the ball B(center, radius) by midpoint quadrature."""
        pts, w = ball_average_rule(np.asarray(center, dtype=float), radius, n_radial, n_angular)
        return float(w @ self.values(pts))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} d={self.dim} tag={self.tag.kind}>"


class ClosureField(ScalarField):
    """Scalar field defined by a vectorized closure fn(x: (m, d)) -> (m,)."""

    def __init__(self, fn, dim: int, tag: SmoothnessTag = SMOOTH, name: str = "closure"):
        super().__init__(dim, tag, name)
        self._fn = fn

    def _values(self, x):
        return self._fn(x)


class ConstantField(ScalarField):
    def __init__(self, value: float, dim: int = 1, name: str | None = None):
        super().__init__(dim, SMOOTH, name or f"const({value})")
        self.value = float(value)

    def _values(self, x):
        return np.full(x.shape[0], self.value)


class GridField(ScalarField):
    """Scalar field sampled on a uniform cell-center grid, linearly interpolated.

    Interpolation is exact at its own sample points; evaluation outside the
    sampled box clamps to the nearest sample (constant extrapolation).
    """

    def __init__(self, radius: float, samples: np.ndarray, tag: SmoothnessTag = ROUGH, name: str = "grid"):
        samples = np.asarray(samples, dtype=float)
        dim = samples.ndim
        super().__init__(dim, tag, name)
        self.radius = float(radius)
        self.samples = samples
        n = samples.shape[0]
        if any(s != n for s in samples.shape):
            raise ValueError("grid samples must be square")
        self.n = n
        self.h = 2.0 * self.radius / n
        self._centers = -self.radius + (np.arange(n) + 0.5) * self.h

    def _axis_locate(self, q):
        # fractional index into the center array, clamped to the sampled range
        t = (q - self._centers[0]) / self.h
        t = np.clip(t, 0.0, self.n - 1.0)
        i0 = np.minimum(t.astype(int), self.n - 2)
        return i0, t - i0

    def _values(self, x):
        if self.dim == 1:
            i0, f = self._axis_locate(x[:, 0])
            return (1 - f) * self.samples[i0] + f * self.samples[i0 + 1]
        i0, fi = self._axis_locate(x[:, 0])
        j0, fj = self._axis_locate(x[:, 1])
        s = self.samples
        return ((1 - fi) * (1 - fj) * s[i0, j0] + fi * (1 - fj) * s[i0 + 1, j0]
                + (1 - fi) * fj * s[i0, j0 + 1] + fi * fj * s[i0 + 1, j0 + 1])


# ---------------------------------------------------------------------------
# expression fields (config-loadable)
# ---------------------------------------------------------------------------

_ALLOWED_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan,
    "sinh": np.sinh, "cosh": np.cosh, "tanh": np.tanh,
    "exp": np.exp, "log": np.log, "sqrt": np.sqrt, "abs": np.abs,
    "sign": np.sign, "minimum": np.minimum, "maximum": np.maximum,
    "where": np.where, "arctan": np.arctan,
}
_ALLOWED_CONSTS = {"pi": math.pi, "e": math.e}
_ALLOWED_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Constant,
    ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Mod, ast.USub, ast.UAdd,
    ast.Compare, ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Load,
)


def _validate_expr(tree: ast.AST, dim: int, expr: str):
    coord_names = {f"x{i + 1}" for i in range(dim)} | {"r"}
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise ValueError(f"disallowed syntax {type(node).__name__!r} in expression {expr!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_FUNCS:
                raise ValueError(f"disallowed function call in expression {expr!r}")
            if node.keywords:
                raise ValueError(f"keyword arguments not allowed in expression {expr!r}")
        if isinstance(node, ast.Name) and not isinstance(node.ctx, ast.Load):
            raise ValueError(f"assignment not allowed in expression {expr!r}")
        if isinstance(node, ast.Name):
            if node.id not in coord_names and node.id not in _ALLOWED_FUNCS and node.id not in _ALLOWED_CONSTS:
                raise ValueError(f"unknown name {node.id!r} in expression {expr!r} (coordinates: {sorted(coord_names)})")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ValueError(f"non-numeric constant in expression {expr!r}")


class ExpressionField(ScalarField):
    """Scalar field compiled from a restricted expression string.

    Coordinates are `x1`, `x2` (up to the field dimension) and `r` for |x|;
    `pi` and `e` are available, along with elementary numpy functions.
    Anything else is rejected at construction time.
    """

    def __init__(self, expr: str, dim: int, tag: SmoothnessTag = SMOOTH, name: str | None = None):
        super().__init__(dim, tag, name or expr)
        tree = ast.parse(expr, mode="eval")
        _validate_expr(tree, dim, expr)
        self.expr = expr
        self._code = compile(tree, "<field-expression>", "eval")

    def _values(self, x):
        env = {"__builtins__": {}}
        env.update(_ALLOWED_FUNCS)
        env.update(_ALLOWED_CONSTS)
        for i in range(self.dim):
            env[f"x{i + 1}"] = x[:, i]
        env["r"] = np.sqrt(np.sum(x * x, axis=1))
        with np.errstate(all="ignore"):
            out = eval(self._code, env)  # noqa: S307 (AST-whitelisted above)
        return np.broadcast_to(np.asarray(out, dtype=float), (x.shape[0],))


# ---------------------------------------------------------------------------
# matrix and drift fields
# ---------------------------------------------------------------------------


class DiffusionMatrixField:
    """Symmetric diffusion matrix A(x) with declared ellipticity window.

    Entries are ScalarFields stored once per upper-triangle slot; the mirror
    entry is the same object. `lam` declares lambda with
    lambda I <= A(x) <= lambda^{-1} I expected on the working region.
    """

    def __init__(self, entries: dict[tuple[int, int], ScalarField], dim: int, lam: float, name: str = "A"):
        if dim not in (1, 2):
            raise ValueError("diffusion matrices support d in {1, 2}")
        if not (0.0 < lam <= 1.0):
            raise ValueError(f"ellipticity constant must lie in (0, 1], got {lam}")
        self.dim = dim
        self.lam = float(lam)
        self.name = name
        self._entries: dict[tuple[int, int], ScalarField] = {}
        for i in range(dim):
            for j in range(i, dim):
                key = (i, j)
                if key in entries:
                    f = entries[key]
                elif (j, i) in entries:
                    f = entries[(j, i)]
                elif i != j:
                    f = ConstantField(0.0, dim)
                else:
                    raise ValueError(f"missing diagonal entry {key}")
                if f.dim != dim:
                    raise ValueError(f"entry {key} has dimension {f.dim}, matrix has {dim}")
                self._entries[key] = f

    def entry(self, i: int, j: int) -> ScalarField:
        if i > j:
            i, j = j, i
        return self._entries[(i, j)]

    def values(self, x: np.ndarray) -> np.ndarray:
        """Evaluate to an (m, d, d) symmetric stack."""
        x = np.asarray(x, dtype=float)
        m = x.shape[0]
        out = np.empty((m, self.dim, self.dim))
        for (i, j), f in self._entries.items():
            v = f.values(x)
            out[:, i, j] = v
            out[:, j, i] = v
        return out

    def eigenvalue_range(self, x: np.ndarray) -> tuple[float, float]:
        a = self.values(x)
        if self.dim == 1:
            vals = a[:, 0, 0]
            return float(vals.min()), float(vals.max())
        w = np.linalg.eigvalsh(a)
        return float(w.min()), float(w.max())

    def check_ellipticity(self, x: np.ndarray, tol: float = 1e-9):
        """Raise EllipticityError if any sampled eigenvalue leaves the window."""
        lo, hi = self.eigenvalue_range(x)
        if lo < self.lam - tol or hi > 1.0 / self.lam + tol:
            raise EllipticityError(
                f"matrix {self.name!r}: sampled eigenvalues [{lo:.6g}, {hi:.6g}] leave "
                f"[{self.lam:.6g}, {1.0 / self.lam:.6g}] (tol {tol:g})")

    @classmethod
    def from_constant(cls, matrix, lam: float | None = None, name: str = "A"):
        mat = np.atleast_2d(np.asarray(matrix, dtype=float))
        dim = mat.shape[0]
        if lam is None:
            w = np.linalg.eigvalsh(mat)
            lam = min(float(w.min()), 1.0 / float(w.max()))
            lam = min(lam, 1.0)
        entries = {(i, j): ConstantField(mat[i, j], dim) for i in range(dim) for j in range(i, dim)}
        return cls(entries, dim, lam, name)

    @classmethod
    def isotropic(cls, f: ScalarField, lam: float, name: str | None = None):
        """A(x) = a(x) I for a scalar field a."""
        d = f.dim
        entries = {(i, i): f for i in range(d)}
        for i in range(d):
            for j in range(i + 1, d):
                entries[(i, j)] = ConstantField(0.0, d)
        return cls(entries, d, lam, name or f"{f.name} * I")

    def __repr__(self):
        return f"<DiffusionMatrixField {self.name!r} d={self.dim} lam={self.lam}>"


@dataclass(frozen=True)
class GrowthParams:
    """Declared drift growth/confinement constants.

    <b(x), x> <= beta1 - beta2 |x|^2 and |b(x)| <= beta3 (1 + |x|)^beta,
    with beta >= 1 and beta1, beta2, beta3 > 0.
    """

    beta: float = 1.0
    beta1: float = 1.0
    beta2: float = 1.0
    beta3: float = 1.0

    def __post_init__(self):
        if self.beta < 1.0:
            raise ValueError(f"growth exponent beta must be >= 1, got {self.beta}")
        for nm in ("beta1", "beta2", "beta3"):
            if getattr(self, nm) <= 0.0:
                raise ValueError(f"{nm} must be positive, got {getattr(self, nm)}")


class DriftField:
    """Vector drift b(x) with declared growth parameters."""

    def __init__(self, components: list[ScalarField] | tuple[ScalarField, ...], growth: GrowthParams, name: str = "b"):
        components = tuple(components)
        if not components:
            raise ValueError("drift needs at least one component")
        dim = components[0].dim
        if len(components) != dim or any(c.dim != dim for c in components):
            raise ValueError("drift needs exactly d components of dimension d")
        self.dim = dim
        self.components = components
        self.growth = growth
        self.name = name

    def values(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty((x.shape[0], self.dim))
        for i, c in enumerate(self.components):
            out[:, i] = c.values(x)
        return out

    def __repr__(self):
        g = self.growth
        return f"<DriftField {self.name!r} d={self.dim} beta={g.beta}>"


def linear_drift(dim: int, theta: float = 1.0, mu=None, name: str | None = None) -> DriftField:
    """b(x) = -theta (x - mu), the linear confining drift."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    mu_arr = np.zeros(dim) if mu is None else np.asarray(mu, dtype=float).reshape(dim)
    comps = []
    for i in range(dim):
        mi = float(mu_arr[i])
        comps.append(ClosureField(
            lambda x, i=i, mi=mi: -theta * (x[:, i] - mi), dim, SMOOTH, f"-theta(x{i + 1}-mu{i + 1})"))
    mnorm = float(np.linalg.norm(mu_arr))
    if mnorm == 0.0:
        growth = GrowthParams(beta=1.0, beta1=theta, beta2=theta, beta3=theta)
    else:
        # <b,x> = -theta|x|^2 + theta<mu,x> <= theta|mu|^2/2 - (theta/2)|x|^2
        growth = GrowthParams(beta=1.0, beta1=theta * (1.0 + mnorm ** 2) / 2.0,
                              beta2=theta / 2.0, beta3=theta * (1.0 + mnorm))
    return DriftField(comps, growth, name or f"linear-drift(theta={theta})")


def polynomial_drift(dim: int, beta: float = 3.0, scale: float = 1.0) -> DriftField:
    """b(x) = -scale |x|^{beta-1} x, the superlinear confining drift."""
    if beta < 1.0:
        raise ValueError("beta must be >= 1")
    if scale <= 0:
        raise ValueError("scale must be positive")

    def comp(i):
        def fn(x):
            r = np.sqrt(np.sum(x * x, axis=1))
            return -scale * r ** (beta - 1.0) * x[:, i]
        return ClosureField(fn, dim, SMOOTH, f"-|x|^{beta - 1} x{i + 1}")

    # scale |x|^{beta+1} >= scale(|x|^2 - 1) for beta >= 1
    growth = GrowthParams(beta=beta, beta1=scale, beta2=scale, beta3=scale)
    return DriftField([comp(i) for i in range(dim)], growth, f"poly-drift(beta={beta})")


# ---------------------------------------------------------------------------
# mollification
# ---------------------------------------------------------------------------


def _bump_profile(z2: np.ndarray) -> np.ndarray:
    """Unnormalized bump exp(-1/(1-s)) of squared radius s, zero outside s < 1."""
    out = np.zeros_like(z2)
    inside = z2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - z2[inside]))
    return out


@dataclass(frozen=True)
class MollifierSpec:
    """A smooth nonnegative kernel on the unit ball with unit mass.

    Holds a fixed quadrature rule (points in the unit ball, weights normalized
    to sum exactly to 1) used for all mollified-field evaluations, plus the
    defect of the raw kernel quadrature against an independent high-order
    reference rule. Construction fails if that defect exceeds 1e-8.
    """

    dim: int
    order: int
    points: np.ndarray = dc_field(repr=False)
    weights: np.ndarray = dc_field(repr=False)
    quadrature_defect: float = 0.0

    @classmethod
    def standard_bump(cls, dim: int, order: int = 64) -> "MollifierSpec":
        if dim not in (1, 2):
            raise ValueError("mollifiers support d in {1, 2}")
        norm = _bump_mass(dim)
        if dim == 1:
            z, w = gauss_interval(-1.0, 1.0, order)
            pts = z[:, None]
        else:
            # radial Gauss x angular midpoint, area element r dr dtheta
            rr, wr = gauss_interval(0.0, 1.0, order)
            na = max(2 * order, 8)
            th = (np.arange(na) + 0.5) / na * 2.0 * np.pi
            Rg, Tg = np.meshgrid(rr, th, indexing="ij")
            pts = np.stack([(Rg * np.cos(Tg)).ravel(), (Rg * np.sin(Tg)).ravel()], axis=1)
            w = (np.outer(wr * rr, np.full(na, 2.0 * np.pi / na))).ravel()
        raw = w * _bump_profile(np.sum(pts * pts, axis=1)) / norm
        defect = abs(float(raw.sum()) - 1.0)
        if defect > 1e-8:
            raise ValueError(f"kernel quadrature of order {order} has mass defect {defect:.3e} > 1e-8")
        weights = raw / raw.sum()
        return cls(dim=dim, order=order, points=pts, weights=weights, quadrature_defect=defect)


def _bump_mass(dim: int) -> float:
    """Integral of the unnormalized bump over the unit ball, high-order reference."""
    if dim == 1:
        z, w = gauss_interval(-1.0, 1.0, 400)
        return float(w @ _bump_profile(z * z))
    rr, wr = gauss_interval(0.0, 1.0, 400)
    return float(2.0 * np.pi * (wr * rr) @ _bump_profile(rr * rr))


class MollifiedField(ScalarField):
    """Convolution f * g_eps evaluated by the kernel's fixed quadrature rule.

    The discrete rule is a convex combination of translates of f, so every
    oscillation bound satisfied by f is inherited by the mollified field up to
    center-sampling error. Tagged smooth.
    """

    def __init__(self, base: ScalarField, spec: MollifierSpec, eps: float):
        if eps <= 0:
            raise ValueError("mollification width eps must be positive")
        if spec.dim != base.dim:
            raise ValueError(f"kernel dimension {spec.dim} does not match field dimension {base.dim}")
        super().__init__(base.dim, SMOOTH, f"mollify({base.name}, eps={eps:g})")
        self.base = base
        self.spec = spec
        self.eps = float(eps)

    def _values(self, x):
        q = self.spec.points.shape[0]
        out = np.empty(x.shape[0])
        step = max(1, _EVAL_CHUNK // q)
        for lo in range(0, x.shape[0], step):
            hi = min(lo + step, x.shape[0])
            shifted = x[lo:hi, None, :] - self.eps * self.spec.points[None, :, :]
            vals = self.base.values(shifted.reshape(-1, self.dim)).reshape(hi - lo, q)
            out[lo:hi] = vals @ self.spec.weights
        return out


def mollify(f: ScalarField, spec: MollifierSpec, eps: float) -> MollifiedField:
    """Mollify a scalar field at width eps with the given kernel."""
    return MollifiedField(f, spec, eps)


# ---------------------------------------------------------------------------
# example library
# ---------------------------------------------------------------------------


def _log_modulus_field(gamma: float, dim: int) -> ScalarField:
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"log-modulus exponent gamma must lie in (0, 1), got {gamma}")
    plateau = math.log(2.0) ** (-gamma)  # value on |x| >= 1/2, keeps the field Lipschitz there

    def fn(x):
        r = np.sqrt(np.sum(x * x, axis=1))
        out = np.full(x.shape[0], plateau)
        core = (r > 0.0) & (r <= 0.5)
        with np.errstate(divide="ignore"):
            out[core] = np.abs(np.log(r[core])) ** (-gamma)
        out[r == 0.0] = 0.0
        return out

    return ClosureField(fn, dim, dini_log(gamma), f"log-modulus(gamma={gamma:g})")


def _weierstrass_field(alpha: float, lam: float, dim: int, terms: int = 24) -> ScalarField:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"Holder exponent alpha must lie in (0, 1), got {alpha}")
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"lam must lie in (0, 1], got {lam}")
    amps = 2.0 ** (-alpha * np.arange(terms))
    freqs = 2.0 ** np.arange(terms)
    total = amps.sum()
    mid = 0.5 * (lam + 1.0 / lam)
    half = 0.5 * (1.0 / lam - lam)

    def fn(x):
        t = x[:, 0] if dim == 1 else x[:, 0] + x[:, 1]
        w = np.cos(np.outer(t, freqs)) @ amps
        return mid + half * (w / total)

    return ClosureField(fn, dim, holder(alpha), f"weierstrass-holder(alpha={alpha:g})")


def make_example_field(name: str, **params):
    """Build a named example coefficient field.

    Names: "constant" (value, d), "log-modulus" (gamma, d),
    "weierstrass-holder" (alpha, lam, d, terms), "ou-drift" (theta, mu, d),
    "polynomial-confining-drift" (beta, scale, d). Scalar names return a
    ScalarField; drift names return a DriftField.
    """
    dim = int(params.pop("d", 1))
    if name == "constant":
        return ConstantField(float(params.pop("value", 1.0)), dim)
    if name == "log-modulus":
        return _log_modulus_field(float(params.pop("gamma", 0.5)), dim)
    if name == "weierstrass-holder":
        return _weierstrass_field(float(params.pop("alpha", 0.5)), float(params.pop("lam", 0.5)),
                                  dim, int(params.pop("terms", 24)))
    if name == "ou-drift":
        return linear_drift(dim, float(params.pop("theta", 1.0)), params.pop("mu", None))
    if name == "polynomial-confining-drift":
        return polynomial_drift(dim, float(params.pop("beta", 3.0)), float(params.pop("scale", 1.0)))
    raise ValueError(
        f"unknown example field {name!r}; known: constant, log-modulus, weierstrass-holder, "
        "ou-drift, polynomial-confining-drift")
