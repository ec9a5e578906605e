"""Catalog of scalar functions used as ``f`` in the trace and operator bounds.

Every function is an immutable, vectorized callable with a declared real
domain. Derived functions (companion ``x / f(x)``, composite
``f o g^{-1}``, transpose ``x f(1/x)``) wrap an inner function and recompute
on every call.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import ClassVar, Sequence

import numpy as np

from .errors import DomainError, NotInvertibleError, RangeError, SingularityError, SpecError

INF = math.inf

#: probe grid for positivity of ``f`` and invertibility of ``g``
PROBE_NODES = np.logspace(-8.0, 8.0, 4096)
#: points used to extrapolate ``x / f(x)`` to ``x = 0``
LIMIT_POINTS = (1e-10, 1e-12, 1e-14)
INVERSE_RTOL = 1e-13
INVERSE_MAX_STEPS = 200

LAMBERT_MAX_STEPS = 50
LAMBERT_RTOL = 1e-15


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float = INF
    lo_closed: bool = True
    hi_closed: bool = False

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above & below & ~np.isnan(x)

    def snap(self, x, tol: float) -> np.ndarray:
        """Move values within ``tol`` outside a closed endpoint onto it."""
        x = np.asarray(x, dtype=float)
        if self.lo_closed and math.isfinite(self.lo):
            x = np.where((x < self.lo) & (x >= self.lo - tol), self.lo, x)
        if self.hi_closed and math.isfinite(self.hi):
            x = np.where((x > self.hi) & (x <= self.hi + tol), self.hi, x)
        return x

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


NONNEGATIVE = Interval(0.0)
POSITIVE = Interval(0.0, lo_closed=False)
REAL_LINE = Interval(-INF, INF, lo_closed=False)


class ScalarFunction:
    """Base class: a real function evaluable elementwise on its domain."""

    kind: ClassVar[str] = "abstract"

    @property
    def domain(self) -> Interval:
        return NONNEGATIVE

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        bad = ~self.domain.contains(arr)
        if np.any(bad):
            value = float(np.atleast_1d(arr)[np.atleast_1d(bad)][0])
            raise DomainError(f"{value!r} is outside the domain {self.domain} of {self}", value=value)
        out = self._eval(np.atleast_1d(arr))
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_spec(self) -> dict:
        return {"kind": self.kind}

    def __str__(self):
        return self.kind


def evaluate(phi: ScalarFunction, x):
    """Evaluate ``phi`` at ``x`` (scalar or array)."""
    return phi(x)


# -- elementary functions ------------------------------------------------------


@dataclass(frozen=True)
class Power(ScalarFunction):
    """``x**s``; ``0 -> 0`` for ``s > 0`` and ``0 -> 1`` for ``s = 0``."""

    s: float
    kind: ClassVar[str] = "power"

    @property
    def domain(self):
        return NONNEGATIVE if self.s >= 0 else POSITIVE

    def _eval(self, x):
        return np.power(x, self.s)

    def to_spec(self):
        return {"kind": "power", "s": self.s}

    def __str__(self):
        return f"power({self.s:g})"


def lambert_w0(x):
    """Principal branch of the Lambert W function on ``[0, inf)``.

    Halley iteration from ``log(1 + x)``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0)) or np.any(np.isinf(arr)):
        raise DomainError("lambert_w0 is only defined here for finite x >= 0")
    xs = np.atleast_1d(arr)
    w = np.log1p(xs)
    for _ in range(LAMBERT_MAX_STEPS):
        ew = np.exp(w)
        r = w * ew - xs
        if np.all(np.abs(r) <= LAMBERT_RTOL * (1.0 + xs)):
            break
        wp1 = w + 1.0
        step = r / (ew * wp1 - (w + 2.0) * r / (2.0 * wp1))
        w = w - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(np.abs(w), np.finfo(float).tiny)):
            break
    w = np.where(xs == 0, 0.0, w)
    return float(w[0]) if arr.ndim == 0 else w.reshape(arr.shape)


@dataclass(frozen=True)
class LambertW(ScalarFunction):
    kind: ClassVar[str] = "lambert_w"

    def _eval(self, x):
        return lambert_w0(x)


@dataclass(frozen=True)
class AlgebraicExample(ScalarFunction):
    """``(sqrt(x (x + 8)) - x) / 2``, evaluated without cancellation."""

    kind: ClassVar[str] = "algebraic_example"

    def _eval(self, x):
        denom = np.sqrt(x * (x + 8.0)) + x
        return np.divide(4.0 * x, denom, out=np.zeros_like(x), where=denom > 0)


@dataclass(frozen=True)
class Identity(ScalarFunction):
    kind: ClassVar[str] = "identity"

    @property
    def domain(self):
        return REAL_LINE

    def _eval(self, x):
        return x.copy()


@dataclass(frozen=True)
class Constant(ScalarFunction):
    c: float
    kind: ClassVar[str] = "constant"

    @property
    def domain(self):
        return REAL_LINE

    def _eval(self, x):
        return np.full_like(x, self.c)

    def to_spec(self):
        return {"kind": "constant", "c": self.c}

    def __str__(self):
        return f"constant({self.c:g})"


@dataclass(frozen=True)
class Log(ScalarFunction):
    kind: ClassVar[str] = "log"

    @property
    def domain(self):
        return POSITIVE

    def _eval(self, x):
        return np.log(x)


@dataclass(frozen=True)
class NegLog1p(ScalarFunction):
    """``-log(1 + x)``: operator decreasing and operator convex, vanishes at 0."""

    kind: ClassVar[str] = "neg_log1p"

    @property
    def domain(self):
        return Interval(-1.0, lo_closed=False)

    def _eval(self, x):
        return -np.log1p(x)


@dataclass(frozen=True)
class Reciprocal(ScalarFunction):
    kind: ClassVar[str] = "reciprocal"

    @property
    def domain(self):
        return POSITIVE

    def _eval(self, x):
        return 1.0 / x


@dataclass(frozen=True)
class Sqrt(ScalarFunction):
    kind: ClassVar[str] = "sqrt"

    def _eval(self, x):
        return np.sqrt(x)


# -- discrete-measure representations -----------------------------------------


@dataclass(frozen=True)
class DiscreteMeasureSpec:
    """Constants and atoms ``(location, weight)`` of a discrete measure."""

    alpha: float = 0.0
    beta: float = 0.0
    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple((float(lam), float(w)) for lam, w in self.atoms))
        if not (self.alpha >= 0 and self.beta >= 0):
            raise SpecError(f"alpha and beta must be nonnegative, got {self.alpha}, {self.beta}")
        for lam, w in self.atoms:
            if not (lam > 0 and w > 0 and math.isfinite(lam) and math.isfinite(w)):
                raise SpecError(f"atoms need positive location and weight, got ({lam}, {w})")

    @property
    def locations(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)


@dataclass(frozen=True)
class MeasureFunction(ScalarFunction):
    """Function given by a discrete Loewner-type integral representation.

    ``monotone``:   ``alpha + beta x + sum_i w_i x / (x + l_i)``
    ``decreasing``: ``alpha + sum_i w_i (l_i + 1) / (l_i + x)``
    """

    spec: DiscreteMeasureSpec
    monotone: bool

    @property
    def kind(self):
        return "monotone_measure" if self.monotone else "decreasing_measure"

    def _eval(self, x):
        lam = self.spec.locations[:, None]
        w = self.spec.weights[:, None]
        if self.monotone:
            terms = w * x / (x + lam)
            return self.spec.alpha + self.spec.beta * x + terms.sum(axis=0)
        return self.spec.alpha + (w * (lam + 1.0) / (lam + x)).sum(axis=0)

    def to_spec(self):
        return {
            "kind": "measure",
            "monotone": self.monotone,
            "alpha": self.spec.alpha,
            "beta": self.spec.beta,
            "atoms": [list(a) for a in self.spec.atoms],
        }

    def __str__(self):
        return f"{self.kind}(alpha={self.spec.alpha:g}, beta={self.spec.beta:g}, atoms={len(self.spec.atoms)})"


def from_discrete_measure(kind: str, spec: DiscreteMeasureSpec) -> MeasureFunction:
    if kind == "monotone":
        return MeasureFunction(spec, True)
    if kind == "decreasing":
        if spec.beta != 0:
            raise SpecError("a decreasing representation has no linear term; beta must be 0")
        return MeasureFunction(spec, False)
    raise SpecError(f"measure kind must be 'monotone' or 'decreasing', not {kind!r}")


def random_measure_spec(rng: np.random.Generator, monotone: bool, max_atoms: int = 3) -> DiscreteMeasureSpec:
    """Random spec with log-uniform atom locations in ``[1e-2, 1e2]``."""
    n = int(rng.integers(1, max_atoms + 1))
    atoms = tuple(
        (float(10.0 ** rng.uniform(-2, 2)), float(rng.uniform(0.1, 2.0))) for _ in range(n)
    )
    alpha = float(rng.uniform(0, 1))
    beta = float(rng.uniform(0, 1)) if monotone else 0.0
    return DiscreteMeasureSpec(alpha, beta, atoms)


# -- derived functions ----------------------------------------------------------


def _limit_at_zero(fn) -> float:
    """Extrapolate ``fn(x)`` to ``x -> 0+`` from three geometric sample points.

    Aitken's delta-squared (Richardson with an estimated rate); returns ``inf``
    when the samples grow geometrically.
    """
    g1, g2, g3 = (float(fn(x)) for x in LIMIT_POINTS)
    d1, d2 = g2 - g1, g3 - g2
    if d1 == 0.0 or d2 == 0.0:
        return g3
    ratio = d2 / d1
    if abs(ratio) >= 1.0:
        return INF
    return g3 + d2 * ratio / (1.0 - ratio)


@dataclass(frozen=True, eq=False)
class Companion(ScalarFunction):
    """``g(x) = x / f(x)`` with ``g(0)`` fixed by its limit."""

    inner: ScalarFunction
    at_zero: float = field(init=False)
    kind: ClassVar[str] = "companion_of"

    def __post_init__(self):
        f = self.inner
        probe = PROBE_NODES[f.domain.contains(PROBE_NODES)]
        fv = f(probe)
        bad = ~(fv > 0) | ~np.isfinite(fv)
        if np.any(bad):
            raise SingularityError(
                f"{f} must be strictly positive for x / f(x); fails at x = {probe[bad][0]:g}",
                value=float(probe[bad][0]),
            )
        if f.domain.contains(0.0) and float(f(0.0)) > 0:
            g0 = 0.0
        else:
            # x / f(x) > 0 on the probe grid, so a negative limit is extrapolation noise
            g0 = max(_limit_at_zero(lambda x: x / float(f(x))), 0.0)
        object.__setattr__(self, "at_zero", g0)

    @property
    def domain(self):
        return NONNEGATIVE if math.isfinite(self.at_zero) else POSITIVE

    def _eval(self, x):
        out = np.empty_like(x)
        pos = x > 0
        fx = self.inner(x[pos])
        if np.any(fx == 0):
            raise SingularityError(f"{self.inner} vanishes at x = {x[pos][fx == 0][0]:g}")
        out[pos] = x[pos] / fx
        out[~pos] = self.at_zero
        return out

    def to_spec(self):
        return {"kind": "companion", "of": self.inner.to_spec()}

    def __str__(self):
        return f"x/{self.inner}"


def companion_g(f: ScalarFunction) -> Companion:
    return Companion(f)


@dataclass(frozen=True, eq=False)
class CompositeH(ScalarFunction):
    """``h = f o g^{-1}`` where ``g`` is the companion of ``f``.

    ``g`` is tabulated on a log grid (plus ``x = 0`` when ``g(0)`` is finite),
    must be strictly increasing there, and is inverted by bisection.
    """

    inner: ScalarFunction
    companion: Companion = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False)
    values: np.ndarray = field(init=False, repr=False)
    kind: ClassVar[str] = "composite_h_of"

    def __post_init__(self):
        g = Companion(self.inner)
        xs = PROBE_NODES
        if g.domain.contains(0.0):
            xs = np.concatenate(([0.0], xs))
        gv = g(xs)
        steps = np.diff(gv)
        if not np.all(steps > 0):
            i = int(np.argmax(~(steps > 0)))
            raise NotInvertibleError(
                f"x/{self.inner} is not strictly increasing near x = {xs[i]:g} .. {xs[i + 1]:g}"
            )
        object.__setattr__(self, "companion", g)
        object.__setattr__(self, "nodes", xs)
        object.__setattr__(self, "values", gv)

    @property
    def domain(self):
        return Interval(float(self.values[0]), float(self.values[-1]), True, True)

    def __call__(self, y):
        arr = np.asarray(y, dtype=float)
        lo, hi = self.values[0], self.values[-1]
        flat = np.atleast_1d(arr)
        bad = ~((flat >= lo) & (flat <= hi))
        if np.any(bad):
            value = float(flat[bad][0])
            raise RangeError(f"{value!r} is outside the probed range [{lo:g}, {hi:g}] of {self.companion}", value=value)
        out = self._eval(flat)
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def inverse_companion(self, y: np.ndarray) -> np.ndarray:
        """Solve ``g(x) = y`` by bracketed bisection on the tabulated grid."""
        idx = np.clip(np.searchsorted(self.values, y, side="right") - 1, 0, len(self.nodes) - 2)
        xl = self.nodes[idx].copy()
        xr = self.nodes[idx + 1].copy()
        for _ in range(INVERSE_MAX_STEPS):
            active = (xr - xl) > INVERSE_RTOL * xr
            if not np.any(active):
                break
            mid = 0.5 * (xl + xr)
            below = self.companion(mid) < y
            xl = np.where(active & below, mid, xl)
            xr = np.where(active & ~below, mid, xr)
        return 0.5 * (xl + xr)

    def _eval(self, y):
        return self.inner(self.inverse_companion(y))

    def to_spec(self):
        return {"kind": "composite_h", "of": self.inner.to_spec()}

    def __str__(self):
        return f"({self.inner})o(x/{self.inner})^-1"


def compose_with_g_inverse(f: ScalarFunction) -> CompositeH:
    return CompositeH(f)


@dataclass(frozen=True)
class Transpose(ScalarFunction):
    """``x f(1/x)`` on ``(0, inf)``."""

    inner: ScalarFunction
    kind: ClassVar[str] = "transpose_of"

    @property
    def domain(self):
        return POSITIVE

    def _eval(self, x):
        return x * self.inner(1.0 / x)

    def to_spec(self):
        return {"kind": "transpose", "of": self.inner.to_spec()}

    def __str__(self):
        return f"transpose({self.inner})"


def transpose_function(f: ScalarFunction) -> Transpose:
    return Transpose(f)


# -- parsing ------------------------------------------------------------------

_SIMPLE = {
    "lambert_w": LambertW,
    "algebraic_example": AlgebraicExample,
    "identity": Identity,
    "log": Log,
    "neg_log1p": NegLog1p,
    "reciprocal": Reciprocal,
    "sqrt": Sqrt,
}


def function_from_spec(spec) -> ScalarFunction:
    """Build a function from a JSON object, JSON text or ``kind[:param]`` text.

    >>> function_from_spec("power:0.5")
    Power(s=0.5)
    >>> function_from_spec({"kind": "lambert_w"})
    LambertW()
    """
    if isinstance(spec, ScalarFunction):
        return spec
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            try:
                return function_from_spec(json.loads(text))
            except json.JSONDecodeError as exc:
                raise SpecError(f"bad function JSON {text!r}: {exc}") from exc
        kind, _, arg = text.partition(":")
        if kind in _SIMPLE and not arg:
            return _SIMPLE[kind]()
        if kind in ("power", "constant") and arg:
            try:
                value = float(arg)
            except ValueError as exc:
                raise SpecError(f"bad parameter in {text!r}") from exc
            return Power(value) if kind == "power" else Constant(value)
        raise SpecError(f"unknown function {text!r}")
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpecError(f"function spec must be an object with a 'kind', got {spec!r}")
    kind = spec["kind"]
    try:
        if kind in _SIMPLE:
            return _SIMPLE[kind]()
        if kind == "power":
            return Power(float(spec["s"]))
        if kind == "constant":
            return Constant(float(spec["c"]))
        if kind == "measure":
            mspec = DiscreteMeasureSpec(
                float(spec.get("alpha", 0.0)),
                float(spec.get("beta", 0.0)),
                tuple(tuple(a) for a in spec.get("atoms", [])),
            )
            return from_discrete_measure("monotone" if spec.get("monotone", True) else "decreasing", mspec)
        if kind in ("companion", "companion_of"):
            return Companion(function_from_spec(spec["of"]))
        if kind in ("composite_h", "composite_h_of"):
            return CompositeH(function_from_spec(spec["of"]))
        if kind in ("transpose", "transpose_of"):
            return Transpose(function_from_spec(spec["of"]))
    except KeyError as exc:
        raise SpecError(f"function spec {spec!r} is missing {exc}") from exc
    raise SpecError(f"unknown function kind {kind!r}")


def parse_function_list(text: str) -> list[ScalarFunction]:
    """Split a comma-separated ``--functions`` value (JSON objects allowed)."""
    items, depth, current = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            items.append("".join(current))
            current = []
            continue
        depth += {"{": 1, "[": 1, "}": -1, "]": -1}.get(ch, 0)
        current.append(ch)
    items.append("".join(current))
    return [function_from_spec(item) for item in items if item.strip()]


def theorem_catalog() -> list[ScalarFunction]:
    """Powers ``0.1 .. 0.9`` plus the Lambert W and algebraic examples."""
    return [Power(round(0.1 * k, 1)) for k in range(1, 10)] + [LambertW(), AlgebraicExample()]


def power_family(grid: Sequence[float]) -> list[ScalarFunction]:
    return [Power(float(s)) for s in grid]
