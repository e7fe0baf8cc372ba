"""Function oracles: objects that hand out jets of a function on an interval.

Every oracle implements ``jet(x, order)`` where ``x`` is a float or a 1-d
array of points, and ``values(x)`` for the plain function values.  The
concrete backings here are expressions, polynomials, constants, linear
combinations, reflections and piecewise-linear grid data; trajectories
live in :mod:`hopfkit.odeint`.
"""

from __future__ import annotations

import numpy as np

from . import expr as _expr
from .errors import ArgumentError, CapabilityError, DomainError
from .jets import MAX_ORDER, Jet


def _broadcast(v, x):
    if np.ndim(x) == 0:
        return float(v)
    return np.broadcast_to(np.asarray(v, dtype=float), np.shape(x)).copy()


def jet_table(u: "FunctionOracle", xs, order: int) -> np.ndarray:
    """Array of shape (order+1, len(xs)) with u^(k)(xs[i]) in row k."""
    xs = np.asarray(xs, dtype=float)
    j = u.jet(xs, order)
    return np.array([_broadcast(d, xs) for d in j.derivs])


class FunctionOracle:
    """Base class.  Subclasses override :meth:`jet` (and :meth:`values` for speed)."""

    domain: tuple[float, float] | None = None
    max_order: int = MAX_ORDER

    def jet(self, x, order: int) -> Jet:
        raise NotImplementedError

    def values(self, x):
        return _broadcast(self.jet(np.asarray(x, dtype=float) if np.ndim(x) else float(x), 0).value, x)

    def __call__(self, x):
        return self.values(x)

    def describe(self) -> dict:
        return {"kind": type(self).__name__}

    def _check(self, x, order: int) -> None:
        if order > self.max_order:
            raise CapabilityError(
                f"{type(self).__name__} supplies derivatives up to order {self.max_order}, "
                f"{order} requested")
        if self.domain is not None:
            lo, hi = self.domain
            xa = np.asarray(x)
            span = hi - lo
            slack = 1e-12 * max(1.0, abs(lo), abs(hi), span)
            if np.any(xa < lo - slack) or np.any(xa > hi + slack):
                raise DomainError(f"point outside the oracle domain [{lo}, {hi}]")

    # light algebra, used to assemble test functions and barrier differences
    def __add__(self, other):
        return LinearCombination([(1.0, self), (1.0, _as_oracle(other))])

    def __sub__(self, other):
        return LinearCombination([(1.0, self), (-1.0, _as_oracle(other))])

    def __neg__(self):
        return LinearCombination([(-1.0, self)])

    def __rmul__(self, c):
        return LinearCombination([(float(c), self)])


def _as_oracle(obj) -> FunctionOracle:
    if isinstance(obj, FunctionOracle):
        return obj
    if isinstance(obj, str):
        return ExprFunction(obj)
    return ConstantFunction(float(obj))


class ExprFunction(FunctionOracle):
    """A function of ``x`` given by an expr-v1 string or tree."""

    def __init__(self, source, domain=None):
        if isinstance(source, str):
            self.source = source
            self.tree = _expr.parse(source)
        else:
            self.tree = source
            self.source = _expr.to_source(source)
        extra = _expr.variables(self.tree) - {"x"}
        if extra:
            raise ArgumentError(f"expression for a function of x uses {sorted(extra)}")
        self.domain = domain

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        return _expr.eval_jet(self.tree, {"x": Jet.variable(x, order)}, order)

    def values(self, x):
        self._check(x, 0)
        return _broadcast(_expr.evaluate(self.tree, {"x": x}), x)

    def describe(self) -> dict:
        return {"expr": self.source}

    def __repr__(self) -> str:
        return f"ExprFunction({self.source!r})"


class ConstantFunction(FunctionOracle):
    def __init__(self, c: float):
        self.c = float(c)

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        return Jet.constant(_broadcast(self.c, x), x, order)

    def values(self, x):
        return _broadcast(self.c, x)

    def describe(self) -> dict:
        return {"expr": repr(self.c)}

    def __repr__(self) -> str:
        return f"ConstantFunction({self.c!r})"


class PolynomialFunction(FunctionOracle):
    """sum_j coeffs[j] * x**j with exact derivatives."""

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim != 1 or len(self.coeffs) == 0:
            raise ArgumentError("polynomial needs a 1-d coefficient sequence")

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        c = self.coeffs
        derivs = []
        for _ in range(order + 1):
            derivs.append(_broadcast(np.polynomial.polynomial.polyval(x, c), x))
            c = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(1)
        return Jet(x, derivs)

    def values(self, x):
        return _broadcast(np.polynomial.polynomial.polyval(x, self.coeffs), x)

    @property
    def source(self) -> str:
        terms = [repr(float(self.coeffs[0]))]
        for j, c in enumerate(self.coeffs[1:], start=1):
            terms.append(f"{float(c)!r}*x^{j}")
        return " + ".join(terms)

    def describe(self) -> dict:
        return {"expr": self.source}

    def __repr__(self) -> str:
        return f"PolynomialFunction({self.coeffs.tolist()!r})"


class JetFunction(FunctionOracle):
    """Wrap a Python callable mapping the identity jet to the function's jet."""

    def __init__(self, fn, label: str = "callable", domain=None):
        self.fn = fn
        self.label = label
        self.domain = domain

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        return self.fn(Jet.variable(x, order))

    def describe(self) -> dict:
        return {"callable": self.label}


class LinearCombination(FunctionOracle):
    def __init__(self, terms):
        self.terms = [(float(c), f) for c, f in terms]
        doms = [f.domain for _, f in self.terms if f.domain is not None]
        if doms:
            self.domain = (max(d[0] for d in doms), min(d[1] for d in doms))
        self.max_order = min(f.max_order for _, f in self.terms)

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        out = None
        for c, f in self.terms:
            term = f.jet(x, order).scale(c)
            out = term if out is None else out + term
        return out

    def values(self, x):
        return sum(c * f.values(x) for c, f in self.terms)

    def describe(self) -> dict:
        return {"combination": [[c, f.describe()] for c, f in self.terms]}


class Product(FunctionOracle):
    def __init__(self, f: FunctionOracle, g: FunctionOracle):
        self.f, self.g = f, g
        self.max_order = min(f.max_order, g.max_order)
        self.domain = _intersect(f.domain, g.domain)

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        return self.f.jet(x, order) * self.g.jet(x, order)

    def describe(self) -> dict:
        return {"product": [self.f.describe(), self.g.describe()]}


class Quotient(FunctionOracle):
    def __init__(self, f: FunctionOracle, g: FunctionOracle):
        self.f, self.g = f, g
        self.max_order = min(f.max_order, g.max_order)
        self.domain = _intersect(f.domain, g.domain)

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        return self.f.jet(x, order) / self.g.jet(x, order)

    def describe(self) -> dict:
        return {"quotient": [self.f.describe(), self.g.describe()]}


def _intersect(d1, d2):
    if d1 is None:
        return d2
    if d2 is None:
        return d1
    return (max(d1[0], d2[0]), min(d1[1], d2[1]))


class ReflectedFunction(FunctionOracle):
    """x -> sign * base(2*pivot - x); an involution for fixed pivot and sign."""

    def __init__(self, base: FunctionOracle, pivot: float, sign: float = 1.0):
        self.base = base
        self.pivot = float(pivot)
        self.sign = float(sign)
        self.max_order = base.max_order
        if base.domain is not None:
            lo, hi = base.domain
            self.domain = (2 * self.pivot - hi, 2 * self.pivot - lo)

    def _mirror(self, x):
        return 2 * self.pivot - np.asarray(x, dtype=float) if np.ndim(x) else 2 * self.pivot - float(x)

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        j = self.base.jet(self._mirror(x), order)
        s = self.sign
        return Jet(x, [(s if k % 2 == 0 else -s) * d for k, d in enumerate(j.derivs)])

    def values(self, x):
        return self.sign * self.base.values(self._mirror(x))

    def describe(self) -> dict:
        return {"reflected": self.base.describe(), "pivot": self.pivot, "sign": self.sign}


class GridFunction(FunctionOracle):
    """Piecewise-linear interpolation of values on an increasing grid (order 0 only)."""

    max_order = 0

    def __init__(self, grid, vals, label: str = "grid"):
        self.grid = np.asarray(grid, dtype=float)
        self.vals = np.asarray(vals, dtype=float)
        self.domain = (float(self.grid[0]), float(self.grid[-1]))
        self.label = label

    def jet(self, x, order: int) -> Jet:
        self._check(x, order)
        return Jet(x, (self.values(x),))

    def values(self, x):
        return _broadcast(np.interp(x, self.grid, self.vals), x)

    def describe(self) -> dict:
        return {"grid": self.label, "points": int(len(self.grid))}

