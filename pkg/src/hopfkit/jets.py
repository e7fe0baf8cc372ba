"""Truncated derivative sequences (Taylor-mode differentiation).

A :class:`Jet` stores the value and the first ``order`` derivatives of a
function at a point, ``derivs[k] = f^(k)(point)``.  Entries may be plain
floats or numpy arrays of a common shape; in the latter case the jet
describes a batch of points and every operation acts elementwise.  That
batching is what keeps grid scans (operator residuals, barrier
certificates) vectorized.

Products follow the Leibniz rule on derivative values directly.  Quotients
and elementary functions go through normalized Taylor coefficients
``t_k = f^(k) / k!`` where the classical recurrences are simplest.
"""

from __future__ import annotations

import math
from numbers import Real

import numpy as np

from .errors import ArgumentError, DomainError, NonDifferentiableError, SingularityError

MAX_ORDER = 12

BINOM = [[math.comb(k, j) for j in range(MAX_ORDER + 2)] for k in range(MAX_ORDER + 2)]
FACT = [float(math.factorial(k)) for k in range(MAX_ORDER + 2)]


def _finite(d) -> bool:
    if isinstance(d, float):
        return math.isfinite(d)
    return bool(np.all(np.isfinite(d)))


def _same_point(p, q) -> bool:
    if p is q:
        return True
    if isinstance(p, np.ndarray) or isinstance(q, np.ndarray):
        return np.shape(p) == np.shape(q) and bool(np.all(p == q))
    return p == q


def _any_zero(v) -> bool:
    return bool(np.any(np.asarray(v) == 0))


class Jet:
    """Value plus derivatives of orders 1..order at ``point``."""

    __slots__ = ("point", "derivs")
    __array_ufunc__ = None  # make numpy defer to the reflected jet operators

    def __init__(self, point, derivs):
        derivs = tuple(derivs)
        if not derivs:
            raise ArgumentError("a jet needs at least the function value")
        if len(derivs) - 1 > MAX_ORDER:
            raise ArgumentError(f"jet order {len(derivs) - 1} exceeds MAX_ORDER={MAX_ORDER}")
        for d in derivs:
            if not _finite(d):
                raise ArgumentError("jet entries must be finite")
        self.point = point
        self.derivs = derivs

    # construction -------------------------------------------------------
    @classmethod
    def variable(cls, x, order: int) -> "Jet":
        """The identity function at ``x``: [x, 1, 0, ...]."""
        _check_order(order)
        return cls(x, (x,) + ((1.0,) if order >= 1 else ()) + (0.0,) * max(order - 1, 0))

    @classmethod
    def constant(cls, c, x, order: int) -> "Jet":
        _check_order(order)
        return cls(x, (c,) + (0.0,) * order)

    @classmethod
    def from_taylor(cls, x, coeffs) -> "Jet":
        return cls(x, [c * FACT[k] for k, c in enumerate(coeffs)])

    # accessors ----------------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.derivs) - 1

    @property
    def value(self):
        return self.derivs[0]

    def taylor(self) -> list:
        """Normalized Taylor coefficients f^(k)/k!."""
        return [d / FACT[k] for k, d in enumerate(self.derivs)]

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ArgumentError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.point, self.derivs[: order + 1])

    def derivative(self) -> "Jet":
        """Jet of f' (one order lower)."""
        if self.order < 1:
            raise ArgumentError("order-0 jet has no derivative information")
        return Jet(self.point, self.derivs[1:])

    def __len__(self) -> int:
        return len(self.derivs)

    def __repr__(self) -> str:
        return f"Jet(point={self.point!r}, derivs={list(self.derivs)!r})"

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ArgumentError(f"jet order mismatch: {self.order} vs {other.order}")
            if not _same_point(self.point, other.point):
                raise ArgumentError("jets evaluated at different points")
            return other
        if isinstance(other, (Real, np.ndarray, np.floating)):
            return Jet.constant(other, self.point, self.order)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, (Real, np.floating, np.ndarray)) and not isinstance(other, Jet):
            return Jet(self.point, (self.derivs[0] + other,) + self.derivs[1:])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(self.point, [p + q for p, q in zip(self.derivs, o.derivs)])

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.point, [-d for d in self.derivs])

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (Real, np.floating, np.ndarray)) and not isinstance(other, Jet):
            return Jet(self.point, (self.derivs[0] - other,) + self.derivs[1:])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(self.point, [p - q for p, q in zip(self.derivs, o.derivs)])

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Jet":
        return Jet(self.point, [c * d for d in self.derivs])

    def __mul__(self, other):
        if isinstance(other, (Real, np.floating, np.ndarray)) and not isinstance(other, Jet):
            return self.scale(other)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        f, g = self.derivs, o.derivs
        out = []
        for k in range(len(f)):
            row = BINOM[k]
            acc = f[0] * g[k]
            for j in range(1, k + 1):
                acc = acc + row[j] * f[j] * g[k - j]
            out.append(acc)
        return Jet(self.point, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Real, np.floating, np.ndarray)) and not isinstance(other, Jet):
            if _any_zero(other):
                raise SingularityError("division by zero")
            return Jet(self.point, [d / other for d in self.derivs])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        g0 = o.derivs[0]
        if _any_zero(g0):
            raise SingularityError("division by a jet whose value vanishes")
        f = self.taylor()
        g = o.taylor()
        q = []
        for k in range(len(f)):
            acc = f[k]
            for j in range(k):
                acc = acc - q[j] * g[k - j]
            q.append(acc / g0)
        return Jet.from_taylor(self.point, q)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.point, self.order) / self

    def __pow__(self, r):
        if isinstance(r, Jet):
            if all(not np.any(d) for d in r.derivs[1:]):
                return power(self, r.value)
            return exp(r * log(self))
        return power(self, r)

    # elementary shortcuts
    def exp(self):
        return exp(self)

    def sin(self):
        return sin(self)

    def cos(self):
        return cos(self)

    def log(self):
        return log(self)

    def abs(self):
        return jabs(self)


def _check_order(order: int) -> None:
    if order < 0 or order > MAX_ORDER:
        raise ArgumentError(f"order must lie in [0, {MAX_ORDER}], got {order}")


# ---------------------------------------------------------------------------
# elementary functions

def exp(f: Jet) -> Jet:
    t = f.taylor()
    e = [np.exp(t[0])]
    for k in range(1, len(t)):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + j * t[j] * e[k - j]
        e.append(acc / k)
    return Jet.from_taylor(f.point, e)


def _sincos(f: Jet):
    t = f.taylor()
    s = [np.sin(t[0])]
    c = [np.cos(t[0])]
    for k in range(1, len(t)):
        sa = 0.0
        ca = 0.0
        for j in range(1, k + 1):
            sa = sa + j * t[j] * c[k - j]
            ca = ca - j * t[j] * s[k - j]
        s.append(sa / k)
        c.append(ca / k)
    return Jet.from_taylor(f.point, s), Jet.from_taylor(f.point, c)


def sin(f: Jet) -> Jet:
    return _sincos(f)[0]


def cos(f: Jet) -> Jet:
    return _sincos(f)[1]


def log(f: Jet) -> Jet:
    f0 = f.derivs[0]
    if np.any(np.asarray(f0) <= 0):
        raise DomainError("log of a non-positive value")
    t = f.taylor()
    out = [np.log(f0)]
    for k in range(1, len(t)):
        acc = t[k]
        for j in range(1, k):
            acc = acc - (j / k) * out[j] * t[k - j]
        out.append(acc / f0)
    return Jet.from_taylor(f.point, out)


def jabs(f: Jet) -> Jet:
    f0 = np.asarray(f.derivs[0])
    if f.order >= 1 and np.any(f0 == 0):
        raise NonDifferentiableError("abs is not differentiable at a zero value")
    if f.order == 0:
        return Jet(f.point, (np.abs(f.derivs[0]),))
    sign = np.sign(f.derivs[0])
    return f.scale(sign)


def _int_power(f: Jet, n: int) -> Jet:
    """Repeated multiplication; the left-to-right order fixes the rounding."""
    if n == 0:
        return Jet.constant(1.0, f.point, f.order)
    result = f
    for _ in range(abs(n) - 1):
        result = result * f
    if n < 0:
        result = 1.0 / result
    return result


def integer_exponent(r) -> int | None:
    """The exponent as an int when it is one (scalar or uniform array), else None."""
    if np.ndim(r) == 0:
        rf = float(r)
    else:
        flat = np.asarray(r, dtype=float).ravel()
        if not np.all(flat == flat[0]):
            return None
        rf = float(flat[0])
    if rf.is_integer() and abs(rf) <= 64:
        return int(rf)
    return None


def power(f: Jet, r) -> Jet:
    """f**r for a constant real exponent r."""
    n = integer_exponent(r)
    if n is not None:
        return _int_power(f, n)
    f0 = np.asarray(f.derivs[0])
    if np.any(f0 < 0):
        raise DomainError("non-integer power of a negative base")
    if np.any(f0 == 0):
        if f.order >= 1 or np.any(np.asarray(r) < 0):
            raise NonDifferentiableError("non-integer power at a zero base")
        return Jet(f.point, (np.zeros_like(f.derivs[0]) if isinstance(f.derivs[0], np.ndarray) else 0.0,))
    t = f.taylor()
    f0 = t[0]
    p = [np.power(f0, r)]
    for k in range(1, len(t)):
        acc = 0.0
        for j in range(1, k + 1):
            acc = acc + ((r + 1) * j - k) * t[j] * p[k - j]
        p.append(acc / (k * f0))
    return Jet.from_taylor(f.point, p)


_UNARY = {"exp": exp, "sin": sin, "cos": cos, "log": log, "abs": jabs}


def jet_elementary(fn: str, arg: Jet, param=None) -> Jet:
    """Apply ``fn`` in {exp, sin, cos, log, abs, pow_const} to ``arg``."""
    if fn == "pow_const":
        if param is None:
            raise ArgumentError("pow_const needs an exponent")
        return power(arg, param)
    try:
        return _UNARY[fn](arg)
    except KeyError:
        raise ArgumentError(f"unknown elementary function {fn!r}") from None


def jet_arith(op: str, lhs: Jet, rhs) -> Jet:
    """Binary jet arithmetic by name: add, sub, mul, scale, div."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "scale":
        if isinstance(rhs, Jet):
            raise ArgumentError("scale takes a scalar right operand")
        return lhs.scale(rhs)
    if op == "div":
        return lhs / rhs
    raise ArgumentError(f"unknown jet operation {op!r}")
