"""Truncated multivariate Taylor arithmetic (jets).

A :class:`Jet` carries the value and all partial derivatives, up to a fixed
total order, of a scalar quantity with respect to a fixed set of seed
directions.  Arithmetic and the elementary functions propagate coefficients
through the truncated Taylor algebra, so every derivative downstream code
reads off is exact up to machine roundoff rather than a difference
approximation.

Coefficients use the Taylor normalization: the entry stored for the
multi-index ``alpha`` is ``(d^alpha f) / alpha!``.  Mixed partials of any
composed expression are exact to the carried total order, which is what the
curvature pipeline needs when it differentiates quantities that already
contain second derivatives of an immersion.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Jet",
    "InsufficientJetOrder",
    "lift_constant",
    "seed_variable",
    "seed_point",
    "as_jet",
    "partial",
    "sin",
    "cos",
    "exp",
    "sqrt",
]

_Number = (int, float, np.integer, np.floating)


class InsufficientJetOrder(ValueError):
    """A jet does not carry enough derivative orders for the requested operation."""


def _compositions(total: int, slots: int):
    if slots == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


class _Algebra:
    """Multiplication and derivative tables for one (nvars, order) pair.

    Exponent tuples are enumerated by total degree, so the coefficient
    layout of a lower order is a prefix of every higher order over the same
    variables; truncation is a slice.
    """

    __slots__ = ("nvars", "order", "exps", "index", "size", "_mul", "_diff", "_masks")

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        exps: list[tuple[int, ...]] = []
        for total in range(order + 1):
            exps.extend(_compositions(total, nvars))
        self.exps = tuple(exps)
        self.index = {e: i for i, e in enumerate(exps)}
        self.size = len(exps)
        self._mul = None
        self._diff: dict[int, tuple] = {}
        self._masks: dict[tuple[int, ...], np.ndarray] = {}

    def mul_table(self):
        if self._mul is None:
            ia, ib, iout = [], [], []
            for i, a in enumerate(self.exps):
                da = sum(a)
                for j, b in enumerate(self.exps):
                    if da + sum(b) > self.order:
                        continue
                    ia.append(i)
                    ib.append(j)
                    iout.append(self.index[tuple(x + y for x, y in zip(a, b))])
            self._mul = (np.asarray(ia), np.asarray(ib), np.asarray(iout))
        return self._mul

    def diff_table(self, var: int):
        if var not in self._diff:
            small = _algebra(self.nvars, self.order - 1)
            dst, src, fac = [], [], []
            for k, e in enumerate(small.exps):
                lifted = list(e)
                lifted[var] += 1
                dst.append(k)
                src.append(self.index[tuple(lifted)])
                fac.append(e[var] + 1)
            self._diff[var] = (
                np.asarray(dst),
                np.asarray(src),
                np.asarray(fac, dtype=float),
            )
        return self._diff[var]

    def zero_mask(self, variables: Iterable[int]) -> np.ndarray:
        key = tuple(sorted(set(variables)))
        if key not in self._masks:
            self._masks[key] = np.array(
                [all(e[v] == 0 for v in key) for e in self.exps], dtype=float
            )
        return self._masks[key]


@lru_cache(maxsize=None)
def _algebra(nvars: int, order: int) -> _Algebra:
    if nvars < 1:
        raise ValueError("a jet needs at least one seed direction")
    if order < 0:
        raise ValueError("jet order must be non-negative")
    return _Algebra(nvars, order)


class Jet:
    """Value plus exact derivatives of a scalar, up to a fixed total order."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg: _Algebra, coeffs: np.ndarray):
        self.alg = alg
        self.coeffs = coeffs

    # ---- introspection -------------------------------------------------

    @property
    def order(self) -> int:
        return self.alg.order

    @property
    def nvars(self) -> int:
        return self.alg.nvars

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def coefficient(self, exponents: Sequence[int]) -> float:
        key = tuple(exponents)
        try:
            return float(self.coeffs[self.alg.index[key]])
        except KeyError:
            raise InsufficientJetOrder(
                f"multi-index {key} is not carried at order {self.order}"
            ) from None

    def derivative(self, exponents: Sequence[int]) -> float:
        scale = 1.0
        for e in exponents:
            scale *= math.factorial(e)
        return self.coefficient(exponents) * scale

    def gradient(self) -> np.ndarray:
        """First partial derivatives along every seed direction."""
        if self.order < 1:
            raise InsufficientJetOrder("order-0 jet has no first derivatives")
        return self.coeffs[1 : 1 + self.nvars].copy()

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise InsufficientJetOrder(
                f"cannot raise jet order from {self.order} to {order}"
            )
        if order == self.order:
            return self
        alg = _algebra(self.nvars, order)
        return Jet(alg, self.coeffs[: alg.size].copy())

    def drop_directions(self, variables: Iterable[int]) -> "Jet":
        """Evaluate at zero offset in the given seed directions."""
        return Jet(self.alg, self.coeffs * self.alg.zero_mask(variables))

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, nvars={self.nvars}, value={self.value!r})"

    # ---- arithmetic ----------------------------------------------------

    def _lift(self, value: float) -> "Jet":
        c = np.zeros(self.alg.size)
        c[0] = float(value)
        return Jet(self.alg, c)

    def _coerce(self, other):
        if isinstance(other, Jet):
            return _align(self, other)
        if isinstance(other, _Number):
            return self, self._lift(float(other))
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return Jet(a.alg, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return Jet(a.alg, a.coeffs - b.coeffs)

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return Jet(a.alg, b.coeffs - a.coeffs)

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        ia, ib, iout = a.alg.mul_table()
        w = a.coeffs[ia] * b.coeffs[ib]
        return Jet(a.alg, np.bincount(iout, weights=w, minlength=a.alg.size))

    __rmul__ = __mul__

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a * b._reciprocal()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return b * a._reciprocal()

    def __neg__(self):
        return Jet(self.alg, -self.coeffs)

    def __pos__(self):
        return self

    def __pow__(self, power):
        if not isinstance(power, _Number):
            return NotImplemented
        q = float(power)
        if q.is_integer():
            k = int(q)
            base = self if k >= 0 else self._reciprocal()
            k = abs(k)
            result = self._lift(1.0)
            while k:
                if k & 1:
                    result = result * base
                base = base * base
                k >>= 1
            return result
        if (2.0 * q).is_integer():
            v = self.value
            if v <= 0.0:
                raise ValueError(
                    f"half-integer power needs a positive base value, got {v}"
                )
            ders, c = [], 1.0
            for k in range(self.order + 1):
                ders.append(c * v ** (q - k))
                c *= q - k
            return _analytic(self, ders)
        raise ValueError("only integer and half-integer exponents are supported")

    def _reciprocal(self) -> "Jet":
        v = self.value
        if v == 0.0:
            raise ZeroDivisionError("division by a jet with zero value")
        ders = [
            (-1.0) ** k * math.factorial(k) / v ** (k + 1)
            for k in range(self.order + 1)
        ]
        return _analytic(self, ders)


def _align(a: Jet, b: Jet) -> tuple[Jet, Jet]:
    if a.alg is b.alg:
        return a, b
    if a.alg.nvars != b.alg.nvars:
        raise ValueError("jets carry different seed sets")
    m = min(a.order, b.order)
    return a.truncate(m), b.truncate(m)


def _analytic(j: Jet, derivatives: Sequence[float]) -> Jet:
    """Compose a scalar analytic function with a jet.

    ``derivatives[k]`` is the k-th derivative of the function at ``j.value``.
    Uses a Horner scheme in the derivative part of ``j``.
    """
    zero_part = Jet(j.alg, j.coeffs.copy())
    zero_part.coeffs[0] = 0.0
    ck = [d / math.factorial(k) for k, d in enumerate(derivatives)]
    result = j._lift(ck[-1])
    for k in range(j.order - 1, -1, -1):
        result = result * zero_part
        result.coeffs[0] += ck[k]
    return result


# ---- construction ------------------------------------------------------


def lift_constant(value: float, order: int, nvars: int = 1) -> Jet:
    """Jet of a constant: zeroth coefficient is the value, all others zero."""
    alg = _algebra(nvars, order)
    c = np.zeros(alg.size)
    c[0] = float(value)
    return Jet(alg, c)


def seed_variable(value: float, direction: int, order: int, nvars: int | None = None) -> Jet:
    """Jet of an independent variable: unit first derivative along one direction."""
    if nvars is None:
        nvars = direction + 1
    if not 0 <= direction < nvars:
        raise ValueError(f"direction {direction} invalid for {nvars} seed directions")
    if order < 1:
        raise InsufficientJetOrder("seeding a variable requires order >= 1")
    alg = _algebra(nvars, order)
    c = np.zeros(alg.size)
    c[0] = float(value)
    c[1 + direction] = 1.0
    return Jet(alg, c)


def seed_point(values: Sequence[float], order: int) -> list[Jet]:
    """Seed one jet per entry, each along its own direction."""
    nvars = len(values)
    return [seed_variable(v, i, order, nvars) for i, v in enumerate(values)]


def as_jet(value, order: int, nvars: int) -> Jet:
    """Pass jets through; lift plain numbers to constant jets."""
    if isinstance(value, Jet):
        return value
    return lift_constant(float(value), order, nvars)


def partial(j: Jet, var: int) -> Jet:
    """Partial derivative along one seed direction; drops one order."""
    if j.order < 1:
        raise InsufficientJetOrder("cannot differentiate an order-0 jet")
    if not 0 <= var < j.nvars:
        raise ValueError(f"direction {var} invalid for {j.nvars} seed directions")
    dst, src, fac = j.alg.diff_table(var)
    alg = _algebra(j.nvars, j.order - 1)
    out = np.zeros(alg.size)
    out[dst] = j.coeffs[src] * fac
    return Jet(alg, out)


# ---- elementary functions (work on floats and jets alike) ---------------


def sin(x):
    if isinstance(x, Jet):
        v = x.value
        cycle = (math.sin(v), math.cos(v), -math.sin(v), -math.cos(v))
        return _analytic(x, [cycle[k % 4] for k in range(x.order + 1)])
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet):
        v = x.value
        cycle = (math.cos(v), -math.sin(v), -math.cos(v), math.sin(v))
        return _analytic(x, [cycle[k % 4] for k in range(x.order + 1)])
    return math.cos(x)


def exp(x):
    if isinstance(x, Jet):
        e = math.exp(x.value)
        return _analytic(x, [e] * (x.order + 1))
    return math.exp(x)


def sqrt(x):
    if isinstance(x, Jet):
        if x.value <= 0.0:
            raise ValueError(f"sqrt needs a positive jet value, got {x.value}")
        return x ** 0.5
    return math.sqrt(x)
