"""Closed real intervals with outward rounding.

Every operation widens its result by one ulp on each side, so the true value
of any expression built from enclosing inputs stays enclosed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

_INF = math.inf


def _down(x: float) -> float:
    # inf - inf widens to the whole line
    if math.isnan(x):
        return -_INF
    return math.nextafter(x, -_INF) if math.isfinite(x) else x


def _up(x: float) -> float:
    if math.isnan(x):
        return _INF
    return math.nextafter(x, _INF) if math.isfinite(x) else x


def _mul_down(a: float, b: float) -> float:
    # 0 * inf is 0 here: an exact zero factor kills a divergent one.
    if a == 0 or b == 0:
        return 0.0
    return _down(a * b)


def _mul_up(a: float, b: float) -> float:
    if a == 0 or b == 0:
        return 0.0
    return _up(a * b)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        x = float(x)
        return cls(x, x)

    @classmethod
    def around(cls, value: float, radius: float) -> "Interval":
        return cls(_down(value - radius), _up(value + radius))

    @classmethod
    def infinite(cls) -> "Interval":
        return cls(_INF, _INF)

    @property
    def mid(self) -> float:
        if not self.is_finite:
            return self.hi
        return 0.5 * (self.lo + self.hi)

    @property
    def rad(self) -> float:
        if not self.is_finite:
            return _INF
        return _up(0.5 * (self.hi - self.lo))

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def _coerce(self, other) -> "Interval":
        return other if isinstance(other, Interval) else Interval.point(other)

    def __add__(self, other):
        o = self._coerce(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._coerce(other)
        return Interval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return Interval(min(_mul_down(a, b) for a, b in pairs),
                        max(_mul_up(a, b) for a, b in pairs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            return Interval(-_INF, _INF)
        inv = Interval(_down(1.0 / o.hi), _up(1.0 / o.lo))
        return self * inv

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        base = self
        if k % 2 == 0 and self.lo < 0 < self.hi:
            base = Interval(0.0, max(-self.lo, self.hi))
        elif k % 2 == 0 and self.hi <= 0:
            base = -self
        out = Interval.point(1.0)
        for _ in range(int(k)):
            out = out * base
        return out

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi
