"""Lattice model for once-excited random walk on Z^d.

Points are plain tuples of ints.  A step from a site that has never been
visited before uses the tilted kernel ``(1 + beta * e1.s) / (2d)``; a step from
an already-visited site uses the simple random walk kernel ``1 / (2d)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Tuple, Union

from .errors import DomainError

LatticeVector = Tuple[int, ...]
Number = Union[float, Fraction]


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats go through their shortest repr (0.1 -> 1/10)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class ModelParams:
    d: int
    beta: Number = 0.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d!r}")
        if not 0 <= self.beta <= 1:
            raise DomainError(f"beta must lie in [0, 1], got {self.beta!r}")

    @property
    def beta_exact(self) -> Fraction:
        return as_fraction(self.beta)


def origin(d: int) -> LatticeVector:
    return (0,) * d


def unit(d: int, k: int, sign: int = 1) -> LatticeVector:
    """``sign * e_{k+1}`` in Z^d (``k`` is zero-based)."""
    v = [0] * d
    v[k] = sign
    return tuple(v)


def unit_steps(d: int) -> list:
    """The 2d nearest-neighbour steps, ordered +e1, -e1, +e2, -e2, ..."""
    return [unit(d, k, s) for k in range(d) for s in (1, -1)]


def add(x: LatticeVector, y: LatticeVector) -> LatticeVector:
    return tuple(a + b for a, b in zip(x, y))


def sub(x: LatticeVector, y: LatticeVector) -> LatticeVector:
    return tuple(a - b for a, b in zip(x, y))


def l1(x: LatticeVector) -> int:
    return sum(abs(a) for a in x)


def transition_probability(params: ModelParams, frm: LatticeVector, to: LatticeVector,
                           excited: bool, exact: bool = False) -> Number:
    """Probability of the step ``frm -> to``.

    With ``exact=True`` the result is a ``Fraction`` (beta converted by
    :func:`as_fraction`); otherwise a float.
    """
    d = params.d
    if len(frm) != d or len(to) != d:
        raise DomainError(f"points must have length {d}")
    step = sub(to, frm)
    if l1(step) != 1:
        raise DomainError(f"{frm} -> {to} is not a nearest-neighbour step")
    if exact:
        beta = params.beta_exact
        one = Fraction(1)
    else:
        beta = float(params.beta)
        one = 1.0
    if not excited:
        return one / (2 * d)
    return (one + beta * step[0]) / (2 * d)


@dataclass(frozen=True)
class WalkPath:
    """Immutable nearest-neighbour path with a visited-site index.

    ``endpoint_fresh`` records whether the last site was new when it was
    appended, so freshness of the endpoint is an O(1) query.
    """

    sites: Tuple[LatticeVector, ...]
    visited: frozenset = field(repr=False)
    endpoint_fresh: bool = True

    @classmethod
    def start(cls, d_or_site) -> "WalkPath":
        site = origin(d_or_site) if isinstance(d_or_site, int) else tuple(d_or_site)
        return cls((site,), frozenset((site,)), True)

    @classmethod
    def from_sites(cls, sites) -> "WalkPath":
        sites = [tuple(s) for s in sites]
        path = cls.start(sites[0])
        for a, b in zip(sites, sites[1:]):
            path = extend(path, sub(b, a))
        return path

    @property
    def length(self) -> int:
        return len(self.sites) - 1

    @property
    def d(self) -> int:
        return len(self.sites[0])

    @property
    def endpoint(self) -> LatticeVector:
        return self.sites[-1]

    def __len__(self):
        return len(self.sites)


def is_fresh(path: WalkPath, position: LatticeVector) -> bool:
    """True iff ``position`` (the endpoint) does not occur earlier in the path."""
    if tuple(position) != path.endpoint:
        raise DomainError("freshness is only defined for the current endpoint")
    return path.endpoint_fresh


def extend(path: WalkPath, step: LatticeVector) -> WalkPath:
    step = tuple(step)
    if len(step) != path.d or l1(step) != 1:
        raise DomainError(f"{step} is not a unit step in Z^{path.d}")
    site = add(path.endpoint, step)
    fresh = site not in path.visited
    visited = path.visited | {site} if fresh else path.visited
    return WalkPath(path.sites + (site,), visited, fresh)
