"""Exact small-order lace-expansion coefficients for excited random walk.

Two independent routes compute the coefficients ``pi_m``:

* :func:`extract_pi` enumerates the two-point function ``c_n(x)`` and solves
  the convolution recursion

      c_{n+1}(x) = sum_y p(0,y) c_n(x-y) + sum_{m=2}^{n+1} sum_y pi_m(y) c_{n+1-m}(x-y)

  for ``pi_m`` one order at a time;
* :func:`enumerate_pi_direct` evaluates the nested sum over sub-walks
  ``omega^(0), ..., omega^(N)`` with the signed Delta-factors
  (kernel with concatenated history minus kernel without it).

Arithmetic is exact.  With ``beta = a/b`` every kernel value is an integer
over ``D = 2 d b``, so path weights are accumulated as integer numerators over
``D**m`` and only turned into ``Fraction`` at the end.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from .core import LatticeVector, ModelParams, add, origin, unit_steps
from .errors import ResourceError

DEFAULT_BUDGET = 11_000_000

RECURSION = "recursion-extracted"
DIRECT = "direct-enumerated"


def _kernel_ints(params: ModelParams):
    """``(a, b, D)`` with beta = a/b and every kernel value an integer over D."""
    beta = params.beta_exact
    a, b = beta.numerator, beta.denominator
    return a, b, 2 * params.d * b


@dataclass
class TwoPointTable:
    params: ModelParams
    nmax: int
    table: Dict[int, Dict[LatticeVector, Fraction]]


@dataclass
class PiTable:
    params: ModelParams
    mmax: int
    aggregated: Dict[int, Dict[LatticeVector, Fraction]]
    per_N: Optional[Dict[tuple, Dict[tuple, Fraction]]] = None
    source: str = RECURSION

    def norm_by_N(self, mmax: Optional[int] = None) -> Dict[int, Fraction]:
        """``sum_{m<=mmax} sum_{x,y} |pi_m^(N)(x,y)|`` for each N present."""
        if self.per_N is None:
            raise ValueError("per-N coefficients are only available from direct enumeration")
        mmax = self.mmax if mmax is None else mmax
        out: Dict[int, Fraction] = defaultdict(Fraction)
        for (N, m), tab in self.per_N.items():
            if m <= mmax:
                out[N] += sum((abs(v) for v in tab.values()), Fraction(0))
        return dict(out)


class _Codec:
    """Packs lattice points into ints so path arithmetic is integer addition."""

    def __init__(self, d: int, reach: int):
        self.d = d
        self.base = 2 * reach + 3
        self.offset = reach + 1
        self.origin = sum(self.offset * self.base ** i for i in range(d))
        self.steps = [s * self.base ** k for k in range(d) for s in (1, -1)]
        self.first = [1, -1] + [0] * (2 * d - 2)

    def decode(self, code: int) -> LatticeVector:
        out = []
        for _ in range(self.d):
            code, r = divmod(code, self.base)
            out.append(r - self.offset)
        return tuple(out)


def enumerate_two_point(params: ModelParams, nmax: int,
                        budget: int = DEFAULT_BUDGET) -> TwoPointTable:
    """Exact law of ``omega_n`` for n = 0..nmax by depth-first path enumeration.

    Interior nodes are paths of length < nmax; the last step is added in
    aggregate, so the work is about ``(2d)**(nmax-1)`` node visits, which must
    not exceed ``budget``.
    """
    d = params.d
    if nmax < 0:
        raise ValueError("nmax >= 0")
    if nmax >= 1 and (2 * d) ** (nmax - 1) > budget:
        raise ResourceError(f"(2d)^(nmax-1) = {(2 * d) ** (nmax - 1)} exceeds budget {budget}")
    a, b, D = _kernel_ints(params)
    codec = _Codec(d, max(nmax, 1))
    steps = codec.steps
    excited = [b + a * s1 for s1 in codec.first]
    acc = [defaultdict(int) for _ in range(nmax + 1)]
    acc[0][codec.origin] = 1
    counts = defaultdict(int)

    def dfs(pos: int, depth: int, weight: int):
        fresh = counts[pos] == 1
        kern = excited if fresh else None
        if depth == nmax - 1:
            row = acc[nmax]
            for k, s in enumerate(steps):
                w = kern[k] if fresh else b
                if w:
                    row[pos + s] += weight * w
            return
        row = acc[depth + 1]
        for k, s in enumerate(steps):
            w = kern[k] if fresh else b
            if not w:
                continue
            nxt = pos + s
            nw = weight * w
            row[nxt] += nw
            counts[nxt] += 1
            dfs(nxt, depth + 1, nw)
            counts[nxt] -= 1

    if nmax >= 1:
        counts[codec.origin] = 1
        dfs(codec.origin, 0, 1)
    table = {}
    for n in range(nmax + 1):
        den = D ** n
        table[n] = {codec.decode(x): Fraction(v, den) for x, v in acc[n].items() if v}
    return TwoPointTable(params, nmax, table)


def extract_pi(two_point: TwoPointTable) -> PiTable:
    """Solve the recursion for ``pi_m(y)``, m = 2..nmax, by forward deconvolution."""
    params = two_point.params
    d = params.d
    nmax = two_point.nmax
    a, b, D = _kernel_ints(params)
    # integer numerators: c_n over D**n, pi_m over D**m
    C = {}
    for n, tab in two_point.table.items():
        den = D ** n
        C[n] = {}
        for x, v in tab.items():
            num = v * den
            if num.denominator != 1:
                raise ValueError("two-point table is not over the kernel denominator")
            C[n][x] = num.numerator
    first = {s: b + a * s[0] for s in unit_steps(d)}
    P: Dict[int, Dict[LatticeVector, int]] = {}

    def convolve_into(out, f, g, sign=1):
        for y, fy in f.items():
            if not fy:
                continue
            for z, gz in g.items():
                x = add(y, z)
                out[x] = out.get(x, 0) + sign * fy * gz

    for n in range(2, nmax + 1):
        rest = dict(C[n])
        convolve_into(rest, first, C[n - 1], -1)
        for m in range(2, n):
            convolve_into(rest, P[m], C[n - m], -1)
        P[n] = {x: v for x, v in rest.items() if v}
    aggregated = {m: {y: Fraction(v, D ** m) for y, v in P[m].items()} for m in P}
    return PiTable(params, nmax, aggregated, None, RECURSION)


def _all_direct(params: ModelParams, mmax: int, max_level: Optional[int] = None):
    """Integer numerators of ``pi_m^(N)(x, y)`` for all N, m <= mmax."""
    d = params.d
    a, b, D = _kernel_ints(params)
    steps = unit_steps(d)
    e1_steps = [s for s in steps if s[0] != 0]
    max_level = mmax - 1 if max_level is None else min(max_level, mmax - 1)
    out = defaultdict(lambda: defaultdict(int))

    def kern(fresh: bool, s: LatticeVector) -> int:
        return b + a * s[0] if fresh else b

    def level(n: int, history: tuple, used: int, weight: int):
        # sub-walk omega^(n) starts at history[-1]; history acts as its past
        before = set(history[:-1])
        targets = tuple(before)
        start = history[-1]
        jmax = mmax - used - 1  # longest walk leaving room for the Delta step
        walk_counts = defaultdict(int)

        def reach(site) -> int:
            return min(sum(abs(p - q) for p, q in zip(site, t)) for t in targets)

        def dfs(site, i, w):
            # i = number of walk steps taken so far; site = omega_i
            fresh_without = walk_counts[site] == 0
            fresh_with = fresh_without and site not in before
            if fresh_with != fresh_without:
                m = used + i + 1
                sign = int(fresh_with) - int(fresh_without)
                for s in e1_steps:
                    delta = a * s[0] * sign
                    if not delta:
                        continue
                    y = add(site, s)
                    nw = w * delta
                    out[(n, m)][(site, y)] += nw
                    if n < max_level and m + 1 <= mmax:
                        walk = tuple(walk_seq) + (y,)
                        level(n + 1, walk, m, nw)
            if i >= jmax:
                return
            walk_counts[site] += 1
            for s in steps:
                k = b + a * s[0] if fresh_with else b
                if not k:
                    continue
                nxt = add(site, s)
                if reach(nxt) > jmax - i - 1:
                    continue
                walk_seq.append(nxt)
                dfs(nxt, i + 1, w * k)
                walk_seq.pop()
            walk_counts[site] -= 1

        if not targets:
            return
        walk_seq = [start]
        dfs(start, 0, weight)

    o = origin(d)
    if mmax >= 2:
        for s in steps:
            w = kern(True, s)
            if w:
                level(1, (o, s), 1, w)
    return out, D


def _to_fractions(raw, D):
    per_N = {}
    for (N, m), tab in raw.items():
        den = D ** m
        clean = {xy: Fraction(v, den) for xy, v in tab.items() if v}
        per_N[(N, m)] = clean
    return per_N


def _aggregate(per_N, mmax):
    agg = {m: defaultdict(Fraction) for m in range(2, mmax + 1)}
    for (N, m), tab in per_N.items():
        for (x, y), v in tab.items():
            agg[m][y] += v
    return {m: {y: v for y, v in tab.items() if v} for m, tab in agg.items()}


def enumerate_pi_all(params: ModelParams, mmax: int, max_level: Optional[int] = None) -> PiTable:
    """Direct enumeration of ``pi_m^(N)(x, y)`` for every N and every m <= mmax."""
    raw, D = _all_direct(params, mmax, max_level)
    per_N = _to_fractions(raw, D)
    for N in range(1, mmax):
        for m in range(N + 1, mmax + 1):
            per_N.setdefault((N, m), {})
    return PiTable(params, mmax, _aggregate(per_N, mmax), per_N, DIRECT)


def enumerate_pi_direct(params: ModelParams, N: int, m: int) -> PiTable:
    """``pi_m^(N)(x, y)`` for a single (N, m); empty when ``N + 1 > m``."""
    if N < 1:
        raise ValueError("N >= 1")
    if N + 1 > m:
        per_N = {(N, m): {}}
    else:
        raw, D = _all_direct(params, m, max_level=N)
        per_N = {(N, m): _to_fractions(raw, D).get((N, m), {})}
    agg = defaultdict(Fraction)
    for (x, y), v in per_N[(N, m)].items():
        agg[y] += v
    return PiTable(params, m, {m: {y: v for y, v in agg.items() if v}}, per_N, DIRECT)


@dataclass
class DriftSeries:
    params: ModelParams
    mmax: int
    value: tuple
    tail_bound: float
    partial_norms: Dict[int, Fraction] = field(default_factory=dict)


def drift_from_pi(params: ModelParams, pi: PiTable) -> tuple:
    """``beta e1 / d + sum_m sum_y y pi_m(y)`` as an exact rational vector."""
    d = params.d
    theta = [Fraction(0)] * d
    theta[0] = params.beta_exact / d
    for m, tab in pi.aggregated.items():
        for y, v in tab.items():
            for i in range(d):
                if y[i]:
                    theta[i] += y[i] * v
    return tuple(theta)


def drift_series(params: ModelParams, mmax: int, d_for_tail: Optional[int] = None,
                 tol: float = 1e-8) -> DriftSeries:
    """Truncated drift series with a rigorous bound on the omitted orders.

    The tail bound is ``sum_N (B_N - sum_{m<=mmax} ||pi_m^(N)||_1)`` where
    ``B_N`` is the upper end of :func:`~erwspeed.bounds.pi_norm_bound`; it is
    infinite when ``a_d >= 1`` or the Green's constants diverge.
    """
    from .bounds import bound_inputs, pi_norm_bound

    pi = enumerate_pi_all(params, mmax)
    value = drift_from_pi(params, pi)
    norms = pi.norm_by_N()
    beta = float(params.beta)
    if params.beta_exact == 0:
        return DriftSeries(params, mmax, value, 0.0, norms)
    d = params.d if d_for_tail is None else d_for_tail
    inputs = bound_inputs(d, tol)
    a = inputs.constants.a_d
    if not (a.is_finite and beta * a.hi < 1 and inputs.G1.is_finite):
        return DriftSeries(params, mmax, value, math.inf, norms)
    q = beta * a.hi
    start = max(mmax, 2)
    tail = 0.0
    for N in range(1, start):
        bound = pi_norm_bound(inputs, beta, N).hi
        tail += max(0.0, bound - float(norms.get(N, 0)))
    # N >= mmax contribute nothing up to order mmax: sum their bounds in closed form
    tail += pi_norm_bound(inputs, beta, start).hi / (1 - q)
    tail = math.nextafter(tail, math.inf)
    return DriftSeries(params, mmax, value, tail, norms)


def recursion_residual(two_point: TwoPointTable, pi: PiTable) -> int:
    """Largest n for which plugging ``pi`` back into the recursion misses ``c_n``.

    Returns 0 when the recursion reproduces every ``c_n``, n = 1..nmax, exactly.
    """
    first = _first_step(two_point.params)
    c = two_point.table
    worst = 0
    for n in range(1, two_point.nmax + 1):
        rebuilt: Dict[LatticeVector, Fraction] = defaultdict(Fraction)
        for y, p in first.items():
            for z, v in c[n - 1].items():
                rebuilt[add(y, z)] += p * v
        for m in range(2, n + 1):
            for y, p in pi.aggregated.get(m, {}).items():
                for z, v in c[n - m].items():
                    rebuilt[add(y, z)] += p * v
        clean = {x: v for x, v in rebuilt.items() if v}
        if clean != c[n]:
            worst = n
    return worst


def _first_step(params: ModelParams) -> Dict[LatticeVector, Fraction]:
    beta = params.beta_exact
    return {s: (1 + beta * s[0]) / (2 * params.d) for s in unit_steps(params.d)
            if 1 + beta * s[0]}


def crosscheck(params: ModelParams, mmax: int) -> dict:
    """Compare the recursion and direct routes and test the exact identities.

    Returns a dict of named boolean checks.
    """
    two_point = enumerate_two_point(params, mmax)
    rec = extract_pi(two_point)
    direct = enumerate_pi_all(params, mmax)
    checks = {}
    checks["routes_equal"] = all(rec.aggregated.get(m, {}) == direct.aggregated.get(m, {})
                                 for m in range(2, mmax + 1))
    mass = True
    for tab in direct.per_N.values():
        sums: Dict[LatticeVector, Fraction] = defaultdict(Fraction)
        for (x, y), v in tab.items():
            sums[x] += v
        mass &= all(v == 0 for v in sums.values())
    checks["mass_zero"] = mass
    checks["aggregate_mass_zero"] = all(sum(t.values(), Fraction(0)) == 0
                                        for t in rec.aggregated.values())
    checks["pi2_zero"] = not rec.aggregated.get(2) and not direct.aggregated.get(2)
    checks["high_level_zero"] = all(
        not enumerate_pi_direct(params, N, m).per_N[(N, m)]
        for m in range(1, mmax + 1) for N in range(m, m + 2))
    checks["recursion_closure"] = recursion_residual(two_point, rec) == 0
    checks["two_point_mass_one"] = all(sum(t.values(), Fraction(0)) == 1
                                       for t in two_point.table.values())
    return checks
