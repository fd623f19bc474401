"""Lattice-point counts under a line of slope ``-(1-a)/a``.

For ``(n, m)`` in ``D = {0 <= m <= 2n}``, ``D_a(n, m)`` is the set of points
of ``D`` on or below the line of slope ``-(1-a)/a`` through ``(n, m)``.  Its
lattice-point count is computed three ways:

* :func:`count_bruteforce` enumerates candidate points and tests each one;
* :func:`count_decomposed` adds the pieces ``T1 + T2 - T3 + S``;
* :func:`f_a_closed_form` plus one.

The region is closed along the slanted line, so ``T3`` (the part of ``T1``
above the line) is open there.  For rational ``a`` this makes its floors
strict: an integer ``k*a/(1+a)`` contributes ``k*a/(1+a) - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import Param, Ratio, floor_certified, floor_sum
from .errors import AmbiguousComparison

__all__ = [
    "BijectionReport",
    "LatticeRegion",
    "count_bruteforce",
    "count_decomposed",
    "count_t3_bruteforce",
    "count_t3_transformed",
    "f_a_closed_form",
    "lattice_coordinates",
    "verify_bijection",
]

# float64 decides a*u + v when it is this far from zero; closer calls go to mpmath
_FLOAT_SAFE = 1e-6


@dataclass(frozen=True)
class LatticeRegion:
    n: int
    m: int
    param: Param

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.m <= 2 * self.n:
            raise ValueError(f"({self.n}, {self.m}) is not in D")

    @property
    def slope(self):
        return -self.param.ratio(Ratio.SLOPE)

    def x_extent(self) -> int:
        """Last column that can hold a point: the line's x-intercept."""
        return self.n + math.floor(self.m * float(self.param.ratio(Ratio.A_MINUS))) + 1

    def y_extent(self) -> int:
        """Highest row that can hold a point: the line's y-intercept."""
        return self.m + math.ceil(self.n * float(self.param.ratio(Ratio.SLOPE))) + 1


def lattice_coordinates(orbit_set) -> tuple[int, int]:
    """``(m1, m2) -> (n, m) = ((m1+m2)/2, m2)`` for an even orbit set."""
    m1, m2 = orbit_set
    if (m1 + m2) % 2:
        raise ValueError("lattice coordinates need even total weight")
    return (m1 + m2) // 2, m2


def _sign_a_u_plus_v(u: np.ndarray, v: np.ndarray, param: Param) -> np.ndarray:
    """Certified sign of ``a*u + v`` over integer arrays."""
    if param.is_exact:
        p, q = param.exact.numerator, param.exact.denominator
        return np.sign(p * u + q * v)
    d = float(param.value) * u + v
    out = np.sign(d).astype(np.int64)
    close = np.flatnonzero(np.abs(d) <= _FLOAT_SAFE)
    if close.size:
        a = param.value
        ctx = param.ctx
        for i in close:
            ui, vi = int(u.flat[i]), int(v.flat[i])
            if ui == 0 and vi == 0:
                out.flat[i] = 0
                continue
            exact = a * ui + vi
            guard = ctx.ldexp(max(abs(a * ui), abs(ctx.mpf(vi))), -64)
            if abs(exact) <= guard:
                raise AmbiguousComparison(
                    f"lattice point offset ({vi}, {ui + vi}) is too close to the line",
                    pair=(ui, vi),
                )
            out.flat[i] = 1 if exact > 0 else -1
    return out


def _on_or_below(region: LatticeRegion, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # (y - m) <= -(1-a)/a * (x - n)  <=>  a*(y - m - x + n) + (x - n) <= 0
    u = y - region.m - x + region.n
    v = x - region.n
    return _sign_a_u_plus_v(u, v, region.param) <= 0


def _grid(x_max: int, y_max: int) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = np.meshgrid(np.arange(x_max + 1), np.arange(y_max + 1), indexing="ij")
    keep = ys <= 2 * xs
    return xs[keep].astype(np.int64), ys[keep].astype(np.int64)


def count_bruteforce(region: LatticeRegion) -> int:
    """Count lattice points of ``D_a(n, m)`` by testing every candidate."""
    x, y = _grid(region.x_extent(), region.y_extent())
    return int(np.count_nonzero(_on_or_below(region, x, y)))


def count_t3_bruteforce(region: LatticeRegion) -> int:
    """Points of ``T3``: left of ``x = n``, within ``y <= 2x``, strictly above the line."""
    if region.n == 0:
        return 0
    x, y = _grid(region.n - 1, 2 * region.n)
    return int(np.count_nonzero(~_on_or_below(region, x, y)))


def count_t3_transformed(region: LatticeRegion) -> int:
    """Count ``T3`` after ``(x, y) -> (n - x, 2x - y)``.

    The image is the triangle with ``X >= 1``, ``Y >= 0`` strictly below the
    line of slope ``-(1+a)/a`` through ``(0, 2n - m)``.
    """
    top = 2 * region.n - region.m
    xs, ys = np.meshgrid(np.arange(1, top + 1), np.arange(top + 1), indexing="ij")
    X, Y = xs.ravel().astype(np.int64), ys.ravel().astype(np.int64)
    # Y < top - (1+a)/a * X  <=>  a*(top - X - Y) - X > 0
    return int(np.count_nonzero(_sign_a_u_plus_v(top - X - Y, -X, region.param) > 0))


def _t2(m: int, param: Param) -> int:
    return floor_sum(m, Ratio.A_MINUS, param)


def _t3(n: int, m: int, param: Param) -> int:
    return floor_sum(2 * n - m, Ratio.A_PLUS, param, strict=True)


def count_decomposed(region: LatticeRegion) -> int:
    """``L(T1) + L(T2) - L(T3) + L(S)`` with ``L(T1) = n²`` and ``L(S) = m + 1``."""
    n, m, param = region.n, region.m, region.param
    return n * n + _t2(m, param) - _t3(n, m, param) + (m + 1)


def f_a_closed_form(n: int, m: int, param: Param) -> int:
    """``n² + m - sum_{k<=2n-m} ⌊ka/(1+a)⌋ + sum_{k<=m} ⌊ka/(1-a)⌋``.

    The first sum uses strict floors for rational ``a`` (see module notes).
    """
    LatticeRegion(n, m, param)
    return n * n + m - _t3(n, m, param) + _t2(m, param)


@dataclass
class BijectionReport:
    injective: bool
    covered_prefix: int
    violations: list = field(default_factory=list)
    checked: int = 0
    expected_degenerate: bool = False

    @property
    def ok(self) -> bool:
        return self.injective

    def as_dict(self) -> dict:
        return {
            "injective": self.injective,
            "covered_prefix": self.covered_prefix,
            "violations": [
                {"value": v, "points": [list(p) for p in pts]} for v, pts in self.violations
            ],
            "checked": self.checked,
            "expected_degenerate": self.expected_degenerate,
        }


def _prefix_sums(param: Param, ratio: Ratio, n: int, strict: bool) -> list[int]:
    sums = [0]
    for k in range(1, n + 1):
        fl = floor_certified(k, ratio, param)
        sums.append(sums[-1] + fl.value - (1 if strict and fl.margin == 0 else 0))
    return sums


def verify_bijection(param: Param, bound: int) -> BijectionReport:
    """Check ``f_a`` on ``{(n, m) in D : n <= bound}``.

    Injectivity is checked directly.  A value below ``f_a(bound + 1, 0)``
    cannot be attained outside the window (``f_a`` grows with ``m`` and
    ``f_a(n, 0)`` grows with ``n``), so the reported prefix is provable.
    Collisions are listed; for rational ``a`` they are expected.
    """
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    t3 = _prefix_sums(param, Ratio.A_PLUS, 2 * bound + 2, strict=True)
    t2 = _prefix_sums(param, Ratio.A_MINUS, 2 * bound, strict=False)
    seen: dict[int, list] = {}
    for n in range(bound + 1):
        for m in range(2 * n + 1):
            v = n * n + m - t3[2 * n - m] + t2[m]
            seen.setdefault(v, []).append((n, m))
    ceiling = (bound + 1) ** 2 - t3[2 * bound + 2]
    violations = sorted((v, pts) for v, pts in seen.items() if len(pts) > 1)
    prefix = -1
    while prefix + 1 in seen and prefix + 1 < ceiling:
        prefix += 1
    return BijectionReport(
        injective=not violations,
        covered_prefix=prefix,
        violations=violations,
        checked=sum(len(p) for p in seen.values()),
        expected_degenerate=bool(violations) and param.is_exact,
    )
