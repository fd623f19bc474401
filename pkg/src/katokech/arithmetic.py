"""Scalar arithmetic for the Katok parameter.

A :class:`Param` is either an exact rational (every derived quantity is a
:class:`~fractions.Fraction`) or a high-precision real backed by a private
:mod:`mpmath` context.  Real-mode floors and comparisons are *certified*: an
argument closer than ``2**-64 * |x|`` to an integer (or two actions closer
than that to each other) raises instead of guessing.
"""

from __future__ import annotations

import enum
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, NamedTuple, Union

import mpmath
import numpy as np

from .errors import (
    AmbiguousComparison,
    AmbiguousFloor,
    FloorSumOverflow,
    InvalidParameter,
)

__all__ = [
    "GUARD_BITS",
    "MIN_PRECISION",
    "CertifiedFloor",
    "Ordering",
    "Param",
    "Ratio",
    "compare_actions",
    "compare_combinations",
    "floor_certified",
    "floor_sum",
    "floor_sum_fast",
    "floor_sum_fast_batch",
    "floor_sum_naive",
    "floor_sum_real",
]

GUARD_BITS = 64
MIN_PRECISION = 128
DEFAULT_PRECISION = 192
INT128_MAX = 2**127 - 1

Scalar = Union[Fraction, "mpmath.mpf"]


class Ratio(enum.Enum):
    """Quantities derived from ``a`` that appear inside floors."""

    INV_PLUS = "1/(1+a)"
    INV_MINUS = "1/(1-a)"
    A_PLUS = "a/(1+a)"
    A_MINUS = "a/(1-a)"
    SLOPE = "(1-a)/a"


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class CertifiedFloor(NamedTuple):
    value: int
    margin: Scalar


def _exact_ratio(a: Fraction, which: Ratio) -> Fraction:
    if which is Ratio.INV_PLUS:
        return 1 / (1 + a)
    if which is Ratio.INV_MINUS:
        return 1 / (1 - a)
    if which is Ratio.A_PLUS:
        return a / (1 + a)
    if which is Ratio.A_MINUS:
        return a / (1 - a)
    return (1 - a) / a


@dataclass(frozen=True)
class Param:
    """The Katok parameter ``a`` in (0, 1).

    Build one with :meth:`rational`, :meth:`real` or :meth:`parse`; the
    constructor itself is low level.
    """

    exact: Fraction | None
    label: str
    prec: int = DEFAULT_PRECISION
    factory: Callable | None = field(default=None, compare=False, repr=False)
    _cache: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        self._cache["lock"] = threading.Lock()
        if self.exact is None:
            if self.factory is None:
                raise InvalidParameter("real-mode Param needs a value factory")
            if self.prec < MIN_PRECISION:
                raise InvalidParameter(
                    f"real mode needs at least {MIN_PRECISION} bits, got {self.prec}"
                )
            ctx = mpmath.MPContext()
            ctx.prec = self.prec
            value = ctx.mpf(self.factory(ctx))
            self._cache["ctx"] = ctx
            self._cache["value"] = value
            if not 0 < value < 1:
                raise InvalidParameter(f"a must lie in (0, 1), got {self.label}")
        else:
            if not 0 < self.exact < 1:
                raise InvalidParameter(f"a must lie in (0, 1), got {self.exact}")
            self._cache["value"] = self.exact

    # -- constructors -----------------------------------------------------

    @classmethod
    def rational(cls, value, denominator: int | None = None) -> "Param":
        if denominator is not None:
            value = Fraction(value, denominator)
        elif isinstance(value, str):
            value = Fraction(value.strip())
        else:
            value = Fraction(value)
        return cls(exact=value, label=f"{value.numerator}/{value.denominator}")

    @classmethod
    def real(cls, factory: Callable, label: str, prec: int = DEFAULT_PRECISION) -> "Param":
        """Real-mode parameter; ``factory(ctx)`` returns ``a`` at ``ctx.prec`` bits."""
        return cls(exact=None, label=label, prec=prec, factory=factory)

    @classmethod
    def sqrt2_over_2(cls, prec: int = DEFAULT_PRECISION) -> "Param":
        return cls.real(lambda ctx: ctx.sqrt(2) / 2, "sqrt2/2", prec)

    @classmethod
    def inv_pi(cls, prec: int = DEFAULT_PRECISION) -> "Param":
        return cls.real(lambda ctx: 1 / ctx.pi, "1/pi", prec)

    @classmethod
    def parse(cls, token: str, prec: int = DEFAULT_PRECISION) -> "Param":
        """Parse ``p/q`` (rational), ``sqrt2/2``, ``1/pi`` or a decimal (real)."""
        tok = token.strip().lower().replace(" ", "")
        if tok in ("sqrt2/2", "sqrt(2)/2", "1/sqrt2", "1/sqrt(2)"):
            return cls.sqrt2_over_2(prec)
        if tok in ("1/pi",):
            return cls.inv_pi(prec)
        if re.fullmatch(r"\d+/\d+", tok):
            num, den = tok.split("/")
            if int(den) == 0:
                raise InvalidParameter(f"zero denominator in {token!r}")
            return cls.rational(Fraction(int(num), int(den)))
        if re.fullmatch(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?", tok):
            return cls.real(lambda ctx, s=tok: ctx.mpf(s), tok, prec)
        raise InvalidParameter(f"cannot parse parameter {token!r}")

    def with_precision(self, prec: int) -> "Param":
        if self.exact is not None:
            return self
        return Param.real(self.factory, self.label, prec)

    # -- accessors ---------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def mode(self) -> str:
        return "rational" if self.is_exact else "real"

    @property
    def value(self) -> Scalar:
        return self._cache["value"]

    @property
    def ctx(self) -> "mpmath.MPContext":
        """The private mpmath context (real mode only)."""
        return self._cache["ctx"]

    def __float__(self) -> float:
        return float(self.value)

    def ratio(self, which: Ratio) -> Scalar:
        key = ("ratio", which)
        if key not in self._cache:
            if self.is_exact:
                self._cache[key] = _exact_ratio(self.exact, which)
            else:
                a = self.value
                self._cache[key] = {
                    Ratio.INV_PLUS: lambda: 1 / (1 + a),
                    Ratio.INV_MINUS: lambda: 1 / (1 - a),
                    Ratio.A_PLUS: lambda: a / (1 + a),
                    Ratio.A_MINUS: lambda: a / (1 - a),
                    Ratio.SLOPE: lambda: (1 - a) / a,
                }[which]()
        return self._cache[key]

    def to_scalar(self, x) -> Scalar:
        """Coerce ``x`` into this parameter's arithmetic."""
        if self.is_exact:
            if isinstance(x, (int, Rational, float)):
                return Fraction(x)
            raise TypeError(f"cannot use {type(x).__name__} in rational mode")
        return self.ctx.mpf(x)

    def __str__(self) -> str:
        return self.label


def _guard(x) -> "mpmath.mpf":
    return abs(x) * mpmath.mpf(2) ** (-GUARD_BITS)


def floor_certified(k: int, r, param: Param) -> CertifiedFloor:
    """Return ``floor(k * r)`` with the distance to the nearest integer.

    ``r`` is a :class:`Ratio` member or an explicit number.  In rational mode
    an exact integer argument is accepted with margin 0.

    >>> floor_certified(2, Ratio.INV_PLUS, Param.rational(2, 5)).value
    1
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    r = param.ratio(r) if isinstance(r, Ratio) else param.to_scalar(r)
    if k == 0:
        return CertifiedFloor(0, Fraction(0) if param.is_exact else param.ctx.zero)
    x = k * r
    if param.is_exact:
        fl = x.numerator // x.denominator
        return CertifiedFloor(fl, min(x - fl, fl + 1 - x))
    ctx = param.ctx
    fl = int(ctx.floor(x))
    margin = min(x - fl, fl + 1 - x)
    if margin <= _guard(x):
        raise AmbiguousFloor(
            f"floor of {k}*r is within the guard band of an integer "
            f"at {param.prec} bits; raise precision or use rational mode",
            k=k,
            x=x,
        )
    return CertifiedFloor(fl, margin)


def floor_sum_naive(n: int, p: int, q: int) -> int:
    """Reference loop for ``sum(floor(k*p/q) for k in 1..n)``."""
    return sum(k * p // q for k in range(1, n + 1))


def floor_sum_fast(n: int, p: int, q: int) -> int:
    """``sum_{k=1}^{n} floor(k*p/q)`` in O(log max(p, q, n)) steps.

    Euclidean-style reduction: strip the integer parts of p/q, then swap the
    roles of the axes and recurse on the transposed lattice count.
    """
    if n < 0 or p < 0 or q <= 0:
        raise ValueError("need n >= 0, p >= 0, q > 0")
    # sum_{i=0}^{N-1} floor((A*i + B) / M) with N = n + 1, A = p, B = 0, M = q
    total = 0
    count, m, a, b = n + 1, q, p, 0
    while True:
        if a >= m:
            total += (count - 1) * count // 2 * (a // m)
            a %= m
        if b >= m:
            total += count * (b // m)
            b %= m
        y_max = a * count + b
        if y_max < m:
            break
        count, b = divmod(y_max, m)
        m, a = a, m
    if total > INT128_MAX:
        raise FloorSumOverflow(f"floor sum for n={n}, p={p}, q={q} exceeds 128 bits")
    return total


# (n+1)^2 * (p+1) below this keeps every intermediate of the batch loop in int64
_BATCH_SAFE = 2.0**61


def floor_sum_fast_batch(n, p, q) -> np.ndarray:
    """Elementwise :func:`floor_sum_fast` over broadcast integer arrays.

    Runs the same reduction in lockstep on int64 arrays.  Entries too large
    for int64 intermediates go through the scalar function, and the result
    then has dtype object.

    >>> floor_sum_fast_batch([4, 10], 7, 3).tolist()
    [22, 125]
    """
    try:
        n, p, q = np.broadcast_arrays(*(np.asarray(v, dtype=np.int64) for v in (n, p, q)))
    except OverflowError:
        n, p, q = np.broadcast_arrays(*(np.asarray(v, dtype=object) for v in (n, p, q)))
    if n.size and (n.min() < 0 or p.min() < 0 or q.min() <= 0):
        raise ValueError("need n >= 0, p >= 0, q > 0")
    if n.dtype == object:
        safe = np.zeros(n.shape, dtype=bool)
    else:
        nf, pf, qf = (v.astype(np.float64) for v in (n, p, q))
        safe = ((nf + 1) ** 2 * (pf + 1) < _BATCH_SAFE) & (qf < _BATCH_SAFE)
    count = n[safe].astype(np.int64) + 1
    m = q[safe].astype(np.int64)
    a = p[safe].astype(np.int64)
    b = np.zeros_like(a)
    total = np.zeros_like(a)
    idx = np.arange(a.size)
    while idx.size:
        # branch-free: the quotients vanish where a < m or b < m
        qa, a = np.divmod(a, m)
        qb, b = np.divmod(b, m)
        total[idx] += (count - 1) * count // 2 * qa + count * qb
        y_max = a * count + b
        keep = y_max >= m
        idx, y_max, a, m = idx[keep], y_max[keep], a[keep], m[keep]
        count, b = np.divmod(y_max, m)
        m, a = a, m
    if safe.all():
        out = np.empty(n.shape, dtype=np.int64)
        out[...] = total.reshape(n.shape) if n.shape else total[0]
        return out
    out = np.empty(n.shape, dtype=object)
    out[safe] = total
    for idx in zip(*np.nonzero(~safe)):
        out[idx] = floor_sum_fast(int(n[idx]), int(p[idx]), int(q[idx]))
    return out


def floor_sum_real(n: int, r, param: Param) -> int:
    """``sum_{k=1}^{n} floor(k*r)`` with every term certified.

    For a :class:`Ratio` the partial sums are memoized on the parameter.
    """
    if not isinstance(r, Ratio):
        total = sum(floor_certified(k, r, param).value for k in range(1, n + 1))
    else:
        with param._cache["lock"]:
            sums = param._cache.setdefault(("prefix", r), [0])
            for k in range(len(sums), n + 1):
                sums.append(sums[-1] + floor_certified(k, r, param).value)
            total = sums[n]
    if total > INT128_MAX:
        raise FloorSumOverflow(f"floor sum for n={n} exceeds 128 bits")
    return total


def floor_sum(n: int, r: Ratio, param: Param, *, strict: bool = False) -> int:
    """Mode-dispatching floor sum over ``k = 1..n`` of ``floor(k * r)``.

    In rational mode the ratio is reduced to ``P/Q`` and handed to
    :func:`floor_sum_fast`.  ``strict=True`` counts exact integers ``k*r`` as
    one less (the left limit of the floor), which matters only there.
    """
    if not param.is_exact:
        return floor_sum_real(n, r, param)
    x = param.ratio(r)
    total = floor_sum_fast(n, x.numerator, x.denominator)
    if strict:
        total -= n // x.denominator
    return total


def compare_combinations(w1, w2, x, y, ctx=None) -> Ordering:
    """Order ``w1.m1*x + w1.m2*y`` against the same for ``w2``.

    Exact when ``x`` and ``y`` are rationals.  With mpf generators the
    ordering is certified against the relative guard band, and Equal is
    reported only when the combinations coincide formally.
    """
    m1, m2 = w1
    n1, n2 = w2
    if (m1, m2) == (n1, n2):
        return Ordering.EQUAL
    if isinstance(x, Rational) and isinstance(y, Rational):
        d = (m1 - n1) * Fraction(x) + (m2 - n2) * Fraction(y)
        return Ordering((d > 0) - (d < 0))
    if x == y and m1 + m2 == n1 + n2:
        return Ordering.EQUAL
    v1 = m1 * x + m2 * y
    v2 = n1 * x + n2 * y
    d = v1 - v2
    if abs(d) <= _guard(max(abs(v1), abs(v2))):
        raise AmbiguousComparison(
            f"actions of {tuple(w1)} and {tuple(w2)} agree to within the guard band",
            pair=(tuple(w1), tuple(w2)),
        )
    return Ordering.GREATER if d > 0 else Ordering.LESS


def compare_actions(w1, w2, param: Param) -> Ordering:
    """Compare Katok actions ``m1*2pi/(1+a) + m2*2pi/(1-a)``.

    The common factor 2*pi cancels.  In rational mode with ``a = p/q`` the
    comparison reduces to the integers ``m1*(q-p) + m2*(q+p)``.
    """
    if param.is_exact:
        p, q = param.exact.numerator, param.exact.denominator
        d = (w1[0] - w2[0]) * (q - p) + (w1[1] - w2[1]) * (q + p)
        return Ordering((d > 0) - (d < 0))
    return compare_combinations(
        w1, w2, param.ratio(Ratio.INV_PLUS), param.ratio(Ratio.INV_MINUS)
    )
