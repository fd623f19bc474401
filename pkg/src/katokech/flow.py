"""Numerical Katok geodesic flow on T*S^2.

Phase points live in ambient coordinates ``(q, p)`` in ``R^3 x R^3`` with
``|q| = 1`` and ``q . p = 0``.  The Hamiltonian is

    H_a(q, p) = |p| + a * p . (e_z x q)

and its vector field, with the constraint force solved in closed form, is

    dq/dt = p/|p| + a * e_z x q
    dp/dt = a * e_z x p - |p| * q.

:func:`integrate` runs classical RK4 with re-projection onto the constraint
after every step; :func:`exact_flow` composes unit-speed great-circle motion
with rotation about the z-axis and serves as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np
from scipy.optimize import brentq

from .arithmetic import Param
from .errors import AmbiguousFloor, DegeneratePoint, IllConditioned, NoConvergence

__all__ = [
    "OrbitRecord",
    "PhasePoint",
    "exact_flow",
    "find_closed_orbits",
    "hamiltonian",
    "integrate",
    "killing_field",
    "max_oracle_deviation",
    "monodromy",
    "normalize_energy",
    "rotation_angle",
    "rotation_to_cz",
]

ZERO_SECTION_TOL = 1e-12
DEFAULT_STEP = 1e-3


def _a(param) -> float:
    """Katok parameter as a float; the flow also accepts a = 0."""
    a = float(param)
    if not 0 <= a < 1:
        raise ValueError(f"a must lie in [0, 1), got {a}")
    return a


def killing_field(q: np.ndarray) -> np.ndarray:
    """Rotation generator about the z-axis, ``e_z x q = (-q_y, q_x, 0)``."""
    out = np.zeros_like(q)
    out[..., 0] = -q[..., 1]
    out[..., 1] = q[..., 0]
    return out


def _project(q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    p = p - np.sum(q * p, axis=-1, keepdims=True) * q
    return q, p


@dataclass(frozen=True)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray

    @classmethod
    def make(cls, q, p) -> "PhasePoint":
        """Build a point, projecting ``q`` to the sphere and ``p`` to its cotangent plane."""
        q, p = _project(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
        return cls(q, p)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    def distance(self, other: "PhasePoint") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))


def _norm_p(p: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(n < ZERO_SECTION_TOL):
        raise DegeneratePoint("|p| vanished: H_a is not smooth on the zero section")
    return n


def _hamiltonian(a: float, q: np.ndarray, p: np.ndarray) -> np.ndarray:
    return _norm_p(p)[..., 0] + a * np.sum(p * killing_field(q), axis=-1)


def hamiltonian(param, x: PhasePoint) -> float:
    """``|p| + a * p . d_theta(q)``.

    >>> hamiltonian(Param.rational(2, 5), PhasePoint.make([1, 0, 0], [0, 1, 0]))
    1.4
    """
    return float(_hamiltonian(_a(param), x.q, x.p))


def normalize_energy(param, x: PhasePoint) -> PhasePoint:
    """Rescale ``p`` so that ``H_a = 1`` (H_a is 1-homogeneous in p)."""
    h = hamiltonian(param, x)
    if h <= 0:
        raise DegeneratePoint("H_a must be positive to normalize")
    return PhasePoint(x.q.copy(), x.p / h)


def _field(a: float, q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = _norm_p(p)
    return p / r + a * killing_field(q), a * killing_field(p) - r * q


def _steps(a: float, q, p, t: float, step: float) -> Iterator[tuple[float, np.ndarray, np.ndarray]]:
    """Yield ``(time, q, p)`` after each RK4 step of a uniform grid up to ``t``."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = math.ceil(abs(t) / step - 1e-12) if t else 0
    if n == 0:
        return
    h = t / n
    for i in range(1, n + 1):
        k1q, k1p = _field(a, q, p)
        k2q, k2p = _field(a, q + 0.5 * h * k1q, p + 0.5 * h * k1p)
        k3q, k3p = _field(a, q + 0.5 * h * k2q, p + 0.5 * h * k2p)
        k4q, k4p = _field(a, q + h * k3q, p + h * k3p)
        q = q + (h / 6) * (k1q + 2 * k2q + 2 * k3q + k4q)
        p = p + (h / 6) * (k1p + 2 * k2p + 2 * k3p + k4p)
        q, p = _project(q, p)
        yield i * h, q, p


def _integrate_arrays(a: float, q, p, t: float, step: float):
    for _, q, p in _steps(a, q, p, t, step):
        pass
    return q, p


def integrate(param, x0: PhasePoint, t: float, step: float = DEFAULT_STEP) -> PhasePoint:
    """Flow ``x0`` for time ``t`` (RK4, uniform steps no longer than ``step``)."""
    a = _a(param)
    q, p = _integrate_arrays(a, x0.q.copy(), x0.p.copy(), t, step)
    return PhasePoint(q, p)


def _rotate_z(v: np.ndarray, angle) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    out = np.array(v, dtype=float, copy=True)
    out[..., 0] = c * v[..., 0] - s * v[..., 1]
    out[..., 1] = s * v[..., 0] + c * v[..., 1]
    return out


def _exact_arrays(a: float, q, p, t):
    r = _norm_p(p)
    t = np.asarray(t, dtype=float)
    if t.ndim:
        t = t[..., None]
    c, s = np.cos(t), np.sin(t)
    qg = c * q + s * p / r
    pg = c * p - s * r * q
    return _rotate_z(qg, a * t[..., 0] if t.ndim else a * t), _rotate_z(
        pg, a * t[..., 0] if t.ndim else a * t
    )


def exact_flow(param, x0: PhasePoint, t: float) -> PhasePoint:
    """Great-circle transport by arc ``t`` composed with rotation ``a*t`` about z.

    The two flows commute because the round metric is rotation invariant.
    """
    q, p = _exact_arrays(_a(param), x0.q, x0.p, t)
    return PhasePoint(q, p)


def max_oracle_deviation(
    param, points: list[PhasePoint], t: float = 10.0, step: float = DEFAULT_STEP
) -> float:
    """Sup over the step grid in ``[0, t]`` of ``|integrate - exact_flow|``.

    All points are integrated together as one batch.
    """
    a = _a(param)
    q0 = np.stack([x.q for x in points])
    p0 = np.stack([x.p for x in points])
    worst = 0.0
    for time, q, p in _steps(a, q0.copy(), p0.copy(), t, step):
        qe, pe = _exact_arrays(a, q0, p0, time)
        dev = np.sqrt(np.sum((q - qe) ** 2 + (p - pe) ** 2, axis=-1))
        worst = max(worst, float(dev.max()))
    return worst


# -- closed orbits -----------------------------------------------------------


@dataclass
class OrbitRecord:
    label: str
    period: float
    initial_point: PhasePoint
    direction: int
    monodromy_trace: float = float("nan")
    monodromy_det: float = float("nan")
    rotation_angle: float = float("nan")
    matrix: np.ndarray | None = field(default=None, repr=False)

    def as_row(self, param=None) -> dict:
        row = {
            "orbit": self.label,
            "period": self.period,
            "monodromy_trace": self.monodromy_trace,
            "monodromy_det": self.monodromy_det,
            "rotation_angle": self.rotation_angle,
        }
        if param is not None:
            a = _a(param)
            expected = 2 * math.pi / (1 + a * self.direction)
            row["period_expected"] = expected
            row["period_rel_error"] = abs(self.period - expected) / expected
            row["trace_expected"] = 2 * math.cos(expected)
            row["trace_error"] = abs(self.monodromy_trace - 2 * math.cos(expected))
        return row


def _equator_seed(a: float, direction: int) -> PhasePoint:
    x = PhasePoint.make([1.0, 0.0, 0.0], [0.0, float(direction), 0.0])
    return normalize_energy(a, x)


def _azimuth(q: np.ndarray) -> float:
    return math.atan2(q[1], q[0])


def _find_period(a: float, x0: PhasePoint, direction: int, step: float) -> float:
    """First return of the azimuth to its start, refined by a bracketed root solve."""
    unwrapped, prev_phi = 0.0, _azimuth(x0.q)
    prev_t, prev_q, prev_p = 0.0, x0.q.copy(), x0.p.copy()
    target = 2 * math.pi * direction
    horizon = 2 * (2 * math.pi / (1 - a)) + 1
    for t, q, p in _steps(a, x0.q.copy(), x0.p.copy(), horizon, step):
        phi = _azimuth(q)
        d = phi - prev_phi
        d -= 2 * math.pi * round(d / (2 * math.pi))
        new = unwrapped + d
        if (new - target) * direction >= 0:
            break
        unwrapped, prev_phi = new, phi
        prev_t, prev_q, prev_p = t, q, p
    else:
        raise NoConvergence("no return to the starting meridian within the horizon")

    def residual(tt: float) -> float:
        q, _ = _integrate_arrays(a, prev_q, prev_p, tt - prev_t, step)
        d = _azimuth(q) - _azimuth(prev_q)
        d -= 2 * math.pi * round(d / (2 * math.pi))
        return unwrapped + d - target

    try:
        period, info = brentq(
            residual, prev_t, t, xtol=1e-15, rtol=1e-13, maxiter=100, full_output=True
        )
    except (RuntimeError, ValueError) as exc:
        raise NoConvergence(f"period root solve failed: {exc}") from exc
    if not info.converged:
        raise NoConvergence("period root solve exceeded 100 iterations")
    return float(period)


def find_closed_orbits(
    param, *, step: float = DEFAULT_STEP, with_monodromy: bool = True
) -> list[OrbitRecord]:
    """Locate the two equatorial closed orbits and measure their periods.

    γ1 runs with the rotation, γ2 against it.  Energy is normalized to 1,
    so period equals action.
    """
    a = _a(param)
    out = []
    for label, direction in (("g1", 1), ("g2", -1)):
        x0 = _equator_seed(a, direction)
        rec = OrbitRecord(label, _find_period(a, x0, direction, step), x0, direction)
        if with_monodromy:
            m = monodromy(a, rec, step=step)
            rec.matrix = m
            rec.monodromy_trace = float(np.trace(m))
            rec.monodromy_det = float(np.linalg.det(m))
            rec.rotation_angle = rotation_angle(m)
        out.append(rec)
    return out


# -- linearized return map ----------------------------------------------------


def _slice_points(a: float, coords: np.ndarray, direction: int) -> tuple[np.ndarray, np.ndarray]:
    """Points of the slice ``{q_y = 0, q_x > 0, H = 1}`` from ``(q_z, p_z)``."""
    qz, pz = coords[:, 0], coords[:, 1]
    qx = np.sqrt(1 - qz**2)
    px = -pz * qz / qx
    # |p| + a*qx*py = 1 solved for py on the branch of the orbit direction
    A = 1 - (a * qx) ** 2
    B = 2 * a * qx
    C = px**2 + pz**2 - 1
    py = (-B + direction * np.sqrt(B**2 - 4 * A * C)) / (2 * A)
    q = np.stack([qx, np.zeros_like(qx), qz], axis=-1)
    p = np.stack([px, py, pz], axis=-1)
    return _project(q, p)


def _return_to_slice(a: float, q: np.ndarray, p: np.ndarray, step: float):
    """Newton-correct each point in time until its azimuth is zero."""
    for _ in range(8):
        phi = np.arctan2(q[:, 1], q[:, 0])
        if np.max(np.abs(phi)) < 1e-15:
            break
        dq, _ = _field(a, q, p)
        rate = (q[:, 0] * dq[:, 1] - q[:, 1] * dq[:, 0]) / (q[:, 0] ** 2 + q[:, 1] ** 2)
        tau = -phi / rate
        qs, ps = [], []
        for i in range(len(tau)):
            qi, pi_ = _integrate_arrays(a, q[i], p[i], float(tau[i]), step)
            qs.append(qi)
            ps.append(pi_)
        q, p = np.stack(qs), np.stack(ps)
    else:
        raise NoConvergence("return to the slice did not converge")
    return q, p


def _jacobian(a: float, period: float, direction: int, eps: float, step: float) -> np.ndarray:
    offsets = np.array([[eps, 0.0], [-eps, 0.0], [0.0, eps], [0.0, -eps]])
    q, p = _slice_points(a, offsets, direction)
    q, p = _integrate_arrays(a, q, p, period, step)
    q, p = _return_to_slice(a, q, p, step)
    image = np.stack([q[:, 2], p[:, 2]], axis=-1)
    return np.column_stack([(image[0] - image[1]) / (2 * eps), (image[2] - image[3]) / (2 * eps)])


def monodromy(param, orbit: OrbitRecord, perturbation: float = 1e-6, *, step: float = DEFAULT_STEP) -> np.ndarray:
    """Linearized first-return map on the slice ``q_y = 0`` in slice coordinates ``(q_z, p_z)``.

    Only trace and determinant are frame independent.  The trace is checked
    against a second evaluation at half the offset.
    """
    if not 1e-7 <= perturbation <= 1e-5:
        raise ValueError("perturbation must lie in [1e-7, 1e-5]")
    a = _a(param)
    phi0 = _azimuth(orbit.initial_point.q)
    if abs(phi0) > 1e-12 or abs(orbit.initial_point.q[2]) > 1e-12:
        raise ValueError("orbit must start on the equator at azimuth 0")
    m = _jacobian(a, orbit.period, orbit.direction, perturbation, step)
    half = _jacobian(a, orbit.period, orbit.direction, perturbation / 2, step)
    if abs(np.trace(m) - np.trace(half)) >= 1e-5:
        raise IllConditioned("trace moved by more than 1e-5 when halving the offset")
    if abs(np.linalg.det(m) - 1) > 1e-3:
        raise IllConditioned(f"return map determinant {np.linalg.det(m)} is not 1")
    return m


def rotation_angle(matrix: np.ndarray) -> float:
    """Angle in (0, 2*pi) of an elliptic return map in the slice frame.

    In ``(q_z, p_z)`` coordinates a positive rotation puts a positive entry
    in the upper-right corner.
    """
    tr = float(np.trace(matrix))
    base = math.acos(max(-1.0, min(1.0, tr / 2)))
    return base if matrix[0, 1] >= 0 else 2 * math.pi - base


def rotation_to_cz(theta, n: int, *, tol: float = 1e-9) -> int:
    """``2*floor(n*theta) + 1`` for a rotation number ``theta`` in revolutions.

    The trace fixes ``theta`` only modulo 1 and up to sign; callers supply
    the integer part from the known winding.
    """
    if n < 1:
        raise ValueError("n must be positive")
    x = n * (Fraction(theta) if isinstance(theta, (int, Fraction)) else float(theta))
    fl = math.floor(x)
    if isinstance(x, Fraction):
        if x == fl:
            raise AmbiguousFloor(f"n*theta = {x} is an integer", k=n, x=x)
    elif min(x - fl, fl + 1 - x) <= tol * max(1.0, abs(x)):
        raise AmbiguousFloor(f"n*theta = {x} is within {tol} of an integer", k=n, x=x)
    return 2 * fl + 1


def rotation_number(orbit: OrbitRecord, winding: int) -> float:
    """Revolutions per period: ``winding`` plus the measured fractional turn."""
    return winding + orbit.rotation_angle / (2 * math.pi)
