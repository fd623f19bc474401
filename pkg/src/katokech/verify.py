"""Property suites behind ``katokech verify``.

Each suite returns a :class:`Report`; none of them raise on a failed check.
Certification errors (ambiguous floors or comparisons) do propagate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arithmetic import Param, Ratio, floor_certified
from .ech import spectrum_via_grading
from .flow import (
    PhasePoint,
    find_closed_orbits,
    max_oracle_deviation,
    normalize_energy,
)
from .lattice import (
    LatticeRegion,
    count_bruteforce,
    count_decomposed,
    count_t3_bruteforce,
    count_t3_transformed,
    f_a_closed_form,
    verify_bijection,
)
from .spectrum import katok_spectrum

__all__ = [
    "Report",
    "SUITES",
    "verify_bijection_suite",
    "verify_floor_identity",
    "verify_flow",
    "verify_lattice",
    "verify_spectrum_agreement",
]


@dataclass
class Report:
    suite: str
    passed: bool
    checked: int
    first_failure: object = None
    details: dict = field(default_factory=dict)
    status: str = ""

    def __post_init__(self):
        if not self.status:
            self.status = "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "status": self.status,
            "passed": self.passed,
            "checked": self.checked,
            "first_failure": self.first_failure,
            "details": self.details,
        }


def verify_lattice(param: Param, n_max: int = 40) -> Report:
    """Brute force = decomposition = f_a + 1 on every region with n <= n_max."""
    checked, failure = 0, None
    for n in range(n_max + 1):
        for m in range(2 * n + 1):
            region = LatticeRegion(n, m, param)
            counts = (
                count_bruteforce(region),
                count_decomposed(region),
                f_a_closed_form(n, m, param) + 1,
            )
            t3 = (count_t3_bruteforce(region), count_t3_transformed(region))
            checked += 1
            if failure is None and (len(set(counts)) != 1 or t3[0] != t3[1]):
                failure = {"n": n, "m": m, "counts": list(counts), "t3": list(t3)}
    return Report("lattice", failure is None, checked, failure, {"a": param.label, "n_max": n_max})


def verify_bijection_suite(param: Param, n_max: int = 30) -> Report:
    report = verify_bijection(param, n_max)
    status = "pass" if report.injective else (
        "expected-degenerate" if report.expected_degenerate else "fail"
    )
    first = None
    if report.violations:
        v, pts = report.violations[0]
        first = {"value": v, "points": [list(p) for p in pts]}
    details = {"a": param.label, "n_max": n_max, **report.as_dict()}
    details["violations"] = details["violations"][:20]
    return Report("bijection", report.injective, report.checked, first, details, status)


def verify_spectrum_agreement(param: Param, count: int = 500) -> Report:
    """Sorted-sum spectrum and grading ladder agree as weight sequences."""
    left = katok_spectrum(param, count, with_grading=False)
    right = spectrum_via_grading(param, count)
    failure = None
    for e1, e2 in zip(left, right):
        if e1.weights != e2.weights:
            failure = {"k": e1.k, "sorted": list(e1.weights), "grading": list(e2.weights)}
            break
    return Report("spectrum-agreement", failure is None, count, failure, {"a": param.label})


def verify_floor_identity(param: Param, k_max: int = 10_000) -> Report:
    """``⌊k/(1+a)⌋ = k - ⌊ka/(1+a)⌋ - 1`` and ``⌊k/(1-a)⌋ = k + ⌊ka/(1-a)⌋``.

    The first identity needs ``k*a/(1+a)`` to be a non-integer; exact integer
    cases (rational mode only) are skipped and counted.
    """
    checked = skipped = 0
    failure = None
    for k in range(1, k_max + 1):
        inner = floor_certified(k, Ratio.A_PLUS, param)
        if inner.margin == 0:
            skipped += 1
        else:
            lhs = floor_certified(k, Ratio.INV_PLUS, param).value
            checked += 1
            if lhs != k - inner.value - 1 and failure is None:
                failure = {"k": k, "identity": "1/(1+a)"}
        lhs = floor_certified(k, Ratio.INV_MINUS, param).value
        rhs = k + floor_certified(k, Ratio.A_MINUS, param).value
        checked += 1
        if lhs != rhs and failure is None:
            failure = {"k": k, "identity": "1/(1-a)"}
    return Report(
        "floor-identity", failure is None, checked, failure,
        {"a": param.label, "k_max": k_max, "skipped_integer_cases": skipped},
    )


def random_points(param, seeds: int, rng_seed: int = 0) -> list[PhasePoint]:
    """Random phase points on the energy level H_a = 1."""
    rng = np.random.default_rng(rng_seed)
    return [
        normalize_energy(param, PhasePoint.make(rng.normal(size=3), rng.normal(size=3)))
        for _ in range(seeds)
    ]


def verify_flow(
    param, *, seeds: int = 100, t: float = 10.0, step: float = 1e-3, rng_seed: int = 0
) -> Report:
    """Periods, traces and determinants of both orbits; integrator vs oracle."""
    a = float(param)
    rows, failure = [], None
    for rec in find_closed_orbits(param, step=step):
        row = rec.as_row(param)
        rows.append(row)
        checks = {
            "period": row["period_rel_error"] <= 1e-6,
            "trace": row["trace_error"] <= 1e-4,
            "det": abs(rec.monodromy_det - 1) <= 1e-6,
        }
        bad = [name for name, ok in checks.items() if not ok]
        if bad and failure is None:
            failure = {"orbit": rec.label, "failed": bad}
    deviation = max_oracle_deviation(param, random_points(param, seeds, rng_seed), t, step)
    if deviation > 1e-8 and failure is None:
        failure = {"oracle_deviation": deviation}
    return Report(
        "flow", failure is None, 2 + seeds, failure,
        {"a": a, "orbits": rows, "oracle_deviation": deviation, "t": t, "step": step},
    )


SUITES = {
    "lattice": verify_lattice,
    "bijection": verify_bijection_suite,
    "spectrum-agreement": verify_spectrum_agreement,
    "floor-identity": verify_floor_identity,
    "flow": verify_flow,
}
