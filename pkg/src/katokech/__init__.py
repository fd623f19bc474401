"""ECH spectrum of the Katok Finsler sphere, with supporting combinatorics
and a numerical check of the underlying geodesic flow."""

from .arithmetic import (
    Ordering,
    Param,
    Ratio,
    compare_actions,
    floor_certified,
    floor_sum_fast,
    floor_sum_fast_batch,
)
from .ech import (
    Orbit,
    OrbitSet,
    action,
    cz_katok,
    generator_of_degree,
    grading,
    homology_rank,
    q_tau,
    spectrum_via_grading,
)
from .spectrum import (
    SpectrumEntry,
    Weights,
    ellipsoid_spectrum,
    katok_spectrum,
    m2_stream,
    nab_stream,
)

__version__ = "0.1.0"

__all__ = [
    "Orbit",
    "OrbitSet",
    "Ordering",
    "Param",
    "Ratio",
    "SpectrumEntry",
    "Weights",
    "action",
    "compare_actions",
    "cz_katok",
    "ellipsoid_spectrum",
    "floor_certified",
    "floor_sum_fast",
    "floor_sum_fast_batch",
    "generator_of_degree",
    "grading",
    "homology_rank",
    "katok_spectrum",
    "m2_stream",
    "nab_stream",
    "q_tau",
    "spectrum_via_grading",
]
