"""Exact analysis of trilinear birational maps (P1)^3 -> P3.

Subpackages:

* :mod:`tricong.exact`      — rationals, quadratic extensions, projective vectors
* :mod:`tricong.mpoly`      — multihomogeneous polynomials and binary forms
* :mod:`tricong.pluecker`   — lines in P3, the Klein quadric, pencils
* :mod:`tricong.maps`       — trilinear maps, syzygies, inverses, fibers
* :mod:`tricong.congruence` — the three parametric line congruences
* :mod:`tricong.classify`   — real classification of the congruences
* :mod:`tricong.cli`        — command-line interface
"""

__version__ = "1.0.0"

from .maps import TrilinearMap, detect_type, extract_inverse  # noqa: E402
from .classify import Report, analyze  # noqa: E402

__all__ = [
    "__version__",
    "TrilinearMap",
    "detect_type",
    "extract_inverse",
    "Report",
    "analyze",
]
