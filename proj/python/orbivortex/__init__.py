"""Abelian vortex equations on compact orbifold surfaces.

Spectral solver for the vortex equations of a weighted circle action over a
flat torus or a football orbifold S^2(m, m), with zero location, threshold
scans, adiabatic families, and exact Seifert-invariant arithmetic for the
associated circle bundles. The compiled extension does all the work; this
package only locates it (installed inside the package, or on sys.path next
to a development build).
"""

try:
    from ._orbivortex import *  # noqa: F401,F403
    from ._orbivortex import __doc__ as _core_doc  # noqa: F401
    from ._orbivortex import __version__
except ImportError:  # development layout: extension on sys.path, not in-package
    from _orbivortex import *  # noqa: F401,F403
    from _orbivortex import __version__

__all__ = [
    "Surface",
    "feasibility",
    "solve",
    "roundtrip",
    "scan",
    "probe",
    "adiabatic",
    "canonical_points",
    "random_points",
    "random_energy_split",
    "random_gauge_drift",
    "seifert_degree",
    "associated_bundle",
    "moduli_status",
    "lifting_cokernel",
    "__version__",
]
