from ._ddelab import (
    alpha_constant,
    equilibria,
    k0_maximum,
    nondelay_exact_radius,
    seeded_drift,
    simulate,
    threshold_search,
    verify_theorem1,
)

__all__ = [
    "alpha_constant",
    "equilibria",
    "k0_maximum",
    "nondelay_exact_radius",
    "seeded_drift",
    "simulate",
    "threshold_search",
    "verify_theorem1",
]
