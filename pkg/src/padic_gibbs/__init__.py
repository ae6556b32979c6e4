"""p-adic Ising model with competing interactions on the binary Cayley tree.

Exact p-adic arithmetic, congruence-level existence tests, brute-force
finite-volume measures, and solvers for translation-invariant and
2-periodic boundary fields.
"""

__version__ = "0.1.0"

from .errors import PadicGibbsError
from .gibbs_model import BoundaryField, ModelParams, SpinConfig
from .padic_core import PadicNumber, from_rational, sqrt, sqrt_exists
from .solvers import classify, growth_profile, periodic_solutions, table1, ti_solutions

__all__ = [
    "__version__",
    "PadicGibbsError",
    "BoundaryField",
    "ModelParams",
    "SpinConfig",
    "PadicNumber",
    "from_rational",
    "sqrt",
    "sqrt_exists",
    "classify",
    "growth_profile",
    "periodic_solutions",
    "table1",
    "ti_solutions",
]
