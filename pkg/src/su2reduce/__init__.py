"""su2reduce: lattice verification workbench for a phase-ansatz SU(2) reduction.

The package checks, numerically and at pinned tolerances, the chain that
takes a four-component phase field on a periodic 4D lattice through its
unit-modulus gauge profile, field strength, currents and field equations,
and then through a contraction-mapping chart collapse down to a reduced
spin-half operator.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    ansatz_field,
    bundle,
    checks,
    config,
    contraction,
    lattice,
    report,
    su2_algebra,
)
