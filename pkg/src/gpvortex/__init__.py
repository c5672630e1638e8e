"""Giant-vortex toolkit for fast-rotating Gross-Pitaevskii condensates.

Closed-form Thomas-Fermi quantities, 1-D giant-vortex profile minimization
with integer phase optimization, the vortex cost function and critical
angular velocity, a constrained 2-D GP minimizer on the unit disc, and
vortex diagnostics (windings, boundary degree, cells, vortex balls,
jacobian comparison).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
