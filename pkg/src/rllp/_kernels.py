"""Kernel backend selection.

Prefers the compiled extension (rllp._speedups) and falls back to the pure
Python twins (rllp._pykernels). Set RLLP_PURE_PYTHON=1 to force the fallback
(used by the parity tests and the backend benchmark).
"""

import os

if os.environ.get("RLLP_PURE_PYTHON") == "1":
    from ._pykernels import (  # noqa: F401
        BACKEND,
        STATUS_INFEASIBLE,
        STATUS_MAX_ITERATIONS,
        STATUS_OPTIMAL,
        qp_solve,
        rk4_step,
        wrap_angle,
    )
else:
    try:
        from ._speedups import (  # type: ignore[no-redef]  # noqa: F401
            BACKEND,
            STATUS_INFEASIBLE,
            STATUS_MAX_ITERATIONS,
            STATUS_OPTIMAL,
            qp_solve,
            rk4_step,
            wrap_angle,
        )
    except ImportError:
        from ._pykernels import (  # noqa: F401
            BACKEND,
            STATUS_INFEASIBLE,
            STATUS_MAX_ITERATIONS,
            STATUS_OPTIMAL,
            qp_solve,
            rk4_step,
            wrap_angle,
        )
