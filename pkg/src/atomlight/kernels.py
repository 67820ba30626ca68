"""Backend selection for the integrator hot loop.

The compiled Cython kernel is preferred; the pure-Python kernel is used
when the extension is unavailable or when ATOMLIGHT_PURE_PYTHON is set to
a non-empty value other than "0".  Both backends are bit-identical (see
benchmarks/bench_kernels.py for the speed comparison).
"""

import os

from atomlight import _kernels_py

BACKEND = "pure-python"
rk4_three_wave = _kernels_py.rk4_three_wave

if os.environ.get("ATOMLIGHT_PURE_PYTHON", "0") in ("", "0"):
    try:
        from atomlight._kernels import rk4_three_wave  # noqa: F811

        BACKEND = "compiled"
    except ImportError:
        pass
