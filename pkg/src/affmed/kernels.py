"""Backend selection for the window-scan kernel.

The compiled extension is used when importable; set ``AFFMED_PURE_PYTHON=1``
to force the numpy implementation.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

from . import _fallback

_compiled = None
if os.environ.get("AFFMED_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"
_scan = _compiled.scan_windows if _compiled is not None else _fallback.scan_windows


class WindowScan(NamedTuple):
    lo: np.ndarray
    hi: np.ndarray
    ms_mu: np.ndarray
    ms_sigma: np.ndarray
    worst_ratio: np.ndarray
    lo_window: np.ndarray  # (K, 2) start, size
    hi_window: np.ndarray
    ms_window: np.ndarray
    wr_window: np.ndarray


def _wrap(out, iout) -> WindowScan:
    return WindowScan(
        out[:, 0], out[:, 1], out[:, 2], out[:, 3], out[:, 4],
        iout[:, 0:2], iout[:, 2:4], iout[:, 4:6], iout[:, 6:8],
    )


def scan_windows(ys_sorted, m: int, p=None, tol_eq: float = 0.0, backend: str | None = None) -> WindowScan:
    """Scan every contiguous window of sizes ``m..k`` of each sorted row.

    ``ys_sorted`` is ``(K, k)`` with rows sorted ascending; ``p`` optionally
    gives one query point per row. ``backend`` may force ``"numpy"`` or
    ``"cython"`` (benchmarks and cross-checks).
    """
    ys = np.atleast_2d(np.asarray(ys_sorted, dtype=np.float64))
    if backend is None:
        fn = _scan
    elif backend == "numpy":
        fn = _fallback.scan_windows
    elif backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel is not available")
        fn = _compiled.scan_windows
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return _wrap(*fn(ys, int(m), p, float(tol_eq)))
