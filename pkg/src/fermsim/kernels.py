"""Kernel dispatch: backend selection at import time and thread splitting.

The compiled extension is preferred when built; FERMSIM_BACKEND=python
forces the numpy fallback, FERMSIM_BACKEND=compiled makes a missing
extension an import error instead of a silent fallback.

Threading splits work into disjoint row or pair chunks, one backend call
per chunk.  Because each amplitude is written by exactly one chunk and the
per-element operation order inside a backend is fixed, results are bitwise
independent of the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import config
from ._kernels import fallback as _fallback

try:
    from ._kernels import core as _core
except ImportError:
    _core = None

_requested = config.requested_backend()
if _requested == "compiled" and _core is None:
    raise ImportError(
        "FERMSIM_BACKEND=compiled but the fermsim._kernels.core extension "
        "is not built; install with the build step or unset the variable"
    )
_impl = _core if (_core is not None and _requested != "python") else _fallback

BACKEND = "compiled" if _impl is _core else "python"


def backend_name() -> str:
    """Active kernel backend: "compiled" or "python"."""
    return BACKEND


def _chunks(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    step = -(-n // parts)
    return [(i, min(i + step, n)) for i in range(0, n, step)]


def _parallel(work: list) -> None:
    """Run zero-argument callables, possibly on a thread pool."""
    if len(work) <= 1:
        for job in work:
            job()
        return
    with ThreadPoolExecutor(max_workers=len(work)) as pool:
        for future in [pool.submit(job) for job in work]:
            future.result()


def apply_phase_outer(mat: np.ndarray, phase_a: np.ndarray, phase_b: np.ndarray) -> None:
    phase_a = np.ascontiguousarray(phase_a, dtype=np.complex128)
    phase_b = np.ascontiguousarray(phase_b, dtype=np.complex128)
    spans = _chunks(mat.shape[0], config.get_num_threads())
    _parallel(
        [
            lambda r0=r0, r1=r1: _impl.apply_phase_outer(
                mat[r0:r1], phase_a[r0:r1], phase_b
            )
            for r0, r1 in spans
        ]
    )


def apply_diag_coulomb_phases(
    mat: np.ndarray,
    diag_a: np.ndarray,
    diag_b: np.ndarray,
    occ_a: np.ndarray,
    w_cross: np.ndarray,
    time: float,
) -> None:
    diag_a = np.ascontiguousarray(diag_a, dtype=np.float64)
    diag_b = np.ascontiguousarray(diag_b, dtype=np.float64)
    occ_a = np.ascontiguousarray(occ_a, dtype=np.uint8)
    w_cross = np.ascontiguousarray(w_cross, dtype=np.float64)
    spans = _chunks(mat.shape[0], config.get_num_threads())
    _parallel(
        [
            lambda r0=r0, r1=r1: _impl.apply_diag_coulomb_phases(
                mat[r0:r1], diag_a[r0:r1], diag_b, occ_a[r0:r1], w_cross, float(time)
            )
            for r0, r1 in spans
        ]
    )


def givens_rows(
    mat: np.ndarray,
    src: np.ndarray,
    dst: np.ndarray,
    signs: np.ndarray,
    c: float,
    s: complex,
) -> None:
    if len(src) == 0:
        return
    spans = _chunks(len(src), config.get_num_threads())
    _parallel(
        [
            lambda i0=i0, i1=i1: _impl.givens_rows(
                mat, src[i0:i1], dst[i0:i1], signs[i0:i1], float(c), complex(s)
            )
            for i0, i1 in spans
        ]
    )


def givens_cols(
    mat: np.ndarray,
    src: np.ndarray,
    dst: np.ndarray,
    signs: np.ndarray,
    c: float,
    s: complex,
) -> None:
    if len(src) == 0:
        return
    spans = _chunks(mat.shape[0], config.get_num_threads())
    _parallel(
        [
            lambda r0=r0, r1=r1: _impl.givens_cols(
                mat[r0:r1], src, dst, signs, float(c), complex(s)
            )
            for r0, r1 in spans
        ]
    )


def one_body_rows(
    out: np.ndarray,
    mat: np.ndarray,
    targets: np.ndarray,
    coeffs: np.ndarray,
) -> None:
    spans = _chunks(out.shape[0], config.get_num_threads())
    _parallel(
        [
            lambda r0=r0, r1=r1: _impl.one_body_rows(
                out[r0:r1], mat, targets[r0:r1], coeffs[r0:r1]
            )
            for r0, r1 in spans
        ]
    )


def one_body_cols(
    out: np.ndarray,
    mat: np.ndarray,
    targets: np.ndarray,
    coeffs: np.ndarray,
) -> None:
    spans = _chunks(out.shape[0], config.get_num_threads())
    _parallel(
        [
            lambda r0=r0, r1=r1: _impl.one_body_cols(
                out[r0:r1], mat[r0:r1], targets, coeffs
            )
            for r0, r1 in spans
        ]
    )
