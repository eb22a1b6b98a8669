"""Pure-numpy gate kernels, used when the compiled extension is unavailable.

Both backends implement the same six functions with identical signatures and
semantics.  All of them mutate their output array in place and are written
so results do not depend on how callers chunk the work across threads:
every array element is written by exactly one (src, dst) pair or row, with
a fixed per-element operation order.

Internal chunking below bounds temporary-buffer memory, not parallelism;
the dispatch layer in fermsim.kernels owns threading.
"""

from __future__ import annotations

import numpy as np

# Rough cap on transient buffer size, in complex128 elements.
_CHUNK_ELEMS = 1 << 21


def apply_phase_outer(mat: np.ndarray, phase_a: np.ndarray, phase_b: np.ndarray) -> None:
    """mat[a, b] *= phase_a[a] * phase_b[b], in place."""
    step = max(1, _CHUNK_ELEMS // max(1, mat.shape[1]))
    for r0 in range(0, mat.shape[0], step):
        r1 = min(r0 + step, mat.shape[0])
        mat[r0:r1] *= phase_a[r0:r1, None] * phase_b[None, :]


def apply_diag_coulomb_phases(
    mat: np.ndarray,
    diag_a: np.ndarray,
    diag_b: np.ndarray,
    occ_a: np.ndarray,
    w_cross: np.ndarray,
    time: float,
) -> None:
    """Density-density phase multiply, in place.

    mat[a, b] *= exp(-0.5j * time * (diag_a[a] + diag_b[b] + 2 * cross[a, b]))
    with cross = occ_a @ w_cross; occ_a is the (rows, norb) 0/1 occupation
    block and w_cross the precomputed (norb, cols) interaction-weighted
    occupation matrix of the other spin.
    """
    step = max(1, _CHUNK_ELEMS // max(1, mat.shape[1]))
    for r0 in range(0, mat.shape[0], step):
        r1 = min(r0 + step, mat.shape[0])
        cross = occ_a[r0:r1].astype(np.float64) @ w_cross
        cross *= 2.0
        cross += diag_a[r0:r1, None]
        cross += diag_b[None, :]
        mat[r0:r1] *= np.exp((-0.5j * time) * cross)


def givens_rows(
    mat: np.ndarray,
    src: np.ndarray,
    dst: np.ndarray,
    signs: np.ndarray,
    c: float,
    s: complex,
) -> None:
    """Plane-rotate row pairs (src[i], dst[i]) of mat, in place.

    new mat[src] = c * mat[src] + (s * sign) * mat[dst]
    new mat[dst] = -conj(s * sign) * mat[src] + c * mat[dst]
    Row indices must be pairwise disjoint across i.
    """
    step = max(1, _CHUNK_ELEMS // max(1, mat.shape[1]))
    for i0 in range(0, len(src), step):
        sl = slice(i0, min(i0 + step, len(src)))
        coeff = (s * signs[sl]).astype(np.complex128)[:, None]
        x = mat[src[sl]]
        y = mat[dst[sl]]
        mat[src[sl]] = c * x + coeff * y
        mat[dst[sl]] = -np.conj(coeff) * x + c * y


def givens_cols(
    mat: np.ndarray,
    src: np.ndarray,
    dst: np.ndarray,
    signs: np.ndarray,
    c: float,
    s: complex,
) -> None:
    """Plane-rotate column pairs (src[i], dst[i]) of mat, in place."""
    if len(src) == 0:
        return
    coeff = (s * signs).astype(np.complex128)[None, :]
    step = max(1, _CHUNK_ELEMS // len(src))
    for r0 in range(0, mat.shape[0], step):
        rows = mat[r0 : min(r0 + step, mat.shape[0])]
        x = rows[:, src]
        y = rows[:, dst]
        rows[:, src] = c * x + coeff * y
        rows[:, dst] = -np.conj(coeff) * x + c * y


def one_body_rows(
    out: np.ndarray,
    mat: np.ndarray,
    targets: np.ndarray,
    coeffs: np.ndarray,
) -> None:
    """out[a, :] += sum_k coeffs[a, k] * mat[targets[a, k], :], in place.

    ``out`` and ``coeffs``/``targets`` are row-aligned; ``mat`` is the full
    source matrix (gathers may reach any row).  ``out`` must not alias
    ``mat``.
    """
    step = max(1, _CHUNK_ELEMS // max(1, mat.shape[1]))
    n_entries = targets.shape[1]
    for r0 in range(0, out.shape[0], step):
        r1 = min(r0 + step, out.shape[0])
        acc = out[r0:r1]
        for k in range(n_entries):
            acc += coeffs[r0:r1, k, None] * mat[targets[r0:r1, k]]


def one_body_cols(
    out: np.ndarray,
    mat: np.ndarray,
    targets: np.ndarray,
    coeffs: np.ndarray,
) -> None:
    """out[:, b] += sum_k coeffs[b, k] * mat[:, targets[b, k]], in place.

    ``out`` and ``mat`` are row-aligned chunks; ``targets``/``coeffs`` index
    columns.  ``out`` must not alias ``mat``.
    """
    step = max(1, _CHUNK_ELEMS // max(1, out.shape[1]))
    n_entries = targets.shape[1]
    for r0 in range(0, out.shape[0], step):
        r1 = min(r0 + step, out.shape[0])
        acc = out[r0:r1]
        block = mat[r0:r1]
        for k in range(n_entries):
            acc += coeffs[None, :, k] * block[:, targets[:, k]]
