"""Dense complex matrices and the two scalar matrix norms everything reduces to.

Matrices are plain 2-D complex ``numpy`` arrays, validated by :func:`as_matrix`.
The operator norm (largest singular value) realises the minimal matrix-norm on
scalars, the trace norm (sum of singular values) the maximal one.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import InputError

__all__ = [
    "as_matrix",
    "operator_norm",
    "trace_norm",
    "operator_norms",
    "trace_norms",
    "injection_matrix",
]


def as_matrix(values) -> np.ndarray:
    """Coerce to a complex m x n matrix with m, n >= 1 and finite entries."""
    M = np.asarray(values, dtype=complex)
    if M.ndim != 2:
        raise InputError(f"expected a 2-D matrix, got ndim={M.ndim}")
    m, n = M.shape
    if m < 1 or n < 1:
        raise InputError(f"degenerate matrix shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise InputError("matrix entries must be finite")
    return M


def operator_norm(M) -> float:
    """Largest singular value of ``M``."""
    M = as_matrix(M)
    return float(np.linalg.svd(M, compute_uv=False)[0])


def trace_norm(M) -> float:
    """Sum of singular values of ``M``."""
    M = as_matrix(M)
    return float(np.linalg.svd(M, compute_uv=False).sum())


def _batched_singular_values(stack: np.ndarray) -> np.ndarray:
    if stack.ndim != 3:
        raise InputError(f"expected a (N, m, n) stack, got ndim={stack.ndim}")
    return np.linalg.svd(stack, compute_uv=False)


def operator_norms(stack) -> np.ndarray:
    """Operator norm of each matrix in a (N, m, n) stack."""
    s = _batched_singular_values(np.asarray(stack, dtype=complex))
    return s[:, 0] if s.shape[1] else np.zeros(s.shape[0])


def trace_norms(stack) -> np.ndarray:
    """Trace norm of each matrix in a (N, m, n) stack."""
    s = _batched_singular_values(np.asarray(stack, dtype=complex))
    return s.sum(axis=1)


def injection_matrix(images: Sequence[int], m: int) -> np.ndarray:
    """Isometry mapping basis vector ``a`` to basis vector ``images[a]`` of C^m.

    ``images`` lists 0-based, pairwise distinct targets in ``range(m)``; the
    result is the m x j matrix with orthonormal columns ``e_{images[a]}``.
    """
    images = tuple(int(i) for i in images)
    j = len(images)
    if j < 1 or m < 1:
        raise InputError("injection needs a nonempty domain and target")
    if len(set(images)) != j:
        raise InputError(f"images not pairwise distinct: {images}")
    if min(images) < 0 or max(images) >= m:
        raise InputError(f"images {images} out of range for target size {m}")
    U = np.zeros((m, j), dtype=complex)
    U[images, range(j)] = 1.0
    return U
