"""Dense real linear algebra kernel.

Symmetric eigendecomposition, singular value decomposition, PSD testing,
and the canonical reshape between state vectors and coefficient matrices.
Everything here is deterministic: a fixed sign convention and a fixed
tie-breaking rule make repeated calls on identical input bit-identical.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "SymEigen",
    "Svd",
    "sym_eigen",
    "svd",
    "is_psd",
    "reshape_vector_to_matrix",
    "flatten_matrix_to_vector",
]

# Below this, a coordinate does not count as the "first nonzero" of a vector.
_SIGN_EPS = 1e-12
# Eigen/singular values closer than this are treated as tied and reordered
# by the sign-fixed vectors (lexicographically greatest first).
_TIE_TOL = 1e-9

RECONSTRUCTION_TOL = 1e-10


class SymEigen(NamedTuple):
    """Spectral decomposition of a symmetric matrix.

    eigenvalues are descending; eigenvectors are the matching orthonormal
    columns, each signed so its first nonzero coordinate is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class Svd(NamedTuple):
    """Trimmed singular value decomposition m = u @ diag(s) @ v.T.

    Only min(rows, cols) singular triples are kept. u holds left singular
    vectors as columns, v right singular vectors as columns.
    """

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def _require_symmetric(a: np.ndarray, tol: float = 1e-12) -> None:
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > tol:
        raise ValueError(f"matrix is not symmetric within {tol}")


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's first nonzero coordinate is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.nonzero(np.abs(col) > _SIGN_EPS)[0]
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def _tie_order(values: np.ndarray, key_vectors: np.ndarray) -> list[int]:
    """Order for descending values; ties sorted by vector coordinates, greatest first.

    Values whose adjacent gap is below _TIE_TOL form one tie group.
    """
    order = list(range(len(values)))
    start = 0
    for end in range(1, len(values) + 1):
        if end == len(values) or values[end - 1] - values[end] > _TIE_TOL:
            if end - start > 1:
                order[start:end] = sorted(
                    order[start:end],
                    key=lambda j: tuple(key_vectors[:, j]),
                    reverse=True,
                )
            start = end
    return order


def sym_eigen(m) -> SymEigen:
    """Eigendecomposition of a symmetric matrix with the canonical ordering.

    Raises ValueError for non-square or asymmetric (beyond 1e-12) input.
    Satisfies E @ diag(w) @ E.T == m within 1e-10.
    """
    a = _as_matrix(m)
    _require_symmetric(a)
    w, v = np.linalg.eigh(a)
    w, v = w[::-1], v[:, ::-1]  # eigh is ascending
    v = _fix_signs(v)
    order = _tie_order(w, v)
    return SymEigen(w[order], np.ascontiguousarray(v[:, order]))


def svd(m) -> Svd:
    """Trimmed SVD keeping min(rows, cols) triples, descending.

    Sign convention: each right singular vector's first nonzero coordinate
    is positive; the paired left vector is flipped with it so the
    reconstruction u @ diag(s) @ v.T is unchanged.
    """
    a = _as_matrix(m)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    v = vt.T
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.nonzero(np.abs(col) > _SIGN_EPS)[0]
        if nz.size and col[nz[0]] < 0:
            v[:, j] = -col
            u[:, j] = -u[:, j]
    order = _tie_order(s, v)
    return Svd(
        np.ascontiguousarray(u[:, order]),
        s[order],
        np.ascontiguousarray(v[:, order]),
    )


def is_psd(m, tol: float) -> bool:
    """True iff the smallest eigenvalue of the symmetric matrix m is >= -tol."""
    a = _as_matrix(m)
    _require_symmetric(a)
    if a.size == 0:
        return True
    return bool(np.linalg.eigvalsh(a)[0] >= -tol)


def reshape_vector_to_matrix(v, rows: int, cols: int, layout: str = "suffix-major") -> np.ndarray:
    """Rearrange a coefficient vector into a rows x cols matrix.

    In the suffix-major layout the vector lists coefficients with the
    suffix (row) index varying slower, so entry (a, i) of the result is
    the coefficient of the pair (prefix i, suffix a).
    """
    if layout != "suffix-major":
        raise ValueError(f"unknown layout {layout!r}")
    vec = np.asarray(v, dtype=float)
    if vec.ndim != 1:
        raise ValueError("expected a 1-d vector")
    if vec.size != rows * cols:
        raise ValueError(f"vector of length {vec.size} cannot fill {rows}x{cols}")
    return vec.reshape(rows, cols)


def flatten_matrix_to_vector(m, layout: str = "suffix-major") -> np.ndarray:
    """Inverse of reshape_vector_to_matrix; round-trips exactly."""
    if layout != "suffix-major":
        raise ValueError(f"unknown layout {layout!r}")
    return _as_matrix(m).reshape(-1)
