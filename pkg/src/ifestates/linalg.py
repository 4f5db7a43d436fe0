"""Dense complex linear algebra for kernel-intersection subspace work.

Everything operates on plain numpy arrays.  Operators are square complex
matrices; a subspace is represented by a matrix whose orthonormal columns
span it (a ``(dim, 0)`` array is the empty subspace).  All routines are
pure functions and never mutate their inputs, so they are safe to call
concurrently.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DEFAULT_REL_TOL",
    "HERMITIAN_RTOL",
    "as_operator",
    "hermiticity_defect",
    "require_hermitian",
    "spectral_norm",
    "kron",
    "commutator",
    "hermitian_eig",
    "null_space",
    "intersect_kernels",
    "orthonormal_columns",
    "cross_gram_singular_values",
    "subspace_equal",
    "max_principal_angle",
    "propagator",
]

# Relative singular-value cutoff used by every kernel computation.
DEFAULT_REL_TOL = 1e-10
# Hermiticity check: max|A - A^H| <= HERMITIAN_RTOL * max(1, ||A||_F).
HERMITIAN_RTOL = 1e-12


def as_operator(a) -> np.ndarray:
    """Coerce ``a`` to a square complex matrix."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(a) -> float:
    """Entrywise deviation from A = A^H, relative to max(1, ||A||_F)."""
    a = as_operator(a)
    if a.size == 0:
        return 0.0
    return float(np.abs(a - a.conj().T).max() / max(1.0, np.linalg.norm(a)))


def require_hermitian(a, rel_tol: float = HERMITIAN_RTOL, name: str = "operator") -> np.ndarray:
    """Return ``a`` as a complex matrix, raising if it is not Hermitian."""
    a = as_operator(a)
    defect = hermiticity_defect(a)
    if defect > rel_tol:
        raise ValueError(
            f"{name} is not Hermitian: relative defect {defect:.3e} exceeds {rel_tol:.1e}"
        )
    return a


def spectral_norm(a) -> float:
    """Largest singular value; 0 for empty matrices."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def kron(a, b) -> np.ndarray:
    """Kronecker product with a-index major, b-index minor ordering."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def commutator(a, b) -> np.ndarray:
    """ab - ba for equal-dimension square matrices."""
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch in commutator: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def hermitian_eig(a, rel_tol: float = HERMITIAN_RTOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as orthonormal columns, so that ``a @ v[:, k] ==
    w[k] * v[:, k]`` up to roundoff.
    """
    a = require_hermitian(a, rel_tol)
    w, v = np.linalg.eigh(a)
    return w, v


def null_space(a, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of ``a``.

    A right singular vector belongs to the kernel when its singular value
    is at or below ``rel_tol * sigma_max``.  A zero matrix (sigma_max = 0)
    has the full space as its kernel.  ``a`` may be rectangular.
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    m, n = a.shape
    if m == 0 or n == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(n, dtype=complex)
    rank = int(np.sum(s > rel_tol * smax))
    return vh[rank:].conj().T


def intersect_kernels(ops, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Orthonormal basis of the common kernel of all operators in ``ops``.

    The operators are stacked vertically, each block scaled by
    ``1 / max(1, sigma_max(op))`` so that no single operator dominates the
    cutoff, and the kernel of the stack is returned.
    """
    ops = [as_operator(op) for op in ops]
    if not ops:
        raise ValueError("intersect_kernels needs at least one operator")
    dim = ops[0].shape[0]
    for op in ops[1:]:
        if op.shape[0] != dim:
            raise ValueError(
                f"dimension mismatch in intersect_kernels: {op.shape[0]} vs {dim}"
            )
    blocks = [op / max(1.0, spectral_norm(op)) for op in ops]
    return null_space(np.vstack(blocks), rel_tol)


def orthonormal_columns(m) -> np.ndarray:
    """Orthonormal basis for the column span of ``m`` via thin QR.

    Phases are fixed so the R factor has a real positive diagonal, which
    makes the result deterministic for full-column-rank input.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape[1] == 0:
        return m.copy()
    q, r = np.linalg.qr(m)
    d = np.diagonal(r).copy()
    d = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q * d.conj()


def _check_same_ambient(b1, b2):
    b1 = np.asarray(b1, dtype=complex)
    b2 = np.asarray(b2, dtype=complex)
    if b1.ndim != 2 or b2.ndim != 2:
        raise ValueError("subspace bases must be 2-d arrays of column vectors")
    if b1.shape[0] != b2.shape[0]:
        raise ValueError(
            f"ambient dimension mismatch: {b1.shape[0]} vs {b2.shape[0]}"
        )
    return b1, b2


def cross_gram_singular_values(b1, b2) -> np.ndarray:
    """Singular values of B1^H B2 (cosines of the principal angles)."""
    b1, b2 = _check_same_ambient(b1, b2)
    if b1.shape[1] == 0 or b2.shape[1] == 0:
        return np.zeros(0)
    return np.linalg.svd(b1.conj().T @ b2, compute_uv=False)


def subspace_equal(b1, b2, tol: float = 1e-8) -> bool:
    """True iff the two orthonormal bases span the same subspace.

    Requires equal dimension and every singular value of the cross-Gram
    matrix within ``tol`` of 1.
    """
    b1, b2 = _check_same_ambient(b1, b2)
    if b1.shape[1] != b2.shape[1]:
        return False
    if b1.shape[1] == 0:
        return True
    s = cross_gram_singular_values(b1, b2)
    return bool(np.all(np.abs(1.0 - s) <= tol))


def max_principal_angle(b1, b2) -> float:
    """Largest principal angle between the spans of two orthonormal bases.

    Computed from the sine-based residual sigma_max((I - P1) B2), which
    stays accurate for tiny angles where the cosine formula saturates.
    Both empty: 0.  One empty: pi/2.  For unequal dimensions this is the
    largest angle by which one span leaves the other, symmetrized.
    """
    b1, b2 = _check_same_ambient(b1, b2)
    if b1.shape[1] == 0 and b2.shape[1] == 0:
        return 0.0
    if b1.shape[1] == 0 or b2.shape[1] == 0:
        return float(np.pi / 2)

    def one_way(p, q):
        resid = q - p @ (p.conj().T @ q)
        return spectral_norm(resid)

    s = max(one_way(b1, b2), one_way(b2, b1))
    return float(np.arcsin(min(1.0, s)))


def propagator(h, t: float) -> np.ndarray:
    """Unitary exp(-i h t) of a Hermitian generator, via eigendecomposition."""
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * w * float(t))) @ v.conj().T
