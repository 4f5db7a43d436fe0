"""Interaction-free evolving (IFE) pure states of a bipartite system.

A state is IFE when its evolution under the full Hamiltonian
``H = H_A + H_B + H_I`` coincides, up to a global phase ``exp(-i alpha t)``,
with the free evolution under ``H_0 = H_A + H_B``.  The IFE states form
mutually orthogonal sectors, one per interaction eigenvalue ``alpha``:

    N_alpha = Ker(H_I - alpha I)  intersect  Ker [H_0, H_I]

:func:`ife_sectors` computes the sectors from that kernel intersection;
:func:`ife_sectors_oracle` recomputes them from the independent
power-chain characterization ``N_alpha = cap_n Ker((H_I - alpha I) H_0^n)``
so the two routes can be cross-checked against each other.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_REL_TOL,
    HERMITIAN_RTOL,
    commutator,
    hermitian_eig,
    intersect_kernels,
    kron,
    null_space,
    require_hermitian,
    spectral_norm,
)

__all__ = [
    "CLUSTER_TOL",
    "BipartiteSystem",
    "IfeSector",
    "IfeDecomposition",
    "build_h0",
    "build_total",
    "cluster_values",
    "ife_sectors",
    "ife_sectors_oracle",
    "ife_exists",
    "classify_pure",
]

# Eigenvalues closer than CLUSTER_TOL * max(1, sigma_max) are treated as one
# degenerate value; roundoff-split degeneracies must land in a single sector.
CLUSTER_TOL = 1e-8

# An operator whose norm is below NUMERICAL_ZERO_RTOL relative to its natural
# scale is treated as exactly zero.  A commutator of commuting matrices built
# by conjugation comes out at roundoff level, not exactly zero, and a cutoff
# relative to its own sigma_max would then see a full-rank matrix.
NUMERICAL_ZERO_RTOL = 1e-12


def _is_numerically_zero(op, scale: float) -> bool:
    return spectral_norm(op) <= NUMERICAL_ZERO_RTOL * max(1.0, scale)


@dataclass(frozen=True)
class BipartiteSystem:
    """Two finite subsystems with free parts ``h_a``, ``h_b`` and coupling ``h_i``.

    ``h_a`` acts on the first factor (dimension ``dim_a``), ``h_b`` on the
    second (``dim_b``), and ``h_i`` on the full ``dim_a * dim_b`` product
    space.  All three must be Hermitian within ``hermitian_rtol``.
    """

    dim_a: int
    dim_b: int
    h_a: np.ndarray
    h_b: np.ndarray
    h_i: np.ndarray
    hermitian_rtol: InitVar[float] = HERMITIAN_RTOL

    def __post_init__(self, hermitian_rtol):
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValueError("subsystem dimensions must be positive")
        for name, op, dim in (
            ("h_a", self.h_a, self.dim_a),
            ("h_b", self.h_b, self.dim_b),
            ("h_i", self.h_i, self.dim_a * self.dim_b),
        ):
            op = require_hermitian(op, hermitian_rtol, name=name)
            if op.shape[0] != dim:
                raise ValueError(
                    f"{name} has dimension {op.shape[0]}, expected {dim}"
                )
            object.__setattr__(self, name, op)

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b


def build_h0(sys: BipartiteSystem) -> np.ndarray:
    """Free Hamiltonian h_a (x) I + I (x) h_b on the product space."""
    return kron(sys.h_a, np.eye(sys.dim_b)) + kron(np.eye(sys.dim_a), sys.h_b)


def build_total(sys: BipartiteSystem) -> np.ndarray:
    """Full Hamiltonian: free part plus coupling."""
    return build_h0(sys) + sys.h_i


@dataclass(frozen=True)
class IfeSector:
    """One IFE sector: interaction eigenvalue and an orthonormal basis."""

    alpha: float
    basis: np.ndarray

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class IfeDecomposition:
    """All IFE sectors of a system plus the commutator kernel Ker[H_0, H_I].

    ``sectors`` is sorted by strictly increasing ``alpha``; an empty tuple
    means the system admits no IFE states.
    """

    sectors: tuple[IfeSector, ...]
    commutator_kernel: np.ndarray = field(repr=False)

    @property
    def n_sectors(self) -> int:
        return len(self.sectors)

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(s.alpha for s in self.sectors)

    def total_basis(self) -> np.ndarray:
        """Concatenated sector bases, spanning the whole IFE subspace."""
        dim = self.commutator_kernel.shape[0]
        if not self.sectors:
            return np.zeros((dim, 0), dtype=complex)
        return np.hstack([s.basis for s in self.sectors])


def cluster_values(values, tol: float) -> list[float]:
    """Single-linkage clustering of a 1-d real array; returns cluster means.

    Values whose sorted gaps are at most ``tol`` merge into one cluster, so
    a degenerate eigenvalue split by roundoff yields a single candidate.
    """
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        return []
    out = []
    start = 0
    for i in range(1, values.size):
        if values[i] - values[i - 1] > tol:
            out.append(float(values[start:i].mean()) + 0.0)
            start = i
    out.append(float(values[start:].mean()) + 0.0)
    return out


def _interaction_clusters(sys: BipartiteSystem):
    w = np.linalg.eigvalsh(sys.h_i)
    smax = float(np.abs(w).max()) if w.size else 0.0
    return cluster_values(w, CLUSTER_TOL * max(1.0, smax))


def _commutator_and_kernel(sys: BipartiteSystem, rel_tol: float):
    """Commutator [H_0, H_I], its numerical-zero flag, and its kernel."""
    h0 = build_h0(sys)
    comm = commutator(h0, sys.h_i)
    comm_scale = 2.0 * spectral_norm(h0) * spectral_norm(sys.h_i)
    is_zero = _is_numerically_zero(comm, comm_scale)
    kernel = np.eye(sys.dim, dtype=complex) if is_zero else null_space(comm, rel_tol)
    return comm, is_zero, kernel


def ife_sectors(sys: BipartiteSystem, rel_tol: float = DEFAULT_REL_TOL) -> IfeDecomposition:
    """IFE sectors via the kernel-intersection characterization.

    For each clustered eigenvalue ``alpha`` of the coupling, the sector is
    the common kernel of ``h_i - alpha I`` and the commutator
    ``[H_0, H_I]``; empty intersections are dropped.  Constraint operators
    that are numerically zero impose no constraint.
    """
    dim = sys.dim
    comm, comm_is_zero, kernel = _commutator_and_kernel(sys, rel_tol)
    hi_norm = spectral_norm(sys.h_i)
    eye = np.eye(dim)
    sectors = []
    for alpha in _interaction_clusters(sys):
        shifted = sys.h_i - alpha * eye
        ops = []
        if not _is_numerically_zero(shifted, max(hi_norm, abs(alpha))):
            ops.append(shifted)
        if not comm_is_zero:
            ops.append(comm)
        basis = intersect_kernels(ops, rel_tol) if ops else eye.astype(complex)
        if basis.shape[1] > 0:
            sectors.append(IfeSector(alpha, basis))
    return IfeDecomposition(tuple(sectors), kernel)


def ife_sectors_oracle(sys: BipartiteSystem, rel_tol: float = DEFAULT_REL_TOL) -> IfeDecomposition:
    """IFE sectors via the power-chain characterization, commutator-free.

    The defining intersection ``cap_n Ker((H_I - alpha I) H_0^n)`` is
    evaluated by replacing the powers of ``H_0`` with its distinct
    eigenprojectors: with ``H_0 = sum_k mu_k P_k`` the chain generated by
    ``(H_I - alpha I) H_0^n`` spans exactly the blocks
    ``(H_I - alpha I) P_k`` (the Vandermonde matrix of the distinct
    ``mu_k`` is invertible), which avoids forming ill-scaled matrix powers.
    """
    dim = sys.dim
    h0 = build_h0(sys)
    w0, v0 = hermitian_eig(h0)
    smax0 = float(np.abs(w0).max()) if w0.size else 0.0
    tol0 = CLUSTER_TOL * max(1.0, smax0)

    # w0 is ascending, so degenerate clusters are contiguous index ranges.
    projectors = []
    start = 0
    for i in range(1, w0.size + 1):
        if i == w0.size or w0[i] - w0[i - 1] > tol0:
            vk = v0[:, start:i]
            projectors.append(vk @ vk.conj().T)
            start = i

    hi_norm = spectral_norm(sys.h_i)
    eye = np.eye(dim)
    sectors = []
    for alpha in _interaction_clusters(sys):
        shifted = sys.h_i - alpha * eye
        if _is_numerically_zero(shifted, max(hi_norm, abs(alpha))):
            basis = eye.astype(complex)
        else:
            basis = intersect_kernels([shifted @ p for p in projectors], rel_tol)
        if basis.shape[1] > 0:
            sectors.append(IfeSector(alpha, basis))
    _, _, kernel = _commutator_and_kernel(sys, rel_tol)
    return IfeDecomposition(tuple(sectors), kernel)


def ife_exists(sys: BipartiteSystem, rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """True iff Ker[H_0, H_I] is nontrivial (existence of IFE states)."""
    _, _, kernel = _commutator_and_kernel(sys, rel_tol)
    return kernel.shape[1] > 0


def classify_pure(psi, sys: BipartiteSystem, rel_tol: float = DEFAULT_REL_TOL):
    """Interaction eigenvalue of an IFE pure state, or None.

    The candidate ``alpha = <psi|H_I|psi>`` is accepted when psi is an
    eigenvector of the coupling at that value and lies in the commutator
    kernel, both within ``rel_tol`` relative to the operator norms.  For
    systems whose commutator is nonzero only through roundoff, membership
    via :func:`ife_sectors` is the more robust test.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != sys.dim:
        raise ValueError(
            f"state has dimension {psi.shape[0]}, expected {sys.dim}"
        )
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"state is not normalized: ||psi|| = {nrm!r}")

    alpha = float(np.vdot(psi, sys.h_i @ psi).real)
    comm, comm_is_zero, _ = _commutator_and_kernel(sys, rel_tol)
    hi_norm = spectral_norm(sys.h_i)

    if _is_numerically_zero(sys.h_i, 1.0):
        eig_ok = True
    else:
        eig_ok = float(np.linalg.norm(sys.h_i @ psi - alpha * psi)) <= rel_tol * hi_norm
    if comm_is_zero:
        comm_ok = True
    else:
        comm_ok = float(np.linalg.norm(comm @ psi)) <= rel_tol * spectral_norm(comm)
    return alpha if (eig_ok and comm_ok) else None
