"""Time evolution tracers: deviation from free evolution, subsystem
energies, and covariance of free-invariant observable pairs.

All propagation is exact spectral propagation of time-independent
Hamiltonians (units with hbar = 1); each trace diagonalizes its
generators once and then sweeps the time grid with phase factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BipartiteSystem, build_h0, build_total
from .linalg import as_operator, hermitian_eig, kron, propagator, require_hermitian, spectral_norm

__all__ = [
    "FreeInvarianceError",
    "EvolutionReport",
    "time_grid",
    "evolve_pure",
    "ife_deviation_trace",
    "energy_trace",
    "covariance_trace",
]

# Each evolved expectation of a Hermitian observable must be real up to this
# imaginary residue.
_IMAG_TOL = 1e-10


class FreeInvarianceError(ValueError):
    """An observable fails to commute with its free Hamiltonian.

    The constancy of the covariance only holds for observables invariant
    under the free evolution of their own subsystem, so the trace refuses
    to run rather than report a meaningless curve.
    """


@dataclass(frozen=True)
class EvolutionReport:
    """Per-time-step traces; fields not computed by a tracer stay None."""

    times: np.ndarray
    deviation: np.ndarray | None = None
    energy_a: np.ndarray | None = None
    energy_b: np.ndarray | None = None
    covariance: np.ndarray | None = None
    max_deviation: float | None = None


def time_grid(t_max: float = 10.0, steps: int = 101) -> np.ndarray:
    """Uniform grid of ``steps`` points on [0, t_max], endpoints included."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    return np.linspace(0.0, float(t_max), int(steps))


def evolve_pure(h, psi, t: float) -> np.ndarray:
    """exp(-i h t) |psi> for a Hermitian generator and a unit vector."""
    h = as_operator(h)
    psi = _unit_vector(psi, h.shape[0])
    return propagator(h, t) @ psi


def _unit_vector(psi, dim=None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if dim is not None and psi.shape[0] != dim:
        raise ValueError(f"state has dimension {psi.shape[0]}, expected {dim}")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"state is not normalized: ||psi|| = {nrm!r}")
    return psi


def _evolved_columns(w, v, psi, times) -> np.ndarray:
    """Columns exp(-i h t_k) psi from the eigendecomposition of h."""
    coeff = v.conj().T @ psi
    phases = np.exp(-1j * np.outer(w, np.asarray(times, dtype=float)))
    return v @ (phases * coeff[:, None])


def ife_deviation_trace(sys: BipartiteSystem, psi, alpha: float, times) -> EvolutionReport:
    """Norm distance between full evolution and phased free evolution.

    deviation[k] = || exp(-iHt_k) psi - exp(-i alpha t_k) exp(-iH_0 t_k) psi ||;
    identically ~0 exactly for members of the sector at ``alpha``.
    """
    times = np.asarray(times, dtype=float)
    psi = _unit_vector(psi, sys.dim)
    w_h, v_h = hermitian_eig(build_total(sys))
    w_0, v_0 = hermitian_eig(build_h0(sys))
    full = _evolved_columns(w_h, v_h, psi, times)
    free = _evolved_columns(w_0, v_0, psi, times) * np.exp(-1j * float(alpha) * times)[None, :]
    deviation = np.linalg.norm(full - free, axis=0)
    return EvolutionReport(
        times=times, deviation=deviation, max_deviation=float(deviation.max()),
    )


def _real_expectations(states: np.ndarray, op: np.ndarray, what: str) -> np.ndarray:
    vals = np.einsum("ik,ij,jk->k", states.conj(), op, states)
    imag = float(np.abs(vals.imag).max()) if vals.size else 0.0
    if imag > _IMAG_TOL * max(1.0, float(np.abs(vals).max())):
        raise FloatingPointError(
            f"{what} expectation has imaginary residue {imag:.3e}"
        )
    return vals.real


def energy_trace(sys: BipartiteSystem, psi, times) -> EvolutionReport:
    """Subsystem energies <H_A (x) I> and <I (x) H_B> under full evolution."""
    times = np.asarray(times, dtype=float)
    psi = _unit_vector(psi, sys.dim)
    w_h, v_h = hermitian_eig(build_total(sys))
    states = _evolved_columns(w_h, v_h, psi, times)
    op_a = kron(sys.h_a, np.eye(sys.dim_b))
    op_b = kron(np.eye(sys.dim_a), sys.h_b)
    return EvolutionReport(
        times=times,
        energy_a=_real_expectations(states, op_a, "subsystem-a energy"),
        energy_b=_real_expectations(states, op_b, "subsystem-b energy"),
    )


def covariance_trace(sys: BipartiteSystem, psi, o_a, o_b, times) -> EvolutionReport:
    """Covariance <O_A O_B> - <O_A><O_B> along the full evolution.

    Both observables must be Hermitian and commute with their subsystem's
    free Hamiltonian (free invariance); otherwise the constancy statement
    does not apply and :class:`FreeInvarianceError` is raised.
    """
    times = np.asarray(times, dtype=float)
    psi = _unit_vector(psi, sys.dim)
    o_a = require_hermitian(o_a, name="o_a")
    o_b = require_hermitian(o_b, name="o_b")
    for name, op, h_free in (("o_a", o_a, sys.h_a), ("o_b", o_b, sys.h_b)):
        if op.shape != h_free.shape:
            raise ValueError(f"{name} has shape {op.shape}, expected {h_free.shape}")
        defect = spectral_norm(op @ h_free - h_free @ op)
        scale = max(1.0, spectral_norm(op) * spectral_norm(h_free))
        if defect > 1e-10 * scale:
            raise FreeInvarianceError(
                f"{name} does not commute with its free Hamiltonian "
                f"(relative defect {defect / scale:.3e}); covariance constancy does not apply"
            )

    w_h, v_h = hermitian_eig(build_total(sys))
    states = _evolved_columns(w_h, v_h, psi, times)
    eye_a = np.eye(sys.dim_a)
    eye_b = np.eye(sys.dim_b)
    joint = _real_expectations(states, kron(o_a, o_b), "joint observable")
    mean_a = _real_expectations(states, kron(o_a, eye_b), "subsystem-a observable")
    mean_b = _real_expectations(states, kron(eye_a, o_b), "subsystem-b observable")
    return EvolutionReport(times=times, covariance=joint - mean_a * mean_b)
