"""Seeded generators for test systems and random linear-algebra objects."""

from __future__ import annotations

import numpy as np

from ifestates import BipartiteSystem

# Dimension pairs with product <= 16, mixed shapes.
DIM_PAIRS = [(2, 2), (2, 3), (3, 3), (2, 4), (4, 4), (2, 6), (3, 5), (2, 8), (2, 5), (4, 3)]


def random_unitary(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d)).conj()


def random_hermitian(dim, rng, scale=1.0):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (z + z.conj().T)


def random_state(dim, rng):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def commuting_system(dim_a, dim_b, rng, conjugate=True):
    """System with [H_0, H_I] = 0: all pieces share one product eigenbasis.

    Spectra are small integers so degeneracies are exact and sectors are
    multi-dimensional.
    """
    d_a = rng.integers(-2, 3, dim_a).astype(float)
    d_b = rng.integers(-2, 3, dim_b).astype(float)
    d_i = rng.integers(-2, 3, dim_a * dim_b).astype(float)
    if not conjugate:
        return BipartiteSystem(dim_a, dim_b, np.diag(d_a), np.diag(d_b), np.diag(d_i))
    u_a = random_unitary(dim_a, rng)
    u_b = random_unitary(dim_b, rng)
    u = np.kron(u_a, u_b)
    return BipartiteSystem(
        dim_a, dim_b,
        (u_a * d_a) @ u_a.conj().T,
        (u_b * d_b) @ u_b.conj().T,
        (u * d_i) @ u.conj().T,
    )


def subspace_zero_system(dim_a, dim_b, rng, n_zero=None):
    """Coupling that vanishes on a product-basis subspace.

    The free parts are diagonal, so the zeroed rows/columns of the coupling
    give a guaranteed alpha = 0 sector while [H_0, H_I] stays nonzero.
    """
    dim = dim_a * dim_b
    if n_zero is None:
        n_zero = int(rng.integers(1, max(2, dim // 2) + 1))
    h_i = random_hermitian(dim, rng)
    idx = rng.permutation(dim)[:n_zero]
    h_i[idx, :] = 0.0
    h_i[:, idx] = 0.0
    return BipartiteSystem(
        dim_a, dim_b,
        np.diag(rng.standard_normal(dim_a)),
        np.diag(rng.standard_normal(dim_b)),
        h_i,
    )


def generic_system(dim_a, dim_b, rng):
    """Fully random Hermitian pieces; almost surely admits no IFE states."""
    return BipartiteSystem(
        dim_a, dim_b,
        random_hermitian(dim_a, rng),
        random_hermitian(dim_b, rng),
        random_hermitian(dim_a * dim_b, rng),
    )


def acceptance_systems(seed=1234):
    """The seeded battery: 30 commuting, 30 subspace-zero, 40 generic."""
    rng = np.random.default_rng(seed)
    systems = []
    for k in range(30):
        da, db = DIM_PAIRS[k % len(DIM_PAIRS)]
        systems.append(("commuting", commuting_system(da, db, rng, conjugate=k % 2 == 0)))
    for k in range(30):
        da, db = DIM_PAIRS[k % len(DIM_PAIRS)]
        systems.append(("subspace_zero", subspace_zero_system(da, db, rng)))
    for k in range(40):
        da, db = DIM_PAIRS[k % len(DIM_PAIRS)]
        systems.append(("generic", generic_system(da, db, rng)))
    return systems


def diagonal_multisector_system(rng, dim_a=2, dim_b=3, values=(-1.0, 0.5, 2.0)):
    """Plain-diagonal commuting system whose coupling has >= 2 eigenvalues.

    Sector gaps are at least 0.5 so cross-sector coherences dephase well
    inside the default time grid.
    """
    dim = dim_a * dim_b
    d_i = rng.choice(values, dim)
    while np.unique(d_i).size < 2:
        d_i = rng.choice(values, dim)
    return BipartiteSystem(
        dim_a, dim_b,
        np.diag(rng.integers(-2, 3, dim_a).astype(float)),
        np.diag(rng.integers(-2, 3, dim_b).astype(float)),
        np.diag(d_i),
    )
