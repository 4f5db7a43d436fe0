import warnings

import numpy as np
import pytest
import scipy.linalg

from ifestates import (
    BipartiteSystem,
    build_h0,
    build_total,
    classify_pure,
    ife_exists,
    ife_sectors,
    ife_sectors_oracle,
)
from ifestates.core import cluster_values
from ifestates.linalg import commutator, intersect_kernels, propagator, subspace_equal

from helpers import (
    commuting_system,
    diagonal_multisector_system,
    generic_system,
    random_state,
    subspace_zero_system,
)

SZ = np.diag([1.0, -1.0]).astype(complex)


def brute_force_zero_sector(sys_):
    """Independent oracle: scipy null spaces of the stacked constraints."""
    h0 = build_h0(sys_)
    stack = np.vstack([sys_.h_i, h0 @ sys_.h_i - sys_.h_i @ h0])
    return scipy.linalg.null_space(stack)


class TestBuilders:
    def test_h0_diagonal_sum(self):
        sys_ = BipartiteSystem(2, 2, SZ, SZ, np.zeros((4, 4)))
        assert np.allclose(build_h0(sys_), np.diag([2.0, 0.0, 0.0, -2.0]))

    def test_h0_zero(self):
        sys_ = BipartiteSystem(2, 3, np.zeros((2, 2)), np.zeros((3, 3)), np.zeros((6, 6)))
        assert np.allclose(build_h0(sys_), 0.0)

    def test_h0_spectrum_is_sumset(self):
        rng = np.random.default_rng(0)
        d_a = rng.standard_normal(3)
        d_b = rng.standard_normal(4)
        sys_ = BipartiteSystem(3, 4, np.diag(d_a), np.diag(d_b), np.zeros((12, 12)))
        expected = np.sort(np.add.outer(d_a, d_b).ravel())
        assert np.allclose(np.linalg.eigvalsh(build_h0(sys_)), expected)

    def test_total_without_coupling(self):
        rng = np.random.default_rng(1)
        sys_ = generic_system(2, 3, rng)
        free = BipartiteSystem(2, 3, sys_.h_a, sys_.h_b, np.zeros((6, 6)))
        assert np.allclose(build_total(free), build_h0(free))

    def test_total_hermitian(self):
        rng = np.random.default_rng(2)
        sys_ = generic_system(2, 4, rng)
        h = build_total(sys_)
        assert np.allclose(h, h.conj().T)

    def test_spin_star_n1_coupling_entries(self):
        # flip-flop with unit strength couples |+,down> and |-,up> only
        from ifestates import SpinStarParams, build_spin_star

        sys_ = build_spin_star(SpinStarParams(1, 0.0, 0.0, (1.0,)))
        h = build_total(sys_)
        expected = np.zeros((4, 4), dtype=complex)
        expected[1, 2] = expected[2, 1] = 1.0
        assert np.allclose(h, expected)

    def test_invalid_dimensions_rejected(self):
        with pytest.raises(ValueError, match="dimension"):
            BipartiteSystem(2, 2, SZ, SZ, np.zeros((6, 6)))

    def test_non_hermitian_rejected(self):
        bad = np.array([[0, 1], [0, 0]], dtype=complex)
        with pytest.raises(ValueError, match="not Hermitian"):
            BipartiteSystem(2, 2, bad, SZ, np.zeros((4, 4)))


class TestClusterValues:
    def test_merges_roundoff_splits(self):
        values = [1.0, 1.0 + 1e-12, 2.0, 2.0 - 1e-12, 5.0]
        assert cluster_values(values, 1e-8) == [pytest.approx(1.0), pytest.approx(2.0), 5.0]

    def test_empty(self):
        assert cluster_values([], 1e-8) == []

    def test_no_negative_zero(self):
        out = cluster_values([-1e-16, 1e-16], 1e-8)
        assert str(out[0]) != "-0.0"


class TestIfeSectors:
    def test_zero_coupling_full_space(self):
        rng = np.random.default_rng(3)
        sys_ = BipartiteSystem(
            2, 3,
            np.diag(rng.standard_normal(2)),
            np.diag(rng.standard_normal(3)),
            np.zeros((6, 6)),
        )
        dec = ife_sectors(sys_)
        assert dec.n_sectors == 1
        assert dec.sectors[0].alpha == pytest.approx(0.0, abs=1e-12)
        assert dec.sectors[0].dimension == 6

    def test_diagonal_sectors_are_coupling_eigenspaces(self):
        rng = np.random.default_rng(4)
        sys_ = diagonal_multisector_system(rng, 2, 3)
        dec = ife_sectors(sys_)
        d_i = np.diagonal(sys_.h_i).real
        expected = sorted(set(d_i))
        assert list(dec.alphas) == pytest.approx(expected)
        total = sum(s.dimension for s in dec.sectors)
        assert total == 6
        for sector in dec.sectors:
            idx = np.flatnonzero(np.abs(d_i - sector.alpha) < 1e-9)
            assert sector.dimension == idx.size
            assert subspace_equal(sector.basis, np.eye(6)[:, idx], 1e-8)

    def test_spin_star_n2_single_sector(self, star_system_n2):
        dec = ife_sectors(star_system_n2)
        assert dec.n_sectors == 1
        assert dec.sectors[0].alpha == pytest.approx(0.0, abs=1e-10)
        assert dec.sectors[0].dimension == 4
        brute = brute_force_zero_sector(star_system_n2)
        assert brute.shape[1] == 4
        assert subspace_equal(dec.sectors[0].basis, brute, 1e-8)

    def test_generic_system_is_empty(self):
        rng = np.random.default_rng(5)
        sys_ = generic_system(2, 3, rng)
        dec = ife_sectors(sys_)
        assert dec.n_sectors == 0
        assert dec.commutator_kernel.shape[1] == 0

    def test_alphas_strictly_increasing(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            dec = ife_sectors(commuting_system(2, 3, rng))
            alphas = np.array(dec.alphas)
            assert np.all(np.diff(alphas) > 0)

    def test_sector_orthogonality(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            dec = ife_sectors(commuting_system(2, 4, rng))
            for i in range(dec.n_sectors):
                for j in range(i + 1, dec.n_sectors):
                    gram = dec.sectors[i].basis.conj().T @ dec.sectors[j].basis
                    assert np.linalg.norm(gram, 2) <= 1e-8

    def test_sectors_inside_commutator_kernel(self):
        rng = np.random.default_rng(8)
        for k in range(10):
            maker = [subspace_zero_system, commuting_system][k % 2]
            sys_ = maker(2, 3, rng)
            dec = ife_sectors(sys_)
            kernel = dec.commutator_kernel
            proj = kernel @ kernel.conj().T
            total = dec.total_basis()
            if total.shape[1]:
                assert np.linalg.norm(total - proj @ total, 2) <= 1e-8

    def test_sector_vectors_satisfy_defining_residuals(self):
        rng = np.random.default_rng(20)
        for k in range(6):
            maker = [commuting_system, subspace_zero_system][k % 2]
            sys_ = maker(2, 4, rng)
            h0 = build_h0(sys_)
            comm = commutator(h0, sys_.h_i)
            hi_scale = max(1.0, np.linalg.norm(sys_.h_i, 2))
            comm_scale = max(1.0, np.linalg.norm(comm, 2))
            for sector in ife_sectors(sys_).sectors:
                shifted = sys_.h_i - sector.alpha * np.eye(8)
                assert np.linalg.norm(shifted @ sector.basis, 2) <= 1e-8 * hi_scale
                assert np.linalg.norm(comm @ sector.basis, 2) <= 1e-8 * comm_scale
                gram = sector.basis.conj().T @ sector.basis
                assert np.abs(gram - np.eye(sector.dimension)).max() <= 1e-10

    def test_one_dimensional_subsystem(self):
        # a trivial factor: sectors reduce to those of the nontrivial side
        sys_ = BipartiteSystem(
            1, 3,
            np.array([[0.7]], dtype=complex),
            np.diag([1.0, 2.0, 3.0]).astype(complex),
            np.diag([0.5, 0.5, -0.5]).astype(complex),
        )
        dec = ife_sectors(sys_)
        assert dec.alphas == pytest.approx((-0.5, 0.5))
        assert [s.dimension for s in dec.sectors] == [1, 2]

    def test_conjugated_commuting_sectors_tile_space(self):
        # the commutator is only roundoff-level nonzero here; the kernel must
        # still be recognized as the whole space
        rng = np.random.default_rng(19)
        sys_ = commuting_system(2, 3, rng, conjugate=True)
        dec = ife_sectors(sys_)
        assert dec.commutator_kernel.shape[1] == 6
        assert sum(s.dimension for s in dec.sectors) == 6


class TestOracle:
    def test_zero_coupling(self):
        sys_ = BipartiteSystem(2, 2, SZ, 0.5 * SZ, np.zeros((4, 4)))
        dec = ife_sectors_oracle(sys_)
        assert dec.n_sectors == 1
        assert dec.sectors[0].dimension == 4

    def test_matches_direct_on_random_two_by_two(self):
        rng = np.random.default_rng(9)
        for k in range(10):
            sys_ = [commuting_system, subspace_zero_system, generic_system][k % 3](2, 2, rng)
            direct = ife_sectors(sys_)
            oracle = ife_sectors_oracle(sys_)
            assert direct.n_sectors == oracle.n_sectors
            for s1, s2 in zip(direct.sectors, oracle.sectors):
                assert s1.alpha == pytest.approx(s2.alpha, abs=1e-8)
                assert subspace_equal(s1.basis, s2.basis, 1e-7)

    def test_spin_star_n2(self, star_system_n2):
        dec = ife_sectors_oracle(star_system_n2)
        assert dec.n_sectors == 1
        assert dec.sectors[0].alpha == pytest.approx(0.0, abs=1e-10)
        assert dec.sectors[0].dimension == 4
        assert subspace_equal(dec.sectors[0].basis, brute_force_zero_sector(star_system_n2), 1e-8)


class TestLiteralPowerChain:
    """Third route: the defining intersection with matrix powers written out."""

    @staticmethod
    def literal_sectors(sys_, rel_tol=1e-10):
        h0 = build_h0(sys_)
        nrm = np.linalg.norm(h0, 2)
        h0n = h0 / nrm if nrm > 0 else h0  # scaling leaves every kernel unchanged
        dim = sys_.dim
        alphas = sorted(set(np.round(np.linalg.eigvalsh(sys_.h_i), 9)))
        out = []
        for alpha in alphas:
            shifted = sys_.h_i - alpha * np.eye(dim)
            blocks, power = [], np.eye(dim)
            for _ in range(dim):
                blocks.append(shifted @ power)
                power = power @ h0n
            basis = intersect_kernels(blocks, rel_tol)
            if basis.shape[1]:
                out.append((float(alpha), basis))
        return out

    def test_agrees_with_both_routes(self):
        for k in range(9):
            rng = np.random.default_rng(5000 + k)
            maker = [commuting_system, subspace_zero_system, generic_system][k % 3]
            sys_ = maker(2, 4, rng)
            literal = self.literal_sectors(sys_)
            for dec in (ife_sectors(sys_), ife_sectors_oracle(sys_)):
                assert dec.n_sectors == len(literal)
                for sector, (alpha, basis) in zip(dec.sectors, literal):
                    assert sector.alpha == pytest.approx(alpha, abs=1e-8)
                    assert subspace_equal(sector.basis, basis, 1e-7)


class TestIfeExists:
    def test_zero_coupling(self):
        sys_ = BipartiteSystem(2, 2, SZ, SZ, np.zeros((4, 4)))
        assert ife_exists(sys_)

    def test_generic_system_has_none(self):
        rng = np.random.default_rng(10)
        sys_ = generic_system(2, 3, rng)
        comm = commutator(build_h0(sys_), sys_.h_i)
        # self-check that this draw is genuinely non-singular
        assert np.linalg.svd(comm, compute_uv=False)[-1] > 1e-6
        assert not ife_exists(sys_)

    def test_spin_star_always_allows(self, star_system_n2):
        assert ife_exists(star_system_n2)

    def test_agrees_with_sectors(self):
        rng = np.random.default_rng(11)
        for k in range(12):
            maker = [commuting_system, subspace_zero_system, generic_system][k % 3]
            sys_ = maker(2, 3, rng)
            assert ife_exists(sys_) == (ife_sectors(sys_).n_sectors > 0)


class TestClassifyPure:
    def test_spin_star_top_state(self, star_system_n2):
        psi = np.zeros(8, dtype=complex)
        psi[0] = 1.0  # |+, up up>
        assert classify_pure(psi, star_system_n2) == pytest.approx(0.0, abs=1e-12)

    def test_haar_random_state_rejected(self, star_system_n2):
        rng = np.random.default_rng(12)
        assert classify_pure(random_state(8, rng), star_system_n2) is None

    def test_coupling_eigenvector_outside_kernel(self, star_system_n2):
        # an eigenvector at nonzero alpha fails the commutator condition
        w, v = np.linalg.eigh(star_system_n2.h_i)
        psi = v[:, -1]
        assert w[-1] > 1.0
        comm = commutator(build_h0(star_system_n2), star_system_n2.h_i)
        assert np.linalg.norm(comm @ psi) > 1e-3
        assert classify_pure(psi, star_system_n2) is None

    def test_nonzero_alpha_sector_member(self):
        rng = np.random.default_rng(13)
        sys_ = diagonal_multisector_system(rng)
        dec = ife_sectors(sys_)
        sector = dec.sectors[-1]
        alpha = classify_pure(sector.basis[:, 0], sys_)
        assert alpha == pytest.approx(sector.alpha, abs=1e-9)

    def test_rejects_unnormalized(self, star_system_n2):
        with pytest.raises(ValueError, match="not normalized"):
            classify_pure(np.ones(8), star_system_n2)

    def test_rejects_wrong_dimension(self, star_system_n2):
        with pytest.raises(ValueError, match="dimension"):
            classify_pure(np.ones(4) / 2.0, star_system_n2)


class TestEvolutionIdentity:
    times = np.linspace(0.0, 10.0, 101)

    def deviation(self, sys_, psi, alpha):
        h = build_total(sys_)
        h0 = build_h0(sys_)
        worst = 0.0
        for t in self.times[::10]:
            full = propagator(h, t) @ psi
            free = np.exp(-1j * alpha * t) * (propagator(h0, t) @ psi)
            worst = max(worst, np.linalg.norm(full - free))
        return worst

    def test_forward_for_sector_vectors(self):
        rng = np.random.default_rng(14)
        for maker in (commuting_system, subspace_zero_system):
            sys_ = maker(2, 3, rng)
            for sector in ife_sectors(sys_).sectors:
                for j in range(sector.dimension):
                    dev = self.deviation(sys_, sector.basis[:, j], sector.alpha)
                    assert dev <= 1e-9 * np.sqrt(sys_.dim)

    def test_converse_deviation_for_orthogonal_states(self, star_system_n2):
        # statistical check: states orthogonal to every sector must deviate
        rng = np.random.default_rng(15)
        total = ife_sectors(star_system_n2).total_basis()
        proj = total @ total.conj().T
        for _ in range(5):
            psi = random_state(8, rng)
            psi = psi - proj @ psi
            psi /= np.linalg.norm(psi)
            assert self.deviation(star_system_n2, psi, 0.0) > 1e-3

    def test_phase_freedom_at_nonzero_alpha(self):
        rng = np.random.default_rng(16)
        sys_ = diagonal_multisector_system(rng)
        dec = ife_sectors(sys_)
        sector = next(s for s in dec.sectors if abs(s.alpha) > 0.1)
        psi = sector.basis[:, 0]
        h = build_total(sys_)
        h0 = build_h0(sys_)
        for t in (0.3, 1.7, 9.2):
            overlap = np.vdot(propagator(h0, t) @ psi, propagator(h, t) @ psi)
            assert abs(overlap - np.exp(-1j * sector.alpha * t)) <= 1e-9


class TestCommutatorKernelInvarianceProbe:
    def test_probe_reports_only(self):
        # open question: is Ker[H_0,H_I] invariant under H_0 and H_I?
        # report candidates, never assert
        rng = np.random.default_rng(17)
        candidates = []
        for k in range(20):
            maker = [commuting_system, subspace_zero_system, generic_system][k % 3]
            sys_ = maker(2, 3, rng)
            dec = ife_sectors(sys_)
            kernel = dec.commutator_kernel
            if kernel.shape[1] in (0, sys_.dim):
                continue
            proj = kernel @ kernel.conj().T
            eye = np.eye(sys_.dim)
            for name, op in (("h0", build_h0(sys_)), ("h_i", sys_.h_i)):
                leak = np.linalg.norm((eye - proj) @ op @ kernel, 2)
                if leak > 1e-8 * max(1.0, np.linalg.norm(op, 2)):
                    candidates.append((k, name, float(leak)))
        if candidates:
            warnings.warn(
                f"commutator kernel not invariant in {len(candidates)} cases: "
                f"{candidates[:3]}",
                stacklevel=1,
            )
