import numpy as np
import pytest

from blochtomo import (
    MomentSummary,
    bloch_to_density,
    correlation_matrix,
    density_to_bloch,
    moments,
    partial_trace,
    point_mass,
    rank_test,
    rho1,
    rho2,
    rhoN,
    uniform_ball,
)
from blochtomo.core import trace_out_last
from blochtomo.errors import BallViolation, DimCap, InvariantViolation
from helpers import random_ensemble

SWAP = np.eye(4)[[0, 2, 1, 3]]


class TestMoments:
    def test_three_point(self):
        m = moments(point_mass(np.eye(3), [1 / 3] * 3))
        assert np.allclose(m.x, [1 / 3] * 3)
        assert np.allclose(m.tau, np.eye(3) / 3)

    def test_single_point(self):
        m = moments(point_mass([[0, 0, 1]], [1.0]))
        assert np.allclose(m.x, [0, 0, 1])
        assert np.allclose(m.tau, np.diag([0.0, 0.0, 1.0]))

    def test_uniform_ball(self):
        m = moments(uniform_ball(10**6, 1))
        assert np.linalg.norm(m.x) < 5e-3
        assert np.max(np.abs(m.tau - np.eye(3) / 5)) < 2e-3

    def test_invariants_on_random(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            m = moments(random_ensemble(rng, int(rng.integers(1, 200))))
            assert np.allclose(m.tau, m.tau.T, atol=1e-12)
            assert np.linalg.eigvalsh(m.tau)[0] >= -1e-12
            assert np.trace(m.tau) <= 1 + 1e-10
            assert np.linalg.eigvalsh(m.tau - np.outer(m.x, m.x))[0] >= -1e-10

    def test_rejects_asymmetric_tau(self):
        t = np.eye(3) / 5
        t2 = t.copy()
        t2[0, 1] = 0.01
        with pytest.raises(InvariantViolation):
            MomentSummary(np.zeros(3), t2)


class TestRho1:
    def test_uniform_ball_is_maximally_mixed(self):
        m = MomentSummary(np.zeros(3), np.eye(3) / 5)
        assert np.allclose(rho1(m).mat, np.eye(2) / 2)

    def test_pure_pole(self):
        m = MomentSummary([0, 0, 1.0], np.diag([0.0, 0.0, 1.0]))
        assert np.allclose(rho1(m).mat, np.diag([1.0, 0.0]))

    def test_eigenvalues(self):
        m = moments(point_mass(np.eye(3), [1 / 3] * 3))
        evals = np.linalg.eigvalsh(rho1(m).mat)
        expect = [(1 - 1 / np.sqrt(3)) / 2, (1 + 1 / np.sqrt(3)) / 2]
        assert np.allclose(sorted(evals), expect)

    def test_overlong_first_moment_rejected(self):
        # |x| > 1 cannot coexist with a PSD covariance, so the moment
        # summary itself is rejected before rho1 ever sees it.
        with pytest.raises(InvariantViolation):
            rho1(MomentSummary([1.0, 1.0, 0.0], np.eye(3) * 0.67))


class TestRho2:
    def test_single_point_product(self):
        m = moments(point_mass([[0, 0, 1]], [1.0]))
        expect = np.zeros((4, 4))
        expect[0, 0] = 1.0
        assert np.allclose(rho2(m).mat, expect, atol=1e-14)

    def test_antipodal_mixture(self):
        m = moments(point_mass([[0, 0, 1], [0, 0, -1]], [0.5, 0.5]))
        assert np.allclose(rho2(m).mat, np.diag([0.5, 0.0, 0.0, 0.5]), atol=1e-14)

    def test_uniform_ball_spectrum(self):
        # With x = 0, tau = 1/5 the state is (1 + (1/5) sum_i s_i x s_i)/4;
        # sum_i s_i x s_i = 2 SWAP - 1 has eigenvalues {1,1,1,-3}, giving
        # the triplet/singlet spectrum {0.3, 0.3, 0.3, 0.1}.
        m = MomentSummary(np.zeros(3), np.eye(3) / 5)
        evals = np.linalg.eigvalsh(rho2(m).mat)
        assert np.allclose(sorted(evals), [0.1, 0.3, 0.3, 0.3], atol=1e-12)

    def test_swap_invariance_random(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            m = moments(random_ensemble(rng, int(rng.integers(1, 100))))
            mat = rho2(m).mat
            assert np.max(np.abs(SWAP @ mat @ SWAP - mat)) < 1e-12

    def test_marginals_equal_rho1(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            m = moments(random_ensemble(rng, int(rng.integers(1, 100))))
            r2 = rho2(m)
            r1 = rho1(m).mat
            assert np.max(np.abs(partial_trace(r2, "A").mat - r1)) < 1e-12
            assert np.max(np.abs(partial_trace(r2, "B").mat - r1)) < 1e-12

    def test_psd_on_random_ensembles(self):
        rng = np.random.default_rng(31)
        for _ in range(1000):
            m = moments(random_ensemble(rng, int(rng.integers(1, 50))))
            assert np.linalg.eigvalsh(rho2(m).mat)[0] >= -1e-12


class TestRhoN:
    def test_n1_matches_rho1(self):
        rng = np.random.default_rng(37)
        e = random_ensemble(rng, 50)
        assert np.max(np.abs(rhoN(e, 1).mat - rho1(moments(e)).mat)) < 1e-12

    def test_n2_matches_rho2(self):
        rng = np.random.default_rng(41)
        for _ in range(20):
            e = random_ensemble(rng, int(rng.integers(1, 200)))
            assert np.max(np.abs(rhoN(e, 2).mat - rho2(moments(e)).mat)) < 1e-12

    def test_single_particle_power(self):
        e = point_mass([[0.2, -0.1, 0.4]], [1.0])
        rho = bloch_to_density([0.2, -0.1, 0.4]).mat
        expect = np.kron(np.kron(rho, rho), rho)
        assert np.allclose(rhoN(e, 3).mat, expect, atol=1e-14)

    def test_marginals_reduce_to_rho1(self):
        rng = np.random.default_rng(43)
        e = random_ensemble(rng, 30)
        r1 = rho1(moments(e)).mat
        mat = rhoN(e, 4).mat
        while mat.shape[0] > 2:
            mat = trace_out_last(mat)
        assert np.max(np.abs(mat - r1)) < 1e-10

    def test_dim_cap(self):
        e = point_mass([[0, 0, 0.5]], [1.0])
        with pytest.raises(DimCap):
            rhoN(e, 7)

    def test_chunking_consistent(self):
        rng = np.random.default_rng(47)
        e = random_ensemble(rng, 100)
        a = rhoN(e, 2, chunk=7)
        b = rhoN(e, 2, chunk=1000)
        assert np.max(np.abs(a.mat - b.mat)) < 1e-13


class TestCorrelationMatrix:
    def test_block_structure(self):
        m = moments(point_mass(np.eye(3), [1 / 3] * 3))
        r = correlation_matrix(m).r
        assert r[0, 0] == 0.25
        assert np.allclose(r[0, 1:], m.x / 4)
        assert np.allclose(r[1:, 1:], m.tau / 4)

    def test_uniform_ball_rank_four(self):
        m = MomentSummary(np.zeros(3), np.eye(3) / 5)
        sv = np.linalg.svd(correlation_matrix(m).r, compute_uv=False)
        assert np.sum(sv > 1e-8 * sv[0]) == 4

    def test_single_point_rank_one(self):
        # R = (1, e3)(1, e3)^T / 4 is an outer product: rank 1 by SVD.
        m = moments(point_mass([[0, 0, 1]], [1.0]))
        sv = np.linalg.svd(correlation_matrix(m).r, compute_uv=False)
        assert np.sum(sv > 1e-8 * sv[0]) == 1

    def test_line_rank_at_most_two(self):
        from blochtomo import line_prior

        m = moments(line_prior([0, 0, 1], [0.3, -0.7], [0.6, 0.4]))
        sv = np.linalg.svd(correlation_matrix(m).r, compute_uv=False)
        assert np.sum(sv > 1e-8 * sv[0]) <= 2


class TestRankTest:
    def test_full_rank_tau_flags(self):
        m = MomentSummary(np.zeros(3), np.eye(3) / 5)
        out = rank_test(m)
        assert out == {"rank_tau": 3, "rank_r": 4, "flags_nonzero_discord": True}

    def test_line_prior_inconclusive(self):
        from blochtomo import line_prior

        m = moments(line_prior([0, 0, 1], [0.5, -0.5], [0.5, 0.5]))
        out = rank_test(m)
        assert out["rank_tau"] == 1
        assert not out["flags_nonzero_discord"]

    def test_three_independent_points_flag(self):
        pts = np.array([[0.9, 0, 0], [0.1, 0.8, 0], [0.2, 0.1, 0.7]])
        out = rank_test(moments(point_mass(pts, [0.2, 0.3, 0.5])))
        assert out["flags_nonzero_discord"]

    def test_monotone_under_tightening(self):
        rng = np.random.default_rng(53)
        for _ in range(20):
            m = moments(random_ensemble(rng, 20))
            loose = rank_test(m, tol=1e-6)
            tight = rank_test(m, tol=1e-9)
            if loose["flags_nonzero_discord"]:
                assert tight["flags_nonzero_discord"]
