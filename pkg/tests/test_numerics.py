import numpy as np
import pytest

from latdet.errors import RankDeficient
from latdet.numerics import gram_det, qrd, sigma_max, sqrd


def _rand_matrix(rng, m):
    return (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) \
        * np.sqrt(0.5)


def _check_factorization(g, f):
    m = g.shape[0]
    assert np.max(np.abs(np.conj(f.q.T) @ f.q - np.eye(m))) <= 1e-9
    assert np.max(np.abs(f.q @ f.r - g[:, f.perm])) <= 1e-9
    diag = np.diagonal(f.r)
    assert np.all(diag.imag == 0.0)
    assert np.all(diag.real >= 0.0)
    assert np.max(np.abs(np.tril(f.r, -1))) == 0.0


class TestQrd:
    def test_identity(self):
        f = qrd(np.eye(4, dtype=complex))
        assert np.array_equal(f.q, np.eye(4))
        assert np.array_equal(f.r, np.eye(4))
        assert list(f.perm) == [0, 1, 2, 3]

    def test_phase_absorbed_into_q(self):
        f = qrd(np.array([[2j]]))
        assert f.r[0, 0] == pytest.approx(2.0)
        assert f.q[0, 0] == pytest.approx(1j)

    def test_random_reconstruction(self):
        rng = np.random.default_rng(101)
        for _ in range(200):
            g = _rand_matrix(rng, 4)
            _check_factorization(g, qrd(g))

    def test_rank_deficient_rejected(self):
        g = np.ones((3, 3), dtype=complex)
        with pytest.raises(RankDeficient):
            qrd(g)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            qrd(np.ones((2, 3), dtype=complex))

    def test_rejects_nan(self):
        g = np.eye(2, dtype=complex)
        g[0, 1] = np.nan
        with pytest.raises(ValueError):
            qrd(g)


class TestSqrd:
    def test_identity_perm_ties_to_lowest_index(self):
        f = sqrd(np.eye(4, dtype=complex))
        assert list(f.perm) == [0, 1, 2, 3]

    def test_picks_smallest_norm_first(self):
        f = sqrd(np.diag([3.0, 1.0]).astype(complex))
        assert list(f.perm) == [1, 0]

    def test_random_reconstruction(self):
        rng = np.random.default_rng(202)
        for _ in range(200):
            g = _rand_matrix(rng, 4)
            f = sqrd(g)
            _check_factorization(g, f)
            assert sorted(f.perm) == [0, 1, 2, 3]

    def test_rank_deficient_rejected(self):
        g = np.ones((3, 3), dtype=complex)
        with pytest.raises(RankDeficient):
            sqrd(g)

    def test_greedy_residual_order(self):
        # after the first pick, the next column is chosen by residual norm,
        # not by original norm: verify against a direct Gram-Schmidt replay
        rng = np.random.default_rng(7)
        for _ in range(50):
            g = _rand_matrix(rng, 3)
            f = sqrd(g)
            a = g[:, f.perm].astype(complex)
            for k in range(3):
                norms = np.linalg.norm(a[:, k:], axis=0)
                assert norms[0] <= np.min(norms) + 1e-9
                a[:, k + 1:] -= np.outer(
                    a[:, k], np.conj(a[:, k]) @ a[:, k + 1:]) \
                    / np.linalg.norm(a[:, k]) ** 2


class TestSigmaMax:
    def test_identity(self):
        assert sigma_max(np.eye(4, dtype=complex)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert sigma_max(np.diag([2.0, 3.0]).astype(complex)) == pytest.approx(3.0)

    def test_zero_matrix(self):
        assert sigma_max(np.zeros((3, 3), dtype=complex)) == 0.0

    def test_against_power_iteration(self):
        rng = np.random.default_rng(303)
        for _ in range(20):
            r = np.triu(_rand_matrix(rng, 4))
            h = np.conj(r.T) @ r
            v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            for _ in range(500):
                v = h @ v
                v /= np.linalg.norm(v)
            est = np.sqrt(np.real(np.conj(v) @ h @ v))
            assert sigma_max(r) == pytest.approx(est, rel=1e-6)

    def test_dominates_diagonal(self):
        rng = np.random.default_rng(404)
        for _ in range(50):
            r = np.triu(_rand_matrix(rng, 4))
            assert sigma_max(r) >= np.max(np.abs(np.diagonal(r))) - 1e-12


class TestGramDet:
    def test_identity(self):
        assert gram_det(np.eye(3, dtype=complex)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert gram_det(np.diag([1.0, 2.0]).astype(complex)) == pytest.approx(4.0)

    def test_against_generic_determinant(self):
        rng = np.random.default_rng(505)
        for _ in range(30):
            r = np.triu(_rand_matrix(rng, 3))
            r[np.diag_indices(3)] = np.abs(np.diagonal(r)) + 0.1
            ref = np.real(np.linalg.det(np.conj(r.T) @ r))
            assert gram_det(r) == pytest.approx(ref, rel=1e-9)
