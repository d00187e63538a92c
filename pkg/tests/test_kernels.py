"""The JIT path and the interpreted fallback must agree.

Integer outputs (permutations, node counts, unimodular transforms, trace
codes) have to match bit for bit. The LLL rotation floats are allowed one
ULP of slack: numba fuses the complex multiplies differently than CPython,
and the Givens cascade exposes that. Everything else is exact because both
paths execute the same operation sequence on the same doubles.
"""

import numpy as np
import pytest

from latdet import _kernels

pytestmark = pytest.mark.skipif(
    not _kernels.NUMBA_ENABLED,
    reason="numba path disabled; nothing to compare against")


def rand_g(rng, m):
    return ((rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
            * np.sqrt(0.5))


def rand_problem(rng, m, kmax=3, n0=1.0):
    g = rand_g(rng, m)
    x = rng.integers(0, kmax + 1, (m, 2)) @ np.array([1, 1j])
    noise = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) \
        * np.sqrt(n0 / 2)
    t = g @ x + noise
    q, r, perm, bad = _kernels.sqrd_kernel(np.ascontiguousarray(g))
    assert not bad
    rt = np.ascontiguousarray(np.conj(q.T) @ t)
    return np.ascontiguousarray(r), rt


def test_sqrd_paths_identical():
    rng = np.random.default_rng(50)
    pure = _kernels.PURE_PYTHON["sqrd_kernel"]
    for _ in range(100):
        g = np.ascontiguousarray(rand_g(rng, 4))
        qa, ra, pa, bada = _kernels.sqrd_kernel(g)
        qb, rb, pb, badb = pure(g)
        assert bada == badb
        assert np.array_equal(pa, pb)
        assert np.array_equal(qa, qb)
        assert np.array_equal(ra, rb)


def test_lll_paths_agree():
    rng = np.random.default_rng(51)
    pure = _kernels.PURE_PYTHON["lll_kernel"]
    for _ in range(100):
        g = np.ascontiguousarray(rand_g(rng, 4))
        q, r, perm, bad = _kernels.sqrd_kernel(g)
        q2a, r2a, ta, tia, sa = _kernels.lll_kernel(q.copy(), r.copy(), 0.75)
        q2b, r2b, tb, tib, sb = pure(q.copy(), r.copy(), 0.75)
        assert sa == sb
        assert np.array_equal(ta, tb)
        assert np.array_equal(tia, tib)
        assert np.allclose(q2a, q2b, rtol=0.0, atol=1e-12)
        assert np.allclose(r2a, r2b, rtol=0.0, atol=1e-12)


def test_finite_search_paths_identical():
    rng = np.random.default_rng(52)
    pure = _kernels.PURE_PYTHON["sesd_finite_kernel"]
    for _ in range(100):
        r, rt = rand_problem(rng, 3)
        codes_a = np.empty(4096, np.int64)
        pd2_a = np.empty(4096, np.float64)
        codes_b = np.empty(4096, np.int64)
        pd2_b = np.empty(4096, np.float64)
        out_a = _kernels.sesd_finite_kernel(r, rt, 0, 3, 1, codes_a, pd2_a)
        out_b = pure(r, rt, 0, 3, 1, codes_b, pd2_b)
        for va, vb in zip(out_a, out_b):
            assert np.array_equal(np.asarray(va), np.asarray(vb))
        tlen = out_a[6]
        assert np.array_equal(codes_a[:tlen], codes_b[:tlen])
        assert np.array_equal(pd2_a[:tlen], pd2_b[:tlen])


def test_relaxed_search_paths_identical():
    rng = np.random.default_rng(53)
    pure = _kernels.PURE_PYTHON["sesd_relaxed_kernel"]
    for _ in range(100):
        r, rt = rand_problem(rng, 3, n0=2.0)
        out_a = _kernels.sesd_relaxed_kernel(r, rt)
        out_b = pure(r, rt)
        for va, vb in zip(out_a, out_b):
            assert np.array_equal(np.asarray(va), np.asarray(vb))


def test_sic_paths_identical():
    rng = np.random.default_rng(54)
    pure = _kernels.PURE_PYTHON["sic_kernel"]
    for _ in range(100):
        r, rt = rand_problem(rng, 4)
        for finite in (0, 1):
            out_a = _kernels.sic_kernel(r, rt, finite, 0, 3)
            out_b = pure(r, rt, finite, 0, 3)
            for va, vb in zip(out_a, out_b):
                assert np.array_equal(np.asarray(va), np.asarray(vb))
