"""Hot numeric kernels: pivoted QR, complex LLL, and the tree searches.

Every kernel is loop-style numpy code that runs unchanged through numba's
nopython JIT or as plain Python. The environment variable LATDET_NUMBA picks
the path at import time: unset or "1" means JIT whenever numba imports,
"0" forces the interpreted fallback. The undecorated originals stay reachable
in PURE_PYTHON for parity tests and benchmarks.

Conventions shared by the search kernels:

* the triangular factor has a real, strictly positive diagonal;
* level index ``idx`` runs m-1 (decided first) down to 0 (the leaf level);
* a node is counted when its partial squared distance has been computed and
  it passes the sphere constraint in effect at that moment: everything
  passes while the radius is still infinite, and survival is strict
  (pd2 < best2) once any leaf has been found;
* children are generated in ascending partial distance, so the first SC
  failure among siblings discards the remainder of the level.
"""

import os

import numpy as np

_flag = os.environ.get("LATDET_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

NUMBA_ENABLED = False
if _want_numba:
    try:
        import numba

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

PURE_PYTHON = {}


def _kernel(fn):
    PURE_PYTHON[fn.__name__] = fn
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn


@_kernel
def sqrd_kernel(g):
    """Sorted QR: modified Gram-Schmidt, greedy min-residual-norm pivoting.

    Returns (q, r, perm, bad) with g[:, perm] == q @ r and a real
    non-negative diagonal in r; bad is nonzero when a residual norm falls
    under the 1e-12 rank guard. Norm ties pick the lowest original column
    index.
    """
    m = g.shape[0]
    a = g.copy()
    q = np.zeros((m, m), np.complex128)
    r = np.zeros((m, m), np.complex128)
    perm = np.empty(m, np.int64)
    for j in range(m):
        perm[j] = j
    for k in range(m):
        jbest = k
        nbest = -1.0
        for j in range(k, m):
            s = 0.0
            for i in range(m):
                v = a[i, j]
                s += v.real * v.real + v.imag * v.imag
            if j == k or s < nbest or (s == nbest and perm[j] < perm[jbest]):
                nbest = s
                jbest = j
        if jbest != k:
            for i in range(m):
                t = a[i, k]
                a[i, k] = a[i, jbest]
                a[i, jbest] = t
            for i in range(k):
                t = r[i, k]
                r[i, k] = r[i, jbest]
                r[i, jbest] = t
            p = perm[k]
            perm[k] = perm[jbest]
            perm[jbest] = p
        d = np.sqrt(nbest)
        if d < 1e-12:
            return q, r, perm, 1
        r[k, k] = d
        inv = 1.0 / d
        for i in range(m):
            q[i, k] = a[i, k] * inv
        for j in range(k + 1, m):
            s = 0.0 + 0.0j
            for i in range(m):
                s += np.conj(q[i, k]) * a[i, j]
            r[k, j] = s
            for i in range(m):
                a[i, j] = a[i, j] - s * q[i, k]
    return q, r, perm, 0


@_kernel
def lll_kernel(q, r, delta):
    """Complex LLL on QR factors, rounding size-reduction coefficients to
    Gaussian integers.

    Swaps re-triangularize with a Givens rotation and re-phase the affected
    diagonal entry back to real non-negative. Returns (q2, r2, t, t_inv,
    swaps) where the input factors times t give the reduced basis; t and
    t_inv hold exact Gaussian integers (stored in complex128) maintained by
    integer column/row updates. A tie at the Lovász boundary does not swap.
    """
    m = r.shape[0]
    q2 = q.copy()
    r2 = r.copy()
    t = np.zeros((m, m), np.complex128)
    ti = np.zeros((m, m), np.complex128)
    for i in range(m):
        t[i, i] = 1.0
        ti[i, i] = 1.0
    swaps = 0
    k = 1
    while k < m:
        for j in range(k - 1, -1, -1):
            rjj = r2[j, j].real
            ratio_re = r2[j, k].real / rjj
            ratio_im = r2[j, k].imag / rjj
            mre = np.rint(ratio_re)
            mim = np.rint(ratio_im)
            if mre != 0.0 or mim != 0.0:
                mu = mre + 1j * mim
                for i in range(j + 1):
                    r2[i, k] = r2[i, k] - mu * r2[i, j]
                for i in range(m):
                    t[i, k] = t[i, k] - mu * t[i, j]
                for i in range(m):
                    ti[j, i] = ti[j, i] + mu * ti[k, i]
        a = r2[k - 1, k - 1].real
        b = r2[k - 1, k]
        c = r2[k, k].real
        if delta * a * a > c * c + b.real * b.real + b.imag * b.imag:
            for i in range(k + 1):
                s = r2[i, k - 1]
                r2[i, k - 1] = r2[i, k]
                r2[i, k] = s
            for i in range(m):
                s = t[i, k - 1]
                t[i, k - 1] = t[i, k]
                t[i, k] = s
            for i in range(m):
                s = ti[k - 1, i]
                ti[k - 1, i] = ti[k, i]
                ti[k, i] = s
            aa = r2[k - 1, k - 1]
            bb = r2[k, k - 1]
            rho = np.sqrt(aa.real * aa.real + aa.imag * aa.imag
                          + bb.real * bb.real + bb.imag * bb.imag)
            cs = aa / rho
            sn = bb / rho
            for col in range(k - 1, m):
                x1 = r2[k - 1, col]
                x2 = r2[k, col]
                r2[k - 1, col] = np.conj(cs) * x1 + np.conj(sn) * x2
                r2[k, col] = -sn * x1 + cs * x2
            r2[k, k - 1] = 0.0
            # (conj(aa)*aa + conj(bb)*bb)/rho is exactly rho; drop the
            # rounding dust so the diagonal stays real
            r2[k - 1, k - 1] = rho
            for row in range(m):
                y1 = q2[row, k - 1]
                y2 = q2[row, k]
                q2[row, k - 1] = y1 * cs + y2 * sn
                q2[row, k] = -np.conj(sn) * y1 + np.conj(cs) * y2
            dkk = r2[k, k]
            mag = np.sqrt(dkk.real * dkk.real + dkk.imag * dkk.imag)
            if mag > 0.0:
                ph = np.conj(dkk) / mag
                for col in range(k, m):
                    r2[k, col] = r2[k, col] * ph
                for row in range(m):
                    q2[row, k] = q2[row, k] * np.conj(ph)
                r2[k, k] = mag
            swaps += 1
            if k > 1:
                k -= 1
        else:
            k += 1
    return q2, r2, t, ti, swaps


@_kernel
def sesd_finite_kernel(r, rt, kmin, kmax, want_trace, trace_codes, trace_pd2):
    """Depth-first Schnorr-Euchner search over the finite box alphabet.

    Candidates at each level are the Gaussian integers with both parts in
    [kmin, kmax], pre-sorted by exact partial-distance increment (stable in
    lexicographic (re, im) order, so cost ties resolve to the smaller
    coordinate pair). Returns
    (x_re, x_im, best2, nodes, leaves, first2, trace_len, status)
    where status 1 flags trace overflow.
    """
    m = r.shape[0]
    span = kmax - kmin + 1
    nq = span * span
    cost = np.empty((m, nq))
    order = np.empty((m, nq), np.int64)
    pos = np.empty(m, np.int64)
    above = np.empty(m)
    sel = np.zeros(m, np.int64)
    railr = np.empty(span)
    raili = np.empty(span)
    xre = np.zeros(m, np.int64)
    xim = np.zeros(m, np.int64)
    bxre = np.zeros(m, np.int64)
    bxim = np.zeros(m, np.int64)
    best2 = np.inf
    have = False
    nodes = 0
    leaves = 0
    first2 = -1.0
    tlen = 0
    tcap = trace_codes.shape[0]
    status = 0

    idx = m - 1
    above[idx] = 0.0
    descend = True
    while True:
        if descend:
            y = rt[idx]
            for j in range(idx + 1, m):
                y = y - r[idx, j] * (xre[j] + 1j * xim[j])
            rii = r[idx, idx].real
            for s_ in range(span):
                dre = y.real - rii * (kmin + s_)
                railr[s_] = dre * dre
                dim = y.imag - rii * (kmin + s_)
                raili[s_] = dim * dim
            for ci in range(nq):
                cv = railr[ci // span] + raili[ci % span]
                cost[idx, ci] = cv
                j2 = ci
                while j2 > 0 and cost[idx, order[idx, j2 - 1]] > cv:
                    order[idx, j2] = order[idx, j2 - 1]
                    j2 -= 1
                order[idx, j2] = ci
            pos[idx] = 0
            descend = False
            continue
        p = pos[idx]
        if p == nq:
            idx += 1
            if idx == m:
                break
            continue
        pos[idx] = p + 1
        ci = order[idx, p]
        pd2 = above[idx] + cost[idx, ci]
        if have and pd2 >= best2:
            pos[idx] = nq
            continue
        nodes += 1
        if want_trace != 0:
            if tlen >= tcap:
                status = 1
                break
            code = np.int64(idx) | (np.int64(ci) << 4)
            shift = 4
            for j in range(idx + 1, m):
                shift += 6
                code |= np.int64(sel[j]) << shift
            trace_codes[tlen] = code
            trace_pd2[tlen] = pd2
            tlen += 1
        if idx == 0:
            leaves += 1
            best2 = pd2
            have = True
            if first2 < 0.0:
                first2 = pd2
            xre[0] = kmin + ci // span
            xim[0] = kmin + ci % span
            for j in range(m):
                bxre[j] = xre[j]
                bxim[j] = xim[j]
        else:
            sel[idx] = ci
            xre[idx] = kmin + ci // span
            xim[idx] = kmin + ci % span
            above[idx - 1] = pd2
            idx -= 1
            descend = True
    return bxre, bxim, best2, nodes, leaves, first2, tlen, status


@_kernel
def _zig(n0, plus_first, k):
    """k-th closest integer to a point whose nearest integer is n0."""
    if k == 0:
        return n0
    h = (k + 1) // 2
    if (k & 1) == 1:
        if plus_first:
            return n0 + h
        return n0 - h
    if plus_first:
        return n0 - h
    return n0 + h


@_kernel
def _heap_less(c1, u1, v1, c2, u2, v2):
    if c1 < c2:
        return True
    if c1 > c2:
        return False
    if u1 < u2:
        return True
    if u1 > u2:
        return False
    return v1 < v2


@_kernel
def sesd_relaxed_kernel(r, rt):
    """Depth-first Schnorr-Euchner search over all Gaussian-integer vectors.

    The countable child set of each level is realized lazily in ascending
    partial-distance order by merging one zig-zag per axis through a binary
    heap keyed on (cost, re, im). Returns
    (x_re, x_im, best2, nodes, leaves, first2, babai_re, babai_im)
    with the first leaf (the Babai point) reported alongside the optimum.
    """
    m = r.shape[0]
    cap = 128
    hc = np.empty((m, cap))
    hu = np.empty((m, cap), np.int64)
    hv = np.empty((m, cap), np.int64)
    hk = np.empty((m, cap), np.int64)
    hl = np.empty((m, cap), np.int64)
    hn = np.zeros(m, np.int64)
    cre = np.empty(m)
    cim = np.empty(m)
    rii2 = np.empty(m)
    n0r = np.empty(m, np.int64)
    n0i = np.empty(m, np.int64)
    pfr = np.zeros(m, np.bool_)
    pfi = np.zeros(m, np.bool_)
    above = np.empty(m)
    xre = np.zeros(m, np.int64)
    xim = np.zeros(m, np.int64)
    bxre = np.zeros(m, np.int64)
    bxim = np.zeros(m, np.int64)
    fxre = np.zeros(m, np.int64)
    fxim = np.zeros(m, np.int64)
    best2 = np.inf
    have = False
    nodes = 0
    leaves = 0
    first2 = -1.0

    idx = m - 1
    above[idx] = 0.0
    descend = True
    while True:
        if descend:
            y = rt[idx]
            for j in range(idx + 1, m):
                y = y - r[idx, j] * (xre[j] + 1j * xim[j])
            rii = r[idx, idx].real
            cre[idx] = y.real / rii
            cim[idx] = y.imag / rii
            rii2[idx] = rii * rii
            n0r[idx] = np.int64(np.rint(cre[idx]))
            n0i[idx] = np.int64(np.rint(cim[idx]))
            pfr[idx] = (cre[idx] - n0r[idx]) > 0.0
            pfi[idx] = (cim[idx] - n0i[idx]) > 0.0
            hn[idx] = 0
            u = n0r[idx]
            v = n0i[idx]
            du = cre[idx] - u
            dv = cim[idx] - v
            hc[idx, 0] = rii2[idx] * (du * du + dv * dv)
            hu[idx, 0] = u
            hv[idx, 0] = v
            hk[idx, 0] = 0
            hl[idx, 0] = 0
            hn[idx] = 1
            descend = False
            continue
        if hn[idx] == 0:
            idx += 1
            if idx == m:
                break
            continue
        if hn[idx] + 2 > cap:
            ncap = cap * 2
            nhc = np.empty((m, ncap))
            nhc[:, :cap] = hc
            hc = nhc
            nhu = np.empty((m, ncap), np.int64)
            nhu[:, :cap] = hu
            hu = nhu
            nhv = np.empty((m, ncap), np.int64)
            nhv[:, :cap] = hv
            hv = nhv
            nhk = np.empty((m, ncap), np.int64)
            nhk[:, :cap] = hk
            hk = nhk
            nhl = np.empty((m, ncap), np.int64)
            nhl[:, :cap] = hl
            hl = nhl
            cap = ncap
        # pop the minimum
        c = hc[idx, 0]
        u = hu[idx, 0]
        v = hv[idx, 0]
        kk = hk[idx, 0]
        ll = hl[idx, 0]
        n = hn[idx] - 1
        hc[idx, 0] = hc[idx, n]
        hu[idx, 0] = hu[idx, n]
        hv[idx, 0] = hv[idx, n]
        hk[idx, 0] = hk[idx, n]
        hl[idx, 0] = hl[idx, n]
        hn[idx] = n
        i = 0
        while True:
            lch = 2 * i + 1
            if lch >= n:
                break
            sm = lch
            rch = lch + 1
            if rch < n and _heap_less(hc[idx, rch], hu[idx, rch], hv[idx, rch],
                                      hc[idx, lch], hu[idx, lch], hv[idx, lch]):
                sm = rch
            if _heap_less(hc[idx, sm], hu[idx, sm], hv[idx, sm],
                          hc[idx, i], hu[idx, i], hv[idx, i]):
                hc[idx, i], hc[idx, sm] = hc[idx, sm], hc[idx, i]
                hu[idx, i], hu[idx, sm] = hu[idx, sm], hu[idx, i]
                hv[idx, i], hv[idx, sm] = hv[idx, sm], hv[idx, i]
                hk[idx, i], hk[idx, sm] = hk[idx, sm], hk[idx, i]
                hl[idx, i], hl[idx, sm] = hl[idx, sm], hl[idx, i]
                i = sm
            else:
                break
        # push the staircase successors (k+1, l) and, from the first
        # column only, (k, l+1): covers every (k, l) pair exactly once
        for step in range(2):
            if step == 0:
                nk = kk + 1
                nl = ll
            else:
                if kk != 0:
                    break
                nk = kk
                nl = ll + 1
            nu = _zig(n0r[idx], pfr[idx], nk)
            nv = _zig(n0i[idx], pfi[idx], nl)
            du = cre[idx] - nu
            dv = cim[idx] - nv
            nc = rii2[idx] * (du * du + dv * dv)
            i = hn[idx]
            hc[idx, i] = nc
            hu[idx, i] = nu
            hv[idx, i] = nv
            hk[idx, i] = nk
            hl[idx, i] = nl
            hn[idx] = i + 1
            while i > 0:
                par = (i - 1) // 2
                if _heap_less(hc[idx, i], hu[idx, i], hv[idx, i],
                              hc[idx, par], hu[idx, par], hv[idx, par]):
                    hc[idx, i], hc[idx, par] = hc[idx, par], hc[idx, i]
                    hu[idx, i], hu[idx, par] = hu[idx, par], hu[idx, i]
                    hv[idx, i], hv[idx, par] = hv[idx, par], hv[idx, i]
                    hk[idx, i], hk[idx, par] = hk[idx, par], hk[idx, i]
                    hl[idx, i], hl[idx, par] = hl[idx, par], hl[idx, i]
                    i = par
                else:
                    break
        pd2 = above[idx] + c
        if have and pd2 >= best2:
            hn[idx] = 0
            idx += 1
            if idx == m:
                break
            continue
        nodes += 1
        if idx == 0:
            leaves += 1
            best2 = pd2
            have = True
            xre[0] = u
            xim[0] = v
            if first2 < 0.0:
                first2 = pd2
                for j in range(m):
                    fxre[j] = xre[j]
                    fxim[j] = xim[j]
            for j in range(m):
                bxre[j] = xre[j]
                bxim[j] = xim[j]
        else:
            xre[idx] = u
            xim[idx] = v
            above[idx - 1] = pd2
            idx -= 1
            descend = True
    return bxre, bxim, best2, nodes, leaves, first2, fxre, fxim


@_kernel
def sic_kernel(r, rt, finite, kmin, kmax):
    """Nearest-plane back-substitution (Babai / SIC).

    finite != 0 clamps each rail to [kmin, kmax] after rounding. Returns
    (x_re, x_im, d2) with d2 the final squared residual.
    """
    m = r.shape[0]
    xre = np.zeros(m, np.int64)
    xim = np.zeros(m, np.int64)
    for idx in range(m - 1, -1, -1):
        y = rt[idx]
        for j in range(idx + 1, m):
            y = y - r[idx, j] * (xre[j] + 1j * xim[j])
        rii = r[idx, idx].real
        ure = np.int64(np.rint(y.real / rii))
        uim = np.int64(np.rint(y.imag / rii))
        if finite != 0:
            if ure < kmin:
                ure = kmin
            elif ure > kmax:
                ure = kmax
            if uim < kmin:
                uim = kmin
            elif uim > kmax:
                uim = kmax
        xre[idx] = ure
        xim[idx] = uim
    d2 = 0.0
    for i in range(m):
        e = rt[i]
        for j in range(i, m):
            e = e - r[i, j] * (xre[j] + 1j * xim[j])
        d2 += e.real * e.real + e.imag * e.imag
    return xre, xim, d2


def warmup():
    """Compile (or no-op) every kernel on a tiny instance."""
    r = np.eye(2, dtype=np.complex128)
    rt = np.array([0.2 + 0.1j, -0.3 + 0.4j])
    q, rr, perm, ok = sqrd_kernel(r)
    lll_kernel(q, rr, 0.75)
    dummy_c = np.empty(0, np.int64)
    dummy_p = np.empty(0)
    sesd_finite_kernel(r, rt, 0, 1, 0, dummy_c, dummy_p)
    sesd_relaxed_kernel(r, rt)
    sic_kernel(r, rt, 1, 0, 1)
