"""Tree-search detectors on triangular systems.

All searches operate on an upper-triangular factor with positive real
diagonal and a rotated target vector, i.e. the system
``target ~= r_mat @ x`` with x ranging over either the finite grid box of
a constellation or over all Gaussian-integer vectors. Levels are indexed
m-1 (decided first) down to 0; a leaf fixes the full vector.

Node counting convention (shared by both depth-first searches): a node is
counted when its partial distance has been computed and it satisfies the
sphere constraint in effect at that moment. The constraint starts at
infinity and shrinks to the distance of each leaf found; after the first
leaf, survival requires strictly smaller partial distance. Leaves count,
the root does not.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .constellation import Constellation
from .errors import DomainError, TooLarge


@dataclass(frozen=True, eq=False)
class SearchProblem:
    """Triangular search instance.

    cst is None for the relaxed (all Gaussian integers) domain, or the
    Constellation whose grid box constrains the finite search.
    """

    r_mat: np.ndarray
    target: np.ndarray
    m: int
    cst: Optional[Constellation] = None

    @property
    def domain(self):
        return "finite" if self.cst is not None else "infinite"


@dataclass(frozen=True, eq=False)
class TraceNode:
    """One counted node of an instrumented search."""

    level: int
    coords: tuple
    pd: float


@dataclass(frozen=True, eq=False)
class DetectionResult:
    solution: np.ndarray
    distance: float
    nodes_visited: int
    leaf_count: int
    first_leaf: Optional[np.ndarray] = None
    first_leaf_distance: Optional[float] = None
    trace: Optional[list] = None


def problem_from_factors(r_mat, q, target, cst=None):
    """Rotate a target into triangular coordinates and bundle a problem."""
    r = np.ascontiguousarray(r_mat, dtype=np.complex128)
    rt = np.conj(q.T) @ np.asarray(target, dtype=np.complex128)
    return SearchProblem(r_mat=r, target=np.ascontiguousarray(rt),
                         m=r.shape[0], cst=cst)


def _decode_trace(codes, pd2, m, kmin, span):
    out = []
    for code, d2 in zip(codes, pd2):
        code = int(code)
        idx = code & 15
        coords = []
        shift = 4
        for j in range(idx, m):
            ci = (code >> shift) & 63
            coords.append(complex(kmin + ci // span, kmin + ci % span))
            shift += 6
        out.append(TraceNode(level=idx, coords=tuple(coords), pd=math.sqrt(d2)))
    return out


def sesd_finite(p: SearchProblem, want_trace=False, trace_cap=65536):
    """Depth-first sphere search over the constellation grid box.

    Exact ML on the finite lattice; ties go to the first leaf found under
    the ascending partial-distance child order. With want_trace, every
    counted node is recorded as a TraceNode (level, fixed coordinates
    top-down, partial distance).
    """
    if p.cst is None:
        raise DomainError("finite search needs a constellation")
    cap = trace_cap if want_trace else 0
    codes = np.empty(cap, np.int64)
    pd2 = np.empty(cap, np.float64)
    r = np.ascontiguousarray(p.r_mat, dtype=np.complex128)
    rt = np.ascontiguousarray(p.target, dtype=np.complex128)
    bxre, bxim, best2, nodes, leaves, first2, tlen, status = \
        _kernels.sesd_finite_kernel(r, rt, p.cst.k_min, p.cst.k_max,
                                    1 if want_trace else 0, codes, pd2)
    if status:
        raise TooLarge(f"search trace exceeded {trace_cap} nodes")
    trace = None
    if want_trace:
        span = p.cst.k_max - p.cst.k_min + 1
        trace = _decode_trace(codes[:tlen], pd2[:tlen], p.m, p.cst.k_min, span)
    return DetectionResult(
        solution=bxre + 1j * bxim,
        distance=math.sqrt(best2),
        nodes_visited=int(nodes),
        leaf_count=int(leaves),
        first_leaf_distance=math.sqrt(first2),
        trace=trace,
    )


def sesd_relaxed(p: SearchProblem):
    """Depth-first sphere search over all Gaussian-integer vectors.

    The first leaf reached is the successive-rounding (Babai) point; it is
    reported alongside the optimum so callers can check radius guarantees.
    """
    r = np.ascontiguousarray(p.r_mat, dtype=np.complex128)
    rt = np.ascontiguousarray(p.target, dtype=np.complex128)
    bxre, bxim, best2, nodes, leaves, first2, fxre, fxim = \
        _kernels.sesd_relaxed_kernel(r, rt)
    return DetectionResult(
        solution=bxre + 1j * bxim,
        distance=math.sqrt(best2),
        nodes_visited=int(nodes),
        leaf_count=int(leaves),
        first_leaf=fxre + 1j * fxim,
        first_leaf_distance=math.sqrt(first2),
    )


def babai_sic(p: SearchProblem):
    """Successive nearest-plane rounding, one node per level.

    In the finite domain each rail is clamped onto the grid box after
    rounding.
    """
    r = np.ascontiguousarray(p.r_mat, dtype=np.complex128)
    rt = np.ascontiguousarray(p.target, dtype=np.complex128)
    if p.cst is not None:
        xre, xim, d2 = _kernels.sic_kernel(r, rt, 1, p.cst.k_min, p.cst.k_max)
    else:
        xre, xim, d2 = _kernels.sic_kernel(r, rt, 0, 0, 0)
    sol = xre + 1j * xim
    return DetectionResult(
        solution=sol,
        distance=math.sqrt(d2),
        nodes_visited=p.m,
        leaf_count=1,
        first_leaf=sol,
        first_leaf_distance=math.sqrt(d2),
    )


def brute_force_ml(generator, target, cst):
    """Exhaustive argmin over the full grid box (desk-scale oracle).

    Ties break lexicographically on the (Re, Im) coordinate sequence,
    which is the enumeration order.
    """
    g = np.asarray(generator, dtype=np.complex128)
    t = np.asarray(target, dtype=np.complex128)
    m = g.shape[0]
    if cst.qam_order ** m > 10 ** 6:
        raise TooLarge(f"{cst.qam_order}^{m} candidates exceed the oracle guard")
    rail = range(cst.k_min, cst.k_max + 1)
    entry = [complex(a, b) for a, b in itertools.product(rail, rail)]
    cands = np.array(list(itertools.product(entry, repeat=m)))
    return _argmin_candidate(g, t, cands)


def relaxed_box(r_mat, babai_point, radius=None):
    """Per-entry half-widths guaranteed to contain every Gaussian-integer
    point at least as close to the target as the Babai point.

    Back-substitution bound: any candidate x with residual not above the
    Babai residual satisfies ||r_mat @ (x - babai)|| <= 2 * radius, and the
    triangular cascade turns that into coordinate-wise ranges. The default
    radius is the analytic guarantee sqrt(half the squared-diagonal sum);
    passing the actual Babai residual instead (never larger) tightens the
    box without losing any qualifying point.
    """
    r = np.asarray(r_mat)
    m = r.shape[0]
    diag = np.real(np.diagonal(r))
    if radius is None:
        radius = math.sqrt(0.5 * float(np.sum(diag * diag)))
    half = np.zeros(m)
    for j in range(m - 1, -1, -1):
        slack = 2.0 * float(radius)
        for k in range(j + 1, m):
            slack += abs(r[j, k]) * half[k]
        half[j] = slack / diag[j]
    b = np.asarray(babai_point)
    bounds = np.empty((m, 4), dtype=np.int64)
    for j in range(m):
        h = int(math.ceil(half[j]))
        bounds[j] = (int(b[j].real) - h, int(b[j].real) + h,
                     int(b[j].imag) - h, int(b[j].imag) + h)
    return bounds


def brute_force_relaxed(generator, target, box_bounds, guard=10 ** 6):
    """Exhaustive argmin over an explicit Gaussian-integer box."""
    g = np.asarray(generator, dtype=np.complex128)
    t = np.asarray(target, dtype=np.complex128)
    m = g.shape[0]
    bb = np.asarray(box_bounds, dtype=np.int64)
    total = 1
    for j in range(m):
        total *= (bb[j, 1] - bb[j, 0] + 1) * (bb[j, 3] - bb[j, 2] + 1)
        if total > guard:
            raise TooLarge("relaxed oracle box exceeds the enumeration guard")
    entries = []
    for j in range(m):
        re = range(int(bb[j, 0]), int(bb[j, 1]) + 1)
        im = range(int(bb[j, 2]), int(bb[j, 3]) + 1)
        entries.append([complex(a, b) for a, b in itertools.product(re, im)])
    cands = np.array(list(itertools.product(*entries)))
    return _argmin_candidate(g, t, cands)


def _argmin_candidate(g, t, cands):
    # first minimum wins, so the lexicographic enumeration order above
    # doubles as the tie-break
    d2 = np.sum(np.abs(t[np.newaxis, :] - cands @ g.T) ** 2, axis=1)
    return cands[int(np.argmin(d2))]
