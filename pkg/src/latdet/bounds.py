"""Analytic node-count bounds and search-radius guarantees.

Three families:

* a low-SNR floor: once the final search radius exceeds
  ``noise_norm - sigma_max * k_const`` every node inside that radius must
  have been visited, and in the zero-SNR limit the finite search count
  approaches the closed-form geometric sum over all tree levels;
* the successive-rounding radius: the first leaf of the relaxed search is
  never farther than babai_radius(R) from the rotated target;
* a volume-quotient ceiling on the relaxed search: counting lattice points
  of every level inside balls of radius babai_radius + cover_radius,
  via complex-dimension ball volumes over Gram determinants.
"""

import math
from dataclasses import dataclass

import numpy as np

from .detectors import SearchProblem
from .errors import TooLarge
from .numerics import gram_det


@dataclass(frozen=True, eq=False)
class BoundReport:
    """Per-instance bound values.

    r_min_lower: lower bound on the final search radius (may be negative).
    k_const: diameter of the finite symbol set, grid units.
    babai_rad: radius guarantee for the first relaxed leaf.
    cover_radii: per-level covering-radius bounds, cover_radii[0] = babai_rad.
    nodes_upper: volume-quotient ceiling for the relaxed search (real).
    nodes_low_snr: closed-form finite-search count in the zero-SNR limit.
    """

    r_min_lower: float
    k_const: float
    babai_rad: float
    cover_radii: np.ndarray
    nodes_upper: float
    nodes_low_snr: int


def k_const(cst, m):
    """Largest distance between two grid-domain symbol vectors."""
    if m < 1:
        raise ValueError("m must be at least 1")
    side = cst.k_max - cst.k_min
    return math.sqrt(2.0 * m) * side


def r_min_lower_bound(noise_norm, sigma_max, k):
    """Floor for the final search radius; negative means no guarantee."""
    if noise_norm < 0 or sigma_max < 0 or k < 0:
        raise ValueError("arguments must be non-negative")
    return noise_norm - sigma_max * k


def low_snr_node_count(alphabet_size, m):
    """Exact node count of the exhausted finite tree: sum of |alphabet|^k
    over k = 1..m, as the closed-form geometric quotient."""
    if alphabet_size < 2:
        raise ValueError("alphabet_size must be at least 2")
    if m < 1:
        raise ValueError("m must be at least 1")
    if alphabet_size ** m > 2 ** 63:
        raise TooLarge("node count would overflow 64-bit counters")
    return (alphabet_size ** m - 1) // (alphabet_size - 1)


def babai_radius(r_mat):
    """sqrt of half the squared-diagonal sum of the triangular factor."""
    d = np.real(np.diagonal(np.asarray(r_mat)))
    return math.sqrt(0.5 * float(np.sum(d * d)))


def ball_volume(k, radius):
    """Volume of a k-complex-dimensional ball (2k real dimensions)."""
    return math.pi ** k * radius ** (2 * k) / math.factorial(k)


def cover_radii(r_mat):
    """Per-level covering-radius bounds: trailing-diagonal partial sums."""
    d = np.real(np.diagonal(np.asarray(r_mat)))
    tail = np.cumsum((d * d)[::-1])[::-1]
    return np.sqrt(0.5 * tail)


def relaxed_complexity_upper_bound(r_mat, refined=False):
    """Volume-quotient ceiling on relaxed-search nodes.

    Sums, over tree levels, the volume of a ball of radius
    babai_rad + cover_radius around the target divided by the Gram
    determinant of the level's sublattice. With refined=True the top
    level contributes exactly 1 instead of its volume term, which is
    valid for diagonal factors (the search walks straight to its single
    leaf on that level).
    """
    r = np.asarray(r_mat)
    m = r.shape[0]
    beta = babai_radius(r)
    gam = cover_radii(r)
    total = 1.0 if refined else 0.0
    start = 1 if refined else 0
    for i in range(start, m):
        lev = m - i
        vol = ball_volume(lev, beta + gam[i])
        total += vol / gram_det(r[i:, i:])
    return total


def build_report(r_mat, cst, noise_norm):
    """Evaluate every bound for one search instance."""
    from .numerics import sigma_max as smax

    r = np.asarray(r_mat)
    m = r.shape[0]
    k = k_const(cst, m)
    return BoundReport(
        r_min_lower=r_min_lower_bound(noise_norm, smax(r), k),
        k_const=k,
        babai_rad=babai_radius(r),
        cover_radii=cover_radii(r),
        nodes_upper=relaxed_complexity_upper_bound(r),
        nodes_low_snr=low_snr_node_count(cst.qam_order, m),
    )


def visitation_check(problem: SearchProblem, trace, report: BoundReport):
    """True iff every finite-tree node within the guaranteed radius floor
    appears in the instrumented trace.

    Exhaustively enumerates the tree, so the instance is capped at m <= 3.
    """
    m = problem.m
    if m > 3:
        raise TooLarge("exhaustive node enumeration is capped at m = 3")
    thresh = max(0.0, report.r_min_lower)
    if thresh == 0.0:
        return True
    visited = {(node.level, node.coords) for node in trace}
    cst = problem.cst
    rail = range(cst.k_min, cst.k_max + 1)
    entry = [complex(a, b) for a, b in
             ((a, b) for a in rail for b in rail)]
    r = problem.r_mat
    rt = problem.target
    t2 = thresh * thresh

    def expand(idx, coords, pd2):
        # coords holds x_idx..x_{m-1}, deepest decided level first
        for e in entry:
            cur = (e,) + coords
            y = rt[idx]
            for j in range(idx + 1, m):
                y -= r[idx, j] * cur[j - idx]
            y -= r[idx, idx] * e
            d2 = pd2 + y.real * y.real + y.imag * y.imag
            if d2 <= t2:
                if (idx, cur) not in visited:
                    return False
                if idx > 0 and not expand(idx - 1, cur, d2):
                    return False
        return True

    return expand(m - 1, (), 0.0)
