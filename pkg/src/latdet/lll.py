"""Complex LLL reduction on QR factors.

reduce() takes the factorization of a generator matrix (columns possibly
pre-sorted) and returns an equivalent basis of the same infinite lattice:
basis = generator_in_perm_order @ transform, with a unimodular
Gaussian-integer transform. The transform inverse is maintained
incrementally in exact integer arithmetic rather than inverted after the
fact, because membership decisions downstream must not hinge on float
rounding.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .numerics import QrFactorization


@dataclass(frozen=True, eq=False)
class ReducedBasis:
    """LLL output: reduced basis, unimodular coordinate change, QR factors.

    basis: the reduced generator (q @ r).
    transform, transform_inv: exact Gaussian-integer matrices (stored as
        complex floats) with basis = source @ transform, in the column
        order given by perm.
    q, r: QR factors of basis, diagonal of r real and positive.
    perm: column permutation inherited from the input factorization.
    swaps: number of column swaps the reduction performed.
    """

    basis: np.ndarray
    transform: np.ndarray
    transform_inv: np.ndarray
    q: np.ndarray
    r: np.ndarray
    perm: np.ndarray
    swaps: int


def reduce(qr: QrFactorization, delta: float = 0.75) -> ReducedBasis:
    """LLL-reduce the lattice described by the given QR factors."""
    if not 0.25 < delta < 1.0:
        raise ValueError(f"delta must lie in (1/4, 1), got {delta}")
    q2, r2, t, ti, swaps = _kernels.lll_kernel(qr.q, qr.r, delta)
    t = np.rint(t.real) + 1j * np.rint(t.imag)
    ti = np.rint(ti.real) + 1j * np.rint(ti.imag)
    return ReducedBasis(
        basis=q2 @ r2,
        transform=t,
        transform_inv=ti,
        q=q2,
        r=r2,
        perm=qr.perm,
        swaps=int(swaps),
    )


def _int_apply(mat, vec):
    # exact: entries are small integers, products stay far below 2**53
    v = np.asarray(vec, dtype=np.complex128)
    out = mat @ v
    return np.rint(out.real) + 1j * np.rint(out.imag)


def to_reduced_coords(x_candidate, rb: ReducedBasis):
    """Coordinates of a lattice point in the reduced basis.

    Operates in the basis's own column order (apply perm before calling
    when starting from unsorted coordinates).
    """
    return _int_apply(rb.transform_inv, x_candidate)


def from_reduced_coords(z, rb: ReducedBasis):
    """Inverse of to_reduced_coords."""
    return _int_apply(rb.transform, z)
