"""Complex dense linear algebra shared by the detectors.

Matrices are plain complex128 ndarrays (row-major, square throughout).
QR factors always carry a real non-negative diagonal in R, with any phase
absorbed into Q, so triangular back-substitutions can treat the diagonal
as positive reals.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import RankDeficient

#: Alias for documentation purposes; any square complex128 ndarray qualifies.
ComplexMatrix = np.ndarray

RANK_TOL = 1e-12


@dataclass(frozen=True)
class QrFactorization:
    """QR factors of a (possibly column-permuted) square matrix.

    q: unitary M x M.
    r: upper-triangular M x M, real non-negative diagonal.
    perm: column order, i.e. g[:, perm] == q @ r. Identity for plain QR.
    """

    q: np.ndarray
    r: np.ndarray
    perm: np.ndarray


def _as_square_complex(g):
    a = np.ascontiguousarray(g, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def qrd(g):
    """Plain QR with the R diagonal normalized to real non-negative.

    Raises RankDeficient when any diagonal entry of R falls below the
    rank tolerance.
    """
    a = _as_square_complex(g)
    m = a.shape[0]
    q, r = np.linalg.qr(a)
    d = np.diagonal(r).copy()
    mag = np.abs(d)
    if np.any(mag < RANK_TOL):
        raise RankDeficient(f"R diagonal below {RANK_TOL:g}")
    ph = d / mag
    q = q * ph[np.newaxis, :]
    r = r * np.conj(ph)[:, np.newaxis]
    # the scaled diagonal is real by construction; drop rounding dust
    r[np.diag_indices(m)] = mag
    return QrFactorization(q=q, r=r, perm=np.arange(m))


def sqrd(g):
    """Sorted QR: greedy minimum-residual-norm column pivoting.

    Returns factors with g[:, perm] == q @ r. Ties between residual norms
    go to the lowest original column index.
    """
    a = _as_square_complex(g)
    q, r, perm, bad = _kernels.sqrd_kernel(a)
    if bad:
        raise RankDeficient(f"residual norm below {RANK_TOL:g} during pivoted QR")
    return QrFactorization(q=q, r=r, perm=perm)


def sigma_max(r):
    """Largest singular value of a complex matrix (0 for the zero matrix)."""
    a = np.asarray(r, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def gram_det(r_i):
    """Gram determinant of an upper-triangular factor: prod of squared
    diagonal entries."""
    d = np.real(np.diagonal(np.asarray(r_i)))
    return float(np.prod(d * d))
