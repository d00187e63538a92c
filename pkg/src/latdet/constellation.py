"""Square-QAM alphabets and their integer-grid representation.

Two coordinate systems appear throughout the package:

* the modulated domain: unit-average-energy square QAM points, the symbols
  actually transmitted;
* the grid domain: the same points after the affine transform
  ``grid = scale * symbol + shift``, which lands them on the Gaussian
  integers {k_min..k_max} + i{k_min..k_max} with k_min = 0.

Vectors that are Gaussian-integer valued but stray outside that box are
tagged "relaxed". Bit labeling is Gray per rail (real and imaginary parts
independently), with the all-zero label on the most negative corner.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, LengthMismatch, UnsupportedOrder

_ORDERS = (4, 16, 64)


@dataclass(frozen=True, eq=False)
class SymbolVector:
    """A complex symbol vector plus the domain its entries live in.

    domain is one of "modulated", "grid", "relaxed".
    """

    entries: np.ndarray
    domain: str


@dataclass(frozen=True, eq=False)
class Constellation:
    qam_order: int
    root: int
    bits_per_symbol: int
    scale: float
    shift: complex
    k_min: int
    k_max: int
    avg_energy: float
    rail_levels: np.ndarray


def build(qam_order):
    """Construct a square-QAM constellation of the given order.

    The modulated alphabet is normalized to unit average energy; the grid
    transform is chosen so that grid coordinates run 0..sqrt(order)-1 on
    each rail.
    """
    if qam_order not in _ORDERS:
        raise UnsupportedOrder(f"qam_order must be one of {_ORDERS}, got {qam_order!r}")
    root = int(round(qam_order ** 0.5))
    norm = float(np.sqrt(2.0 * (qam_order - 1) / 3.0))
    rail = (2.0 * np.arange(root) - root + 1.0) / norm
    scale = norm / 2.0
    shift = ((root - 1) / 2.0) * (1.0 + 1.0j)
    energy = float(np.mean(rail**2) * 2.0)
    return Constellation(
        qam_order=qam_order,
        root=root,
        bits_per_symbol=2 * int(np.log2(root)),
        scale=scale,
        shift=shift,
        k_min=0,
        k_max=root - 1,
        avg_energy=energy,
        rail_levels=rail,
    )


def _entries(s):
    if isinstance(s, SymbolVector):
        s = s.entries
    return np.asarray(s, dtype=np.complex128)


def map_to_lattice(s, cst):
    """Affine map from modulated symbols to grid coordinates.

    Every entry must be a constellation point (within 1e-9); the result is
    exact Gaussian integers stored as complex floats.

    Raises DomainError for entries that are not constellation points.
    """
    v = _entries(s)
    z = cst.scale * v + cst.shift
    g = np.rint(z.real) + 1j * np.rint(z.imag)
    back = (g - cst.shift) / cst.scale
    bad = np.abs(v - back) > 1e-9
    bad |= (g.real < cst.k_min) | (g.real > cst.k_max)
    bad |= (g.imag < cst.k_min) | (g.imag > cst.k_max)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DomainError(f"entry {i} ({v[i]}) is not a constellation point")
    return SymbolVector(entries=g, domain="grid")


def unmap_from_lattice(x, cst):
    """Inverse of map_to_lattice; accepts any Gaussian-integer vector."""
    v = _entries(x)
    return SymbolVector(entries=(v - cst.shift) / cst.scale, domain="modulated")


def contains(x, cst):
    """True iff every entry's rails lie inside [k_min, k_max]."""
    v = _entries(x)
    ok = (v.real >= cst.k_min) & (v.real <= cst.k_max)
    ok &= (v.imag >= cst.k_min) & (v.imag <= cst.k_max)
    return bool(np.all(ok))


def _gray(u):
    return u ^ (u >> 1)


def _gray_inv(g):
    u = 0
    while g:
        u ^= g
        g >>= 1
    return u


def bits_to_symbols(bits, cst):
    """Gray-demap a bit string into modulated symbols.

    Per symbol the first half of the bits addresses the real rail, the
    second half the imaginary rail, MSB first. The all-zero label is the
    most negative corner point.
    """
    b = np.asarray(bits).ravel().astype(np.int64)
    k = cst.bits_per_symbol // 2
    if b.size == 0 or b.size % (2 * k) != 0:
        raise LengthMismatch(
            f"bit count {b.size} is not a positive multiple of {2 * k}")
    m = b.size // (2 * k)
    out = np.empty(m, dtype=np.complex128)
    for i in range(m):
        chunk = b[i * 2 * k:(i + 1) * 2 * k]
        gre = 0
        gim = 0
        for j in range(k):
            gre = (gre << 1) | int(chunk[j])
            gim = (gim << 1) | int(chunk[k + j])
        u = _gray_inv(gre)
        v = _gray_inv(gim)
        out[i] = cst.rail_levels[u] + 1j * cst.rail_levels[v]
    return SymbolVector(entries=out, domain="modulated")


def symbols_to_bits(s, cst):
    """Gray-map modulated symbols back to bits (inverse of bits_to_symbols)."""
    grid = map_to_lattice(s, cst).entries
    k = cst.bits_per_symbol // 2
    out = np.empty(grid.size * 2 * k, dtype=np.int64)
    pos = 0
    for e in grid:
        gre = _gray(int(e.real))
        gim = _gray(int(e.imag))
        for j in range(k - 1, -1, -1):
            out[pos] = (gre >> j) & 1
            pos += 1
        for j in range(k - 1, -1, -1):
            out[pos] = (gim >> j) & 1
            pos += 1
    return out


def bits_roundtrip(bits, cst):
    """Map bits to symbols and demap back; returns (symbols, recovered_bits).

    The recovered bits always equal the input; the pair is returned so
    callers can assert the round trip in one call.
    """
    s = bits_to_symbols(bits, cst)
    return s, symbols_to_bits(s, cst)


def bit_distance(x_a, x_b, cst):
    """Number of differing Gray-label bits between two grid-domain vectors."""
    va = _entries(x_a)
    vb = _entries(x_b)
    if va.shape != vb.shape:
        raise LengthMismatch("vectors differ in length")
    total = 0
    for ea, eb in zip(va, vb):
        total += bin(_gray(int(ea.real)) ^ _gray(int(eb.real))).count("1")
        total += bin(_gray(int(ea.imag)) ^ _gray(int(eb.imag))).count("1")
    return total
