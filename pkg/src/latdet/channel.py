"""Random flat-fading channel draws and SNR bookkeeping.

The model is square MIMO: received = channel @ sent + noise, with channel
entries i.i.d. circularly symmetric complex Gaussian of unit variance and
the sent vector uniform over the constellation. With unit-energy symbols
the average signal power per receive antenna is m, so the per-entry
complex noise variance is n0 = m / 10^(snr_db/10).

Detection happens in grid coordinates: sent = (sent_grid - shift)/scale
turns the model into target = generator @ sent_grid + noise with
generator = channel / scale and target = received + generator @ shift_vec.
"""

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation


@dataclass(frozen=True, eq=False)
class ChannelInstance:
    """One realization: matrices, the transmitted vector in both domains,
    and the received vector in both coordinate systems.

    channel: m x m complex Gaussian matrix.
    generator: channel / scale, the lattice generator seen by detectors.
    sent: transmitted symbols, modulated domain.
    sent_grid: the same symbols in grid coordinates (exact Gaussian ints).
    received: channel @ sent + noise.
    target: received vector shifted into grid coordinates.
    noise_var: per-entry complex noise variance n0.
    """

    channel: np.ndarray
    generator: np.ndarray
    sent: np.ndarray
    sent_grid: np.ndarray
    received: np.ndarray
    target: np.ndarray
    noise_var: float


def noise_variance(m, snr_db):
    return m / (10.0 ** (snr_db / 10.0))

def trial_rng(seed, snr_index, trial):
    """Independent, reproducible substream for one (snr, trial) cell."""
    ss = np.random.SeedSequence(seed, spawn_key=(snr_index, trial))
    return np.random.default_rng(ss)


def draw(rng_stream, m, cst, snr_db):
    """Draw one channel/symbol/noise realization.

    The draw order (channel, symbols, noise) is fixed; tests rely on it
    for reproducibility.
    """
    hre = rng_stream.standard_normal((m, m))
    him = rng_stream.standard_normal((m, m))
    h = (hre + 1j * him) * np.sqrt(0.5)
    idx = rng_stream.integers(0, cst.root, (m, 2))
    sent = cst.rail_levels[idx[:, 0]] + 1j * cst.rail_levels[idx[:, 1]]
    sent_grid = idx[:, 0] + 1j * idx[:, 1]
    n0 = noise_variance(m, snr_db)
    nre = rng_stream.standard_normal(m)
    nim = rng_stream.standard_normal(m)
    noise = (nre + 1j * nim) * np.sqrt(n0 / 2.0)
    received = h @ sent + noise
    g = h / cst.scale
    shift_vec = np.full(m, cst.shift)
    target = received + g @ shift_vec
    return ChannelInstance(
        channel=h,
        generator=g,
        sent=sent,
        sent_grid=sent_grid,
        received=received,
        target=target,
        noise_var=n0,
    )
