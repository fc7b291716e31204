"""Real-valued sidelobe envelope model used for precoder design.

The envelope of carrier ``m`` at out-of-band frequency ``w`` is
``1 / |w - w_m|`` (constant factors and the common phase term dropped).
All quantities here are relative; only ratios and dB differences are
meaningful.
"""

import numpy as np

from .grid import SubcarrierGrid


def magnitude_envelope(omega, omega_m):
    """Envelope ``1/|omega - omega_m|``; broadcasts over array arguments.

    Raises
    ------
    ValueError
        If any ``omega`` coincides with ``omega_m`` (the envelope is singular).
    """
    diff = np.abs(np.subtract(omega, omega_m, dtype=float))
    if np.any(diff == 0):
        raise ValueError("envelope is singular at the carrier frequency")
    out = 1.0 / diff
    return float(out) if np.ndim(out) == 0 else out


def frequency_set(freqs, grid: SubcarrierGrid = None) -> np.ndarray:
    """Validate and sort a set of out-of-band frequencies.

    Parameters
    ----------
    freqs : array_like
        Normalized frequencies (units of subcarrier spacing).
    grid : SubcarrierGrid, optional
        When given, every frequency must differ from every employed carrier.
    """
    fs = np.sort(np.atleast_1d(np.asarray(freqs, dtype=float)))
    if fs.ndim != 1:
        raise ValueError("a frequency set must be one-dimensional")
    if not np.all(np.isfinite(fs)):
        raise ValueError("frequencies must be finite")
    if grid is not None and fs.size:
        hits = np.intersect1d(fs, grid.carriers.astype(float))
        if hits.size:
            raise ValueError(f"frequencies {hits.tolist()} coincide with employed carriers")
    fs.setflags(write=False)
    return fs


def response_matrix(freqs, grid: SubcarrierGrid) -> np.ndarray:
    """Envelope matrix with entry ``(i, j) = 1/|freqs[i] - carriers[j]|``.

    Rows follow the order of ``freqs`` as given; columns follow the grid order.
    """
    fs = np.atleast_1d(np.asarray(freqs, dtype=float))
    diff = np.abs(np.subtract.outer(fs, grid.carriers.astype(float)))
    if np.any(diff == 0):
        bad = fs[np.any(diff == 0, axis=1)]
        raise ValueError(f"frequencies {bad.tolist()} coincide with employed carriers")
    return 1.0 / diff


def envelope_oob_power(P, freqs, grid: SubcarrierGrid) -> np.ndarray:
    """Expected envelope power ``E|c^T P d|^2`` at each frequency.

    Symbols are taken as unit-power and uncorrelated, so the expectation is
    the squared norm of the row ``c^T P``.
    """
    P = np.asarray(P)
    if P.shape != (grid.M, grid.N):
        raise ValueError(f"P must be {grid.M}x{grid.N}, got shape {P.shape}")
    CP = response_matrix(freqs, grid) @ P
    return np.sum(np.abs(CP) ** 2, axis=1)
