"""QPSK mapping and the OFDM modulator/demodulator with ZP or CP guards.

All transforms are unitary (``norm="ortho"``). Arrays carry symbols along
the last axis, so every function also accepts a batch of OFDM symbols.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grid import SubcarrierGrid

_SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class OfdmParams:
    """Numerology of the OFDM link.

    Attributes
    ----------
    fft_size : int
        Transform size; a power of two.
    guard : {'zp', 'cp'}
        Zero padding (appended) or cyclic prefix (prepended).
    guard_len : int
        Guard length in samples, smaller than ``fft_size``.
    subcarrier_spacing_hz : float
    oversample : int
        Zero-padding factor of the PSD estimator only.
    """

    fft_size: int = 512
    guard: Literal["zp", "cp"] = "zp"
    guard_len: int = 36
    subcarrier_spacing_hz: float = 15e3
    oversample: int = 8

    def __post_init__(self):
        n = self.fft_size
        if n < 2 or n & (n - 1):
            raise ValueError(f"fft_size must be a power of two, got {n}")
        if self.guard not in ("zp", "cp"):
            raise ValueError(f"guard must be 'zp' or 'cp', got {self.guard!r}")
        if not 0 <= self.guard_len < n:
            raise ValueError(f"guard_len must lie in [0, {n}), got {self.guard_len}")
        if self.oversample < 1:
            raise ValueError("oversample must be at least 1")
        if self.subcarrier_spacing_hz <= 0:
            raise ValueError("subcarrier_spacing_hz must be positive")

    @property
    def symbol_len(self) -> int:
        return self.fft_size + self.guard_len

    @property
    def sample_rate_hz(self) -> float:
        return self.fft_size * self.subcarrier_spacing_hz


def carrier_bins(grid: SubcarrierGrid, params: OfdmParams) -> np.ndarray:
    """FFT bin of every employed carrier (negative indices wrap)."""
    half = params.fft_size // 2
    lo, hi = grid.band_edges
    if lo < -half or hi >= half:
        raise ValueError(f"carriers [{lo}, {hi}] do not fit an FFT of size {params.fft_size}")
    return grid.carriers % params.fft_size


def qpsk_modulate(bits) -> np.ndarray:
    """Gray-mapped unit-energy QPSK: bit pair (b0, b1) -> ((1-2b0) + 1j(1-2b1))/sqrt(2)."""
    bits = np.asarray(bits)
    if bits.shape[-1] % 2:
        raise ValueError("QPSK needs an even number of bits")
    b = bits.reshape(bits.shape[:-1] + (-1, 2)).astype(float)
    return ((1 - 2 * b[..., 0]) + 1j * (1 - 2 * b[..., 1])) * _SQRT_HALF


def qpsk_demodulate(symbols) -> np.ndarray:
    """Nearest-point hard decisions; inverse of :func:`qpsk_modulate`."""
    s = np.asarray(symbols)
    bits = np.stack([s.real < 0, s.imag < 0], axis=-1).astype(np.int8)
    return bits.reshape(s.shape[:-1] + (-1,))


def ofdm_modulate(s, grid: SubcarrierGrid, params: OfdmParams) -> np.ndarray:
    """Map carrier values to time samples and add the guard interval.

    Parameters
    ----------
    s : array_like, shape (..., M)
    """
    s = np.asarray(s)
    if s.shape[-1:] != (grid.M,):
        raise ValueError(f"expected last dimension {grid.M}, got shape {s.shape}")
    X = np.zeros(s.shape[:-1] + (params.fft_size,), dtype=complex)
    X[..., carrier_bins(grid, params)] = s
    x = np.fft.ifft(X, norm="ortho")
    G = params.guard_len
    if G == 0:
        return x
    if params.guard == "cp":
        return np.concatenate([x[..., -G:], x], axis=-1)
    return np.concatenate([x, np.zeros(x.shape[:-1] + (G,), dtype=complex)], axis=-1)


def ofdm_demodulate(y, grid: SubcarrierGrid, params: OfdmParams) -> np.ndarray:
    """Receive front end: guard handling, FFT, carrier extraction.

    A ZP guard is overlap-added onto the head of the symbol, which turns a
    channel no longer than the guard into a circular convolution; a CP is
    simply discarded.
    """
    y = np.asarray(y)
    if y.shape[-1] != params.symbol_len:
        raise ValueError(f"expected {params.symbol_len} samples per symbol, got {y.shape[-1]}")
    n, G = params.fft_size, params.guard_len
    if params.guard == "cp":
        body = y[..., G:]
    else:
        body = np.array(y[..., :n], dtype=complex)
        body[..., :G] += y[..., n:]
    return np.fft.fft(body, norm="ortho")[..., carrier_bins(grid, params)]
