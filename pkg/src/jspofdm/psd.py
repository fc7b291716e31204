"""Periodogram PSD estimation of precoded OFDM and the envelope metrics built on it."""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grid import SubcarrierGrid
from .ofdm import OfdmParams, ofdm_modulate, qpsk_modulate
from .parallel import ordered_chunks
from .precoder import Precoder, identity_precoder

_CHUNK_SAMPLES = 1 << 21


@dataclass(frozen=True, eq=False)
class PsdEstimate:
    """Averaged periodogram on a grid of normalized frequencies.

    ``psd_db`` is normalized to a 0 dB peak; ``peak_power`` keeps the linear
    peak so estimates of different signals can be compared on one scale.
    """

    freq: np.ndarray
    psd_db: np.ndarray
    n_symbols: int
    oversample: int
    peak_power: float

    @property
    def power(self) -> np.ndarray:
        """Linear power on the common (un-normalized) scale."""
        return self.peak_power * 10.0 ** (self.psd_db / 10)

    @property
    def abs_db(self) -> np.ndarray:
        return self.psd_db + 10 * np.log10(self.peak_power)

    def envelope_db(self, freqs, half_width=0.5) -> np.ndarray:
        """Sidelobe envelope: largest power within ``half_width`` of each frequency.

        The periodogram of a ZP symbol vanishes at integer offsets from the
        carriers, so single-bin readings there say nothing about the envelope.
        """
        p = self.power
        out = []
        for w in np.atleast_1d(freqs):
            m = np.abs(self.freq - w) <= half_width + 1e-9
            if not m.any():
                raise ValueError(f"frequency {w} outside the estimated band")
            out.append(10 * np.log10(p[m].max()))
        return np.array(out)

    def region_mean_db(self, lo, hi) -> float:
        """Mean power (dB, common scale) over ``lo <= |f| <= hi``."""
        m = (np.abs(self.freq) >= lo) & (np.abs(self.freq) <= hi)
        if not m.any():
            raise ValueError(f"no bins with {lo} <= |f| <= {hi}")
        return float(10 * np.log10(self.power[m].mean()))

    def side_mean_db(self, lo, hi) -> float:
        """Mean power (dB, common scale) over ``lo <= f <= hi`` (signed)."""
        m = (self.freq >= lo) & (self.freq <= hi)
        if not m.any():
            raise ValueError(f"no bins with {lo} <= f <= {hi}")
        return float(10 * np.log10(self.power[m].mean()))


def _from_power(freq, power, n_symbols, oversample):
    peak = float(power.max())
    with np.errstate(divide="ignore"):
        psd_db = 10 * np.log10(power / peak)
    return PsdEstimate(freq, psd_db, n_symbols, oversample, peak)


def _symbol_chunks(precoder, n_symbols, per_chunk, seed, stream, threads, fn):
    """Feed chunks of random QPSK data vectors to ``fn(d)`` in a fixed stream."""
    n_chunks = -(-n_symbols // per_chunk)
    N = precoder.N

    def chunk(rng, i):
        n = min(per_chunk, n_symbols - i * per_chunk)
        bits = rng.integers(0, 2, size=(n, 2 * N), dtype=np.int8)
        return fn(qpsk_modulate(bits))

    return ordered_chunks(chunk, seed, key=(0xF5D, stream), threads=threads, n_chunks=n_chunks)


def _spectra_power(rows, grid, params, L, block=16):
    """Sum over rows of ``|FFT_L(ofdm_modulate(row))|^2``, a few rows at a time."""
    acc = np.zeros(L)
    for i in range(0, len(rows), block):
        x = ofdm_modulate(rows[i:i + block], grid, params)
        X = np.fft.fft(x, n=L, axis=-1)
        acc += np.sum(X.real ** 2 + X.imag ** 2, axis=0)
    return acc


def estimate_psd(precoder: Precoder = None, grid: SubcarrierGrid = None,
                 params: OfdmParams = OfdmParams(), n_symbols: int = 2000,
                 seed: int = 0, threads: int = 1, stream: int = 0,
                 method: Literal["auto", "direct", "gram"] = "auto") -> PsdEstimate:
    """Average the oversampled periodogram of random QPSK OFDM symbols.

    Each symbol is precoded, modulated with its guard, zero-padded to
    ``oversample * fft_size`` samples and transformed. ``precoder=None``
    transmits unprecoded data on ``grid``.

    The average is linear in the sample covariance ``D = mean(d d^H)`` of the
    drawn data, so ``method="gram"`` factors ``D = F F^H`` and transforms the
    N columns of ``P F`` instead of every symbol. Both methods consume the
    same random stream and agree to rounding error; ``"auto"`` picks the
    cheaper one. ``stream`` selects an independent data stream for the same
    seed (e.g. one per user).

    The frequency axis is in units of the subcarrier spacing, ascending.
    """
    if n_symbols < 1:
        raise ValueError("n_symbols must be at least 1")
    if precoder is None:
        if grid is None:
            raise ValueError("either a precoder or a grid is required")
        precoder = identity_precoder(grid)
    grid = precoder.grid
    L = params.oversample * params.fft_size
    if params.symbol_len > L:
        raise ValueError("oversampled length is shorter than one OFDM symbol")
    if method == "auto":
        method = "gram" if precoder.N < n_symbols else "direct"
    per_chunk = max(1, _CHUNK_SAMPLES // L)

    if method == "direct":
        acc = np.zeros(L)
        fn = lambda d: _spectra_power(precoder.encode(d), grid, params, L, block=len(d))
        for part in _symbol_chunks(precoder, n_symbols, per_chunk, seed, stream, threads, fn):
            acc += part
        acc /= n_symbols
    elif method == "gram":
        D = np.zeros((precoder.N, precoder.N), dtype=complex)
        for part in _symbol_chunks(precoder, n_symbols, per_chunk, seed, stream, threads,
                                   lambda d: d.T @ d.conj()):
            D += part
        lam, V = np.linalg.eigh(D / n_symbols)
        F = V * np.sqrt(np.clip(lam, 0.0, None))
        acc = _spectra_power(precoder.encode(F.T), grid, params, L)
    else:
        raise ValueError(f"unknown method {method!r}")
    power = np.fft.fftshift(acc)
    freq = np.fft.fftshift(np.fft.fftfreq(L, d=1.0 / params.fft_size))
    return _from_power(freq, power, n_symbols, params.oversample)


def notch_depth_db(reference: PsdEstimate, estimate: PsdEstimate, freqs,
                   floor: float = 1e-12) -> np.ndarray:
    """Suppression of ``estimate`` relative to ``reference`` at each frequency.

    Uses the bin at the frequency when one exists there. A ZP periodogram is
    identically zero at integer offsets from every carrier, so such bins
    carry no information (both curves vanish); the two neighbouring bins at
    one oversampling step are used instead. Values are ratios of linear
    powers in dB, positive when ``estimate`` is lower.
    """
    if not np.array_equal(reference.freq, estimate.freq):
        raise ValueError("estimates must share a frequency axis")
    step = 1.0 / reference.oversample
    ref, est = reference.power, estimate.power
    alive = ref > floor * reference.peak_power
    out = []
    for w in np.atleast_1d(freqs):
        dist = np.abs(reference.freq - w)
        m = (dist <= 1e-9) & alive
        if not m.any():
            m = (dist <= step + 1e-9) & alive
        if not m.any():
            raise ValueError(f"no usable bins near {w}")
        out.append(10 * np.log10(ref[m].mean() / est[m].mean()))
    return np.array(out)


def combine_psd(estimates) -> PsdEstimate:
    """PSD of the sum of independent transmitters sharing one frequency axis."""
    estimates = list(estimates)
    first = estimates[0]
    for est in estimates[1:]:
        if not np.array_equal(est.freq, first.freq):
            raise ValueError("estimates must share a frequency axis")
    power = sum(est.power for est in estimates)
    return _from_power(first.freq, power, min(e.n_symbols for e in estimates),
                       first.oversample)


def expected_psd(precoder: Precoder, params: OfdmParams) -> PsdEstimate:
    """Exact expectation of the periodogram for unit-power uncorrelated symbols.

    Used as an oracle for :func:`estimate_psd`; memory grows as M x L.
    """
    grid = precoder.grid
    L = params.oversample * params.fft_size
    x = ofdm_modulate(precoder.P.T, grid, params)      # one time waveform per data stream
    X = np.fft.fft(x, n=L, axis=-1)
    power = np.fft.fftshift(np.sum(np.abs(X) ** 2, axis=0))
    freq = np.fft.fftshift(np.fft.fftfreq(L, d=1.0 / params.fft_size))
    return _from_power(freq, power, 0, params.oversample)
