"""Zero-forcing equalization, BER Monte Carlo and the transition-matrix study."""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, apply_channel, channel_freq_response, draw_channel, tap_profile
from .errors import EqualizerFailure
from .ofdm import OfdmParams, ofdm_demodulate, ofdm_modulate, qpsk_demodulate, qpsk_modulate
from .parallel import ordered_chunks
from .precoder import SINGULAR_TOL, Precoder, condition_number

SNR_CONVENTION = (
    "snr_db is Eb/N0 per information bit at the equalizer input: "
    "Eb = ||P||_F^2 * E[sum|h_l|^2] / (2N) (precoding redundancy M/N counted in the energy), "
    "N0 = per-carrier noise variance after the receive FFT "
    "(ZP overlap-add noise folding counted; CP samples discarded)"
)

_CHUNK_SYMBOLS_TARGET = 1 << 15


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bits: int
    errors: int
    erased_symbols: int = 0

    @property
    def ber(self) -> float:
        return self.errors / self.bits


def _gram(P, H):
    """``Q^H Q`` for ``Q = diag(H) P`` with real ``P``; real symmetric, batched over H."""
    return (P.T * (np.abs(H) ** 2)[..., None, :]) @ P


def _equalize_batch(s_tilde, precoder: Precoder, H=None):
    """Equalize a batch; returns the estimates and a mask of failed symbols."""
    s_tilde = np.atleast_2d(s_tilde)
    if H is None:
        return precoder.decode(s_tilde), np.zeros(len(s_tilde), dtype=bool)
    H = np.broadcast_to(np.atleast_2d(H), s_tilde.shape)
    P = precoder.P
    A = _gram(P, H)
    rhs = (np.conj(H) * s_tilde) @ P
    lam = np.linalg.eigvalsh(A)
    failed = lam[:, 0] <= (SINGULAR_TOL ** 2) * lam[:, -1]
    out = np.zeros((len(s_tilde), precoder.N), dtype=complex)
    ok = ~failed
    if ok.any():
        out[ok] = np.linalg.solve(A[ok], rhs[ok][..., None])[..., 0]
    return out, failed


def equalize(s_tilde, precoder: Precoder, H=None) -> np.ndarray:
    """Zero-forcing estimate of the data vector from received carrier values.

    Without ``H`` (AWGN) this is ``(P^T P)^{-1} P^T s``; with a channel
    response ``H`` on the M carriers it is ``(Q^H Q)^{-1} Q^H s`` for
    ``Q = diag(H) P``. No regularization is applied.

    Raises
    ------
    EqualizerFailure
        ``Q`` is numerically rank deficient for one or more symbols.
    """
    s_tilde = np.asarray(s_tilde)
    out, failed = _equalize_batch(s_tilde, precoder, H)
    if failed.any():
        raise EqualizerFailure(np.flatnonzero(failed))
    return out[0] if s_tilde.ndim == 1 else out


def noise_std(snr_db: float, precoder: Precoder, params: OfdmParams) -> float:
    """Time-domain complex noise standard deviation for a given Eb/N0 (see ``SNR_CONVENTION``)."""
    eb = np.sum(precoder.P ** 2) / (2 * precoder.N)
    n0 = eb / 10.0 ** (snr_db / 10)
    if params.guard == "zp":
        n0 *= params.fft_size / params.symbol_len
    return float(np.sqrt(n0))


def run_ber(precoder: Precoder, channel: ChannelModel, snr_db, params: OfdmParams,
            min_errors: int = 100, max_bits: int = 10 ** 6, seed: int = 0,
            threads: int = 1):
    """Bit-error rate of the precoded QPSK link over a grid of Eb/N0 values.

    Symbols are simulated one OFDM block at a time through the full
    transmitter and receiver; fading channels are redrawn for every block.
    Each point stops once ``min_errors`` errors or ``max_bits`` bits are
    reached. Blocks whose equalizer fails are erased and count half their
    bits as errors.

    Every SNR point replays the same random stream (bits, channel draws and
    unit-variance noise), only the noise scale changes. These common random
    numbers keep the curve smooth in SNR and make curves of different
    precoders directly comparable.

    Returns
    -------
    list of BerPoint
    """
    grid = precoder.grid
    if channel.is_fading:
        tap_profile(channel, params)   # surfaces the delay warning once
    bits_per_symbol = 2 * grid.N
    per_chunk = max(1, min(256, _CHUNK_SYMBOLS_TARGET // params.symbol_len))
    points = []
    for snr in np.atleast_1d(snr_db).astype(float):
        sigma = noise_std(snr, precoder, params)

        def chunk(rng, i, sigma=sigma):
            bits = rng.integers(0, 2, size=(per_chunk, bits_per_symbol), dtype=np.int8)
            x = ofdm_modulate(precoder.encode(qpsk_modulate(bits)), grid, params)
            H = None
            if channel.is_fading:
                taps = draw_channel(channel, rng, params, size=per_chunk)
                x = apply_channel(x, taps)
                H = channel_freq_response(taps, grid, params)
            noise = rng.standard_normal(x.shape + (2,)).view(complex)[..., 0]
            y = x + noise * (sigma / np.sqrt(2))
            d_hat, failed = _equalize_batch(ofdm_demodulate(y, grid, params), precoder, H)
            errors = np.sum(qpsk_demodulate(d_hat[~failed]) != bits[~failed])
            erased = int(failed.sum())
            return int(errors) + erased * (bits_per_symbol // 2), erased

        n_bits = n_err = n_erased = 0
        for errors, erased in ordered_chunks(chunk, seed, key=(0xBE5,), threads=threads):
            n_bits += per_chunk * bits_per_symbol
            n_err += errors
            n_erased += erased
            if n_err >= min_errors or n_bits >= max_bits:
                break
        points.append(BerPoint(float(snr), n_bits, n_err, n_erased))
    return points


def avg_condition_number(precoder: Precoder, channel: ChannelModel, n_realizations: int,
                         params: OfdmParams, seed: int = 0, threads: int = 1) -> float:
    """Mean condition number of ``Q = diag(H) P`` over channel draws.

    For AWGN ``Q = P`` and the result is ``condition_number(P)`` exactly.
    Fading draws use the eigenvalues of the real Gram matrix ``P^T |H|^2 P``.
    """
    if n_realizations < 1:
        raise ValueError("n_realizations must be at least 1")
    if not channel.is_fading:
        return condition_number(precoder.P)
    grid, P = precoder.grid, precoder.P
    tap_profile(channel, params)
    per_chunk = 50
    n_chunks = -(-n_realizations // per_chunk)

    def chunk(rng, i):
        n = min(per_chunk, n_realizations - i * per_chunk)
        H = channel_freq_response(draw_channel(channel, rng, params, size=n), grid, params)
        lam = np.linalg.eigvalsh(_gram(P, H))
        with np.errstate(divide="ignore"):
            cond = np.where(lam[:, 0] > 0, np.sqrt(lam[:, -1] / np.abs(lam[:, 0])), np.inf)
        return float(np.sum(cond))

    acc = sum(ordered_chunks(chunk, seed, key=(0xC0D,), threads=threads, n_chunks=n_chunks))
    return float(acc / n_realizations)
