"""Block-fading channel models: AWGN, tapped-delay-line Rayleigh, exponential Rayleigh."""

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grid import SubcarrierGrid
from .ofdm import OfdmParams, carrier_bins

# 3GPP Extended Pedestrian A
EPA_DELAYS_NS = (0, 30, 70, 90, 110, 190, 410)
EPA_POWERS_DB = (0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8)


class ChannelDelayWarning(UserWarning):
    """The channel spans more samples than the guard; ISI is not modelled."""


@dataclass(frozen=True)
class ChannelModel:
    variant: Literal["awgn", "rayleigh_tapped", "rayleigh_exp"] = "awgn"
    delays_ns: tuple = ()
    powers_db: tuple = ()
    n_taps: int = 10
    decay: float = 3.0

    def __post_init__(self):
        if self.variant == "rayleigh_tapped":
            if len(self.delays_ns) != len(self.powers_db) or not self.delays_ns:
                raise ValueError("delays_ns and powers_db must be non-empty and equally long")
            d = np.asarray(self.delays_ns, float)
            if np.any(d < 0) or np.any(np.diff(d) < 0):
                raise ValueError("delays must be non-negative and ascending")
        elif self.variant == "rayleigh_exp":
            if self.n_taps < 1 or self.decay <= 0:
                raise ValueError("rayleigh_exp needs n_taps >= 1 and decay > 0")
        elif self.variant != "awgn":
            raise ValueError(f"unknown channel variant {self.variant!r}")

    @property
    def is_fading(self) -> bool:
        return self.variant != "awgn"

    @classmethod
    def awgn(cls):
        return cls("awgn")

    @classmethod
    def epa(cls):
        return cls("rayleigh_tapped", EPA_DELAYS_NS, EPA_POWERS_DB)

    @classmethod
    def exponential(cls, n_taps=10, decay=3.0):
        return cls("rayleigh_exp", n_taps=n_taps, decay=decay)

    @property
    def label(self) -> str:
        if self.variant == "rayleigh_tapped" and self.delays_ns == EPA_DELAYS_NS \
                and self.powers_db == EPA_POWERS_DB:
            return "epa"
        return {"awgn": "awgn", "rayleigh_tapped": "tapped", "rayleigh_exp": "exp"}[self.variant]


def tap_profile(model: ChannelModel, params: OfdmParams):
    """Sample-spaced power-delay profile normalized to unit total power.

    Tapped delays are rounded to the nearest sample at ``params.sample_rate_hz``;
    taps landing on the same sample have their powers summed.

    Returns
    -------
    powers : np.ndarray
        Average power of tap ``l`` at sample delay ``l`` (length = max delay + 1).
    """
    if model.variant == "awgn":
        return np.ones(1)
    if model.variant == "rayleigh_exp":
        p = np.exp(-np.arange(model.n_taps) / model.decay)
    else:
        idx = np.rint(np.asarray(model.delays_ns) * 1e-9 * params.sample_rate_hz).astype(int)
        p = np.zeros(idx.max() + 1)
        np.add.at(p, idx, 10.0 ** (np.asarray(model.powers_db) / 10))
    if len(p) - 1 > params.guard_len:
        warnings.warn(f"channel spans {len(p) - 1} samples but the guard has "
                      f"{params.guard_len}; inter-symbol interference is not modelled",
                      ChannelDelayWarning, stacklevel=2)
    return p / p.sum()


def draw_channel(model: ChannelModel, rng: np.random.Generator, params: OfdmParams,
                 size=None) -> np.ndarray:
    """Draw complex Gaussian taps; shape ``(L,)`` or ``(size, L)``."""
    p = tap_profile(model, params)
    if model.variant == "awgn":
        return np.ones(p.shape if size is None else (size,) + p.shape, dtype=complex)
    shape = p.shape if size is None else (size,) + p.shape
    g = rng.standard_normal(shape + (2,)).view(complex)[..., 0]
    return g * np.sqrt(p / 2)


def channel_freq_response(taps, grid: SubcarrierGrid, params: OfdmParams) -> np.ndarray:
    """Channel frequency response on the employed carriers, shape ``(..., M)``."""
    taps = np.asarray(taps)
    H = np.fft.fft(taps, n=params.fft_size, axis=-1)
    return H[..., carrier_bins(grid, params)]


def apply_channel(x, taps) -> np.ndarray:
    """Linear convolution of each symbol with its taps, truncated to the symbol length."""
    x = np.asarray(x)
    taps = np.asarray(taps)
    y = np.zeros(np.broadcast_shapes(x.shape[:-1], taps.shape[:-1]) + x.shape[-1:],
                 dtype=complex)
    n = x.shape[-1]
    for lag in range(min(taps.shape[-1], n)):
        y[..., lag:] += taps[..., lag:lag + 1] * x[..., :n - lag]
    return y
