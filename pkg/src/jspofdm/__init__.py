"""Spectral precoding for OFDM under a condition-number constraint.

The library builds joint spectral precoders (inner projection, SVD tail
basis, outer projection), scans their design frequencies under a bound on
the condition number, and checks the result with periodogram PSD and
bit-error-rate simulations.
"""

__version__ = "0.1.0"

from .channel import ChannelModel, apply_channel, channel_freq_response, draw_channel, tap_profile
from .errors import ConditioningError, ConfigError, EqualizerFailure, InfeasibleDesignError
from .grid import SubcarrierGrid, build_grid, embed_data, extract_data
from .link import BerPoint, avg_condition_number, equalize, run_ber
from .matrix_io import load_matrix, save_matrix
from .ofdm import OfdmParams, ofdm_demodulate, ofdm_modulate, qpsk_demodulate, qpsk_modulate
from .precoder import (DesignResult, DesignSpec, Precoder, SvdReport, baseline_precoder,
                       compose_jsp, condition_number, decoder_matrix, design_under_constraint,
                       identity_precoder, normalize_power, nullspace_projector, svd_tail_basis)
from .psd import PsdEstimate, combine_psd, estimate_psd, expected_psd, notch_depth_db
from .spectral import envelope_oob_power, frequency_set, magnitude_envelope, response_matrix

__all__ = [
    "BerPoint", "ChannelModel", "ConditioningError", "ConfigError", "DesignResult", "DesignSpec",
    "EqualizerFailure", "InfeasibleDesignError", "OfdmParams", "Precoder", "PsdEstimate",
    "SubcarrierGrid", "SvdReport", "apply_channel", "avg_condition_number", "baseline_precoder",
    "build_grid", "channel_freq_response", "combine_psd", "compose_jsp", "condition_number",
    "decoder_matrix", "design_under_constraint", "draw_channel", "embed_data", "envelope_oob_power",
    "equalize", "estimate_psd", "expected_psd", "extract_data", "frequency_set",
    "identity_precoder", "load_matrix", "magnitude_envelope", "normalize_power", "notch_depth_db",
    "nullspace_projector", "ofdm_demodulate", "ofdm_modulate", "qpsk_demodulate", "qpsk_modulate",
    "response_matrix", "run_ber", "save_matrix", "svd_tail_basis", "tap_profile",
]
