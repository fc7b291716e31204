"""BER of a small precoded link against the unprecoded one and the QPSK bound."""

import math

from jspofdm import (ChannelModel, DesignSpec, OfdmParams, build_grid,
                     design_under_constraint, identity_precoder, run_ber)

grid = build_grid(52, 2, "double", [(-27, -1), (1, 27)])
params = OfdmParams(fft_size=64, guard="zp", guard_len=16)
snr = [4, 6, 8, 10]

curves = {"none": identity_precoder(grid)}
for a0 in (1.5, 10.0):
    spec = DesignSpec(alpha0=a0, omega_a0=(-700.0, 700.0), omega_b0=(-27.625, 27.625))
    curves[f"alpha0={a0:g}"] = design_under_constraint(spec, grid).precoder

print("snr_db  theory    " + "  ".join(f"{k:>12}" for k in curves))
results = {k: run_ber(p, ChannelModel.awgn(), snr, params, min_errors=200, max_bits=2_000_000)
           for k, p in curves.items()}
for i, s in enumerate(snr):
    theory = 0.5 * math.erfc(math.sqrt(10 ** (s / 10)))
    row = "  ".join(f"{results[k][i].ber:12.3e}" for k in curves)
    print(f"{s:6g}  {theory:.2e}  {row}")
