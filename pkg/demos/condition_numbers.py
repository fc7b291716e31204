"""Average condition number of the effective channel-precoder product."""

from jspofdm import (ChannelModel, DesignSpec, OfdmParams, avg_condition_number, build_grid,
                     design_under_constraint, identity_precoder)

grid = build_grid(300, 2, "double", [(-151, -1), (1, 151)])
params = OfdmParams(fft_size=512, guard="zp", guard_len=36)
channels = {"awgn": ChannelModel.awgn(), "epa": ChannelModel.epa(),
            "exp": ChannelModel.exponential(10, 3.0)}

pres = {"none": identity_precoder(grid)}
for a0 in (1.5, 5.0, 20.0):
    spec = DesignSpec(alpha0=a0, omega_a0=(-4000.0, 4000.0), omega_b0=(-151.5, 151.5))
    pres[f"alpha0={a0:g}"] = design_under_constraint(spec, grid).precoder

print(f"{'precoder':>12}  " + "  ".join(f"{c:>8}" for c in channels))
for name, pre in pres.items():
    vals = [avg_condition_number(pre, ch, 300, params, seed=1) for ch in channels.values()]
    print(f"{name:>12}  " + "  ".join(f"{v:8.3f}" for v in vals))
