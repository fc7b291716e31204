"""Run configured experiments and render their results as deterministic CSV text.

Every table is produced in memory first (``RunResult.files``) so callers can
compare runs byte for byte without touching the disk; ``write_outputs``
stores them together with a JSON run report.
"""

import csv
import hashlib
import io
import json
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .config import PrecoderConfig, ScenarioConfig
from .grid import SubcarrierGrid
from .link import SNR_CONVENTION, avg_condition_number, run_ber
from .matrix_io import format_matrix, load_matrix
from .ofdm import OfdmParams
from .precoder import (DesignResult, DesignSpec, Precoder, baseline_precoder, compose_jsp,
                       design_under_constraint, identity_precoder, normalize_power)
from .psd import PsdEstimate, combine_psd, estimate_psd, notch_depth_db


@lru_cache(maxsize=64)
def cached_design(spec: DesignSpec, grid: SubcarrierGrid) -> DesignResult:
    """Memoized :func:`design_under_constraint`; designs are pure functions of their inputs."""
    return design_under_constraint(spec, grid)


@dataclass
class Curve:
    """A resolved precoder entry: one precoder per user plus optional design history."""

    label: str
    kind: str
    precoders: List[Precoder]
    guard: Optional[str] = None
    design: Optional[DesignResult] = None

    @property
    def precoder(self) -> Precoder:
        if len(self.precoders) != 1:
            raise ValueError(f"curve {self.label!r} has {len(self.precoders)} users")
        return self.precoders[0]


@dataclass
class RunResult:
    report: dict
    files: Dict[str, str] = field(default_factory=dict)
    curves: Dict[str, Curve] = field(default_factory=dict)
    psd: Dict[str, PsdEstimate] = field(default_factory=dict)


def _build_one(entry: PrecoderConfig, grid: SubcarrierGrid):
    grid = entry.grid.build() if entry.grid is not None else grid
    design = None
    if entry.kind == "none":
        pre = identity_precoder(grid)
    elif entry.kind == "jsp":
        pre = compose_jsp(grid, entry.omega_a, entry.omega_b, entry.omega_o)
    elif entry.kind == "designed":
        design = cached_design(entry.design.spec(entry.design.alphas[0]), grid)
        pre = design.precoder
    elif entry.kind in ("projection_only", "svd_only"):
        pre = baseline_precoder(entry.kind, grid, entry.freqs)
    elif entry.kind == "file":
        freqs = {k: getattr(entry, k) for k in ("omega_a", "omega_b", "omega_o")
                 if getattr(entry, k) is not None}
        pre = Precoder.from_matrix(load_matrix(entry.path), grid, "jsp", **freqs)
    else:
        raise ValueError(f"cannot build kind {entry.kind!r} directly")
    if entry.normalize_power:
        pre = normalize_power(pre)
    return pre, design


def build_curve(entry: PrecoderConfig, grid: SubcarrierGrid) -> Curve:
    """Resolve one (already expanded) precoder entry against the scenario grid."""
    if entry.kind == "multiuser":
        pres = [_build_one(u, grid)[0] for u in entry.users]
        return Curve(entry.label, entry.kind, pres, entry.guard)
    pre, design = _build_one(entry, grid)
    return Curve(entry.label, entry.kind, [pre], entry.guard, design)


def _num(x) -> str:
    """Locale-independent shortest round-trip text for a number."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _num(v) for v in row])
    return buf.getvalue()


def _curve_params(curve: Curve, params: OfdmParams) -> OfdmParams:
    return params if curve.guard is None else replace(params, guard=curve.guard)


def curve_psd(curve: Curve, params: OfdmParams, n_symbols: int, seed: int,
              threads: int = 1) -> PsdEstimate:
    """PSD of a curve; independent users get independent data streams and add in power."""
    params = _curve_params(curve, params)
    parts = [estimate_psd(p, params=params, n_symbols=n_symbols, seed=seed, threads=threads,
                          stream=u) for u, p in enumerate(curve.precoders)]
    return parts[0] if len(parts) == 1 else combine_psd(parts)


def _design_csv(result: DesignResult) -> str:
    first = result.trace[0]
    na, nb = len(first.omega_a), len(first.omega_b)
    header = (["iteration"] + [f"omega_a_{i + 1}" for i in range(na)]
              + [f"omega_b_{i + 1}" for i in range(nb)] + ["alpha"])
    rows = [[s.iteration, *s.omega_a, *s.omega_b, s.alpha] for s in result.trace]
    return to_csv(header, rows)


def _design_summary(result: DesignResult) -> dict:
    return {"iterations": result.iterations, "truncated": result.truncated,
            "accepted_iteration": result.iterations - (0 if result.truncated else 1),
            "first_violation_alpha": None if result.truncated else result.trace[-1].alpha}


def _run_design(cfg, curves, res):
    rows = []
    for c in curves.values():
        for u, pre in enumerate(c.precoders):
            suffix = "" if len(c.precoders) == 1 else f"_user{u + 1}"
            note = f"{c.label}{suffix}: kind={pre.kind} M={pre.M} N={pre.N} alpha={pre.alpha!r}"
            res.files[f"P_{c.label}{suffix}.txt"] = format_matrix(pre.P, note)
            res.files[f"decoder_{c.label}{suffix}.txt"] = format_matrix(pre.decoder, note)
            rows.append([c.label + suffix, pre.kind, pre.M, pre.N, pre.M - pre.N, pre.alpha,
                         " ".join(_num(w) for w in pre.omega_a),
                         " ".join(_num(w) for w in pre.omega_b),
                         " ".join(_num(w) for w in pre.omega_o)])
        if c.design is not None:
            res.files[f"design_{c.label}.csv"] = _design_csv(c.design)
    res.files["precoders.csv"] = to_csv(
        ["label", "kind", "M", "N", "R", "alpha", "omega_a", "omega_b", "omega_o"], rows)


def _run_psd(cfg, curves, res, threads):
    params = cfg.psd_params()
    n = cfg.psd_symbols()
    for label, c in curves.items():
        res.psd[label] = curve_psd(c, params, n, cfg.seed, threads)
    # One common reference so curves keep their relative levels.
    ref = max(e.peak_power for e in res.psd.values())
    metrics = {}
    refs = {}
    for label, est in res.psd.items():
        with np.errstate(divide="ignore"):
            rel = 10 * np.log10(est.power / ref)
        res.files[f"psd_{label}.csv"] = to_csv(["freq", "psd_db"], zip(est.freq, rel))
        c = curves[label]
        if len(c.precoders) == 1 and c.precoder.omega_b.size:
            key = (c.precoder.grid, c.guard)
            if key not in refs:
                base = Curve("none", "none", [identity_precoder(c.precoder.grid)], c.guard)
                refs[key] = curve_psd(base, params, n, cfg.seed, threads)
            depth = notch_depth_db(refs[key], est, c.precoder.omega_b)
            metrics[label] = {"omega_b": c.precoder.omega_b.tolist(),
                              "notch_depth_db": depth.tolist()}
    res.report["psd"] = {"fft_size": params.fft_size, "guard_len": params.guard_len,
                         "oversample": params.oversample, "n_symbols": n,
                         "reference_peak_power": ref, "metrics": metrics}


def _run_ber(cfg, curves, res, threads):
    channel = cfg.ber.channel.build()
    table = {}
    for label, c in curves.items():
        if len(c.precoders) != 1:
            continue
        pts = run_ber(c.precoder, channel, cfg.ber.snr_db, _curve_params(c, cfg.ofdm.build()),
                      cfg.ber.min_errors, cfg.ber.max_bits, cfg.seed, threads)
        res.files[f"ber_{label}.csv"] = to_csv(
            ["snr_db", "bits", "errors", "ber"], [[p.snr_db, p.bits, p.errors, p.ber] for p in pts])
        table[label] = {"erased_symbols": [p.erased_symbols for p in pts]}
    res.report["ber"] = {"channel": channel.label, "snr_convention": SNR_CONVENTION,
                         "curves": table}


def _run_condnum(cfg, res, threads):
    cn = cfg.condnum
    grid = cfg.grid.build()
    params = cfg.ofdm.build()
    designs = [cached_design(cn.design.spec(a), grid) for a in cn.alpha0]
    reference = {}
    for ch_cfg in cn.channels:
        ch = ch_cfg.build()
        rows = [[a, avg_condition_number(d.precoder, ch, cn.n_realizations, params, cfg.seed,
                                         threads)] for a, d in zip(cn.alpha0, designs)]
        res.files[f"condnum_{ch.label}.csv"] = to_csv(["alpha0", "mean_cond"], rows)
        reference[ch.label] = avg_condition_number(identity_precoder(grid), ch,
                                                   cn.n_realizations, params, cfg.seed, threads)
    res.files["condnum_reference.csv"] = to_csv(["channel", "mean_cond"], reference.items())
    res.report["condnum"] = {
        "n_realizations": cn.n_realizations,
        "designs": [{"alpha0": a, "alpha": d.precoder.alpha,
                     "omega_a": d.precoder.omega_a.tolist(), "omega_b": d.precoder.omega_b.tolist(),
                     **_design_summary(d)} for a, d in zip(cn.alpha0, designs)],
        "unprecoded": reference}


def run(cfg: ScenarioConfig, threads: int = 1) -> RunResult:
    """Execute every experiment named in ``cfg``.

    Raises
    ------
    InfeasibleDesignError, ConditioningError, EqualizerFailure
        Propagated from the library; the CLI maps them to exit codes.
    """
    t0 = time.perf_counter()
    res = RunResult(report={
        "tool": "jspofdm", "version": __version__, "seed": cfg.seed,
        "config": cfg.model_dump(mode="json"), "snr_convention": SNR_CONVENTION})
    grid = cfg.grid.build()
    curves = {}
    if any(e in cfg.experiments for e in ("design", "psd", "ber")):
        curves = {e.label: build_curve(e, grid) for e in cfg.curves}
    res.curves = curves
    res.report["precoders"] = {
        label: {"users": [p.summary() for p in c.precoders],
                **({"design": _design_summary(c.design)} if c.design else {})}
        for label, c in curves.items()}
    for exp in cfg.experiments:
        if exp == "design":
            _run_design(cfg, curves, res)
        elif exp == "psd":
            _run_psd(cfg, curves, res, threads)
        elif exp == "ber":
            _run_ber(cfg, curves, res, threads)
        elif exp == "condnum":
            _run_condnum(cfg, res, threads)
    res.report["outputs"] = {name: hashlib.sha256(text.encode()).hexdigest()
                             for name, text in sorted(res.files.items())}
    res.report["wall_clock_s"] = time.perf_counter() - t0
    return res


def write_outputs(res: RunResult, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(res.files.items()):
        with open(out / name, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    with open(out / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(res.report, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return out


def summary_lines(res: RunResult) -> List[str]:
    """Human-readable one-line-per-curve summary for the console."""
    lines = []
    for label, info in res.report.get("precoders", {}).items():
        for u in info["users"]:
            lines.append(f"{label:<24} {u['kind']:<16} M={u['M']:<4} N={u['N']:<4} "
                         f"alpha={u['alpha']:.4f}")
    for label, m in res.report.get("psd", {}).get("metrics", {}).items():
        depth = ", ".join(f"{d:.1f}" for d in m["notch_depth_db"])
        lines.append(f"{label:<24} notch depth at omega_b [dB]: {depth}")
    for label, info in res.report.get("condnum", {}).get("unprecoded", {}).items():
        lines.append(f"unprecoded mean cond ({label}) = {info:.4f}")
    lines.append(f"wall clock {res.report['wall_clock_s']:.1f} s")
    return lines
