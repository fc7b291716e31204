"""Experiment configuration: a validated YAML schema and its resolution into library objects.

A scenario names one or more experiments, a carrier grid, an OFDM
numerology and a list of precoders. Unknown keys are rejected so that typos
fail loudly; every error message carries the dotted path of the bad field.
"""

from importlib import resources
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .channel import ChannelModel
from .errors import ConfigError
from .grid import SubcarrierGrid, build_grid
from .ofdm import OfdmParams
from .precoder import DesignSpec

Experiment = Literal["design", "psd", "ber", "condnum"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridConfig(_Strict):
    n_data: int = Field(ge=1)
    reserved: int = Field(ge=0)
    side: Literal["double", "single_low", "single_high"] = "double"
    subbands: Optional[List[Tuple[int, int]]] = None
    exclude_dc: bool = True
    reserve_each_subband: bool = False

    def build(self) -> SubcarrierGrid:
        return build_grid(self.n_data, self.reserved, self.side,
                          None if self.subbands is None else [tuple(b) for b in self.subbands],
                          self.exclude_dc, self.reserve_each_subband)


class OfdmConfig(_Strict):
    fft_size: int = 512
    guard: Literal["zp", "cp"] = "zp"
    guard_len: int = 36
    subcarrier_spacing_hz: float = 15e3
    oversample: int = 8

    def build(self) -> OfdmParams:
        return OfdmParams(**self.model_dump())


class ChannelConfig(_Strict):
    variant: Literal["awgn", "epa", "rayleigh_tapped", "rayleigh_exp"] = "awgn"
    delays_ns: Optional[List[float]] = None
    powers_db: Optional[List[float]] = None
    n_taps: int = 10
    decay: float = 3.0

    def build(self) -> ChannelModel:
        if self.variant == "epa":
            return ChannelModel.epa()
        if self.variant == "rayleigh_tapped":
            if self.delays_ns is None or self.powers_db is None:
                raise ValueError("rayleigh_tapped needs delays_ns and powers_db")
            return ChannelModel("rayleigh_tapped", tuple(self.delays_ns), tuple(self.powers_db))
        if self.variant == "rayleigh_exp":
            return ChannelModel.exponential(self.n_taps, self.decay)
        return ChannelModel.awgn()


class DesignConfig(_Strict):
    """Constrained-design knobs; ``alpha0`` may be a list to expand into several precoders."""

    alpha0: Union[float, List[float]]
    case: Literal["A", "B"] = "A"
    side: Literal["double", "single_low", "single_high"] = "double"
    omega_a0: List[float]
    omega_b0: List[float]
    omega_o: Optional[List[float]] = None
    delta_omega: float = Field(0.25, gt=0)
    max_iterations: int = Field(10_000, ge=1)
    min_spacing: float = 0.5
    max_reserved: int = 4

    @property
    def alphas(self) -> List[float]:
        return list(self.alpha0) if isinstance(self.alpha0, list) else [self.alpha0]

    def spec(self, alpha0: float) -> DesignSpec:
        return DesignSpec(
            alpha0=float(alpha0), omega_a0=tuple(self.omega_a0), omega_b0=tuple(self.omega_b0),
            case=self.case, side=self.side, delta_omega=self.delta_omega,
            omega_o=None if self.omega_o is None else tuple(self.omega_o),
            max_iterations=self.max_iterations, min_spacing=self.min_spacing,
            max_reserved=self.max_reserved)


class PrecoderConfig(_Strict):
    """One curve of an experiment.

    ``kind`` selects the construction: ``none`` (unprecoded), ``jsp`` (fixed
    frequency sets), ``designed`` (constrained scan), ``projection_only`` /
    ``svd_only`` (baselines on ``freqs``), ``file`` (matrix text file) or
    ``multiuser`` (independent ``users`` whose spectra add up).
    """

    label: str = Field(pattern=r"^[A-Za-z0-9_.+{}-]+$")
    kind: Literal["none", "jsp", "designed", "projection_only", "svd_only", "file", "multiuser"]
    omega_a: Optional[List[float]] = None
    omega_b: Optional[List[float]] = None
    omega_o: Optional[List[float]] = None
    freqs: Optional[List[float]] = None
    design: Optional[DesignConfig] = None
    path: Optional[str] = None
    grid: Optional[GridConfig] = None
    guard: Optional[Literal["zp", "cp"]] = None
    normalize_power: bool = False
    users: Optional[List["PrecoderConfig"]] = None

    @model_validator(mode="after")
    def _fields_for_kind(self):
        need = {"jsp": ("omega_a", "omega_b"), "designed": ("design",),
                "projection_only": ("freqs",), "svd_only": ("freqs",),
                "file": ("path",), "multiuser": ("users",)}.get(self.kind, ())
        for name in need:
            if getattr(self, name) is None:
                raise ValueError(f"kind={self.kind!r} requires '{name}'")
        if self.kind != "designed" and self.design is not None:
            raise ValueError("'design' is only valid with kind='designed'")
        if self.kind == "designed" and len(self.design.alphas) > 1 and "{alpha0}" not in self.label:
            raise ValueError("a list of alpha0 values needs '{alpha0}' in the label")
        return self

    def expand(self) -> List["PrecoderConfig"]:
        """Split a multi-alpha design into one entry per alpha0."""
        if self.kind != "designed" or len(self.design.alphas) == 1:
            return [self]
        return [self.model_copy(update={
            "label": self.label.replace("{alpha0}", f"{a:g}"),
            "design": self.design.model_copy(update={"alpha0": a})})
            for a in self.design.alphas]


class PsdConfig(_Strict):
    n_symbols: int = Field(2000, ge=1)
    ofdm: Optional[OfdmConfig] = None


class BerConfig(_Strict):
    snr_db: List[float]
    min_errors: int = Field(100, ge=1)
    max_bits: int = Field(10 ** 6, ge=1)
    channel: ChannelConfig = ChannelConfig()


class CondnumConfig(_Strict):
    alpha0: List[float]
    design: DesignConfig
    n_realizations: int = Field(2000, ge=1)
    channels: List[ChannelConfig] = [ChannelConfig(variant="awgn")]

    @field_validator("alpha0")
    @classmethod
    def _ascending(cls, v):
        if v != sorted(v):
            raise ValueError("alpha0 values must be ascending")
        return v


class ScenarioConfig(_Strict):
    description: str = ""
    experiments: List[Experiment] = Field(min_length=1)
    seed: int = 0
    grid: GridConfig
    ofdm: OfdmConfig = OfdmConfig()
    precoders: List[PrecoderConfig] = []
    psd: Optional[PsdConfig] = None
    ber: Optional[BerConfig] = None
    condnum: Optional[CondnumConfig] = None

    @model_validator(mode="after")
    def _blocks_present(self):
        for exp in self.experiments:
            if exp in ("ber", "condnum") and getattr(self, exp) is None:
                raise ValueError(f"experiment '{exp}' requires a '{exp}' block")
            if exp in ("design", "psd", "ber") and not self.precoders:
                raise ValueError(f"experiment '{exp}' requires at least one precoder")
        labels = [p.label for p in self.curves]
        dup = sorted({x for x in labels if labels.count(x) > 1})
        if dup:
            raise ValueError(f"duplicate precoder labels {dup}")
        return self

    @property
    def curves(self) -> List[PrecoderConfig]:
        return [c for p in self.precoders for c in p.expand()]

    def psd_params(self) -> OfdmParams:
        """Numerology used for every PSD estimate of this scenario."""
        cfg = self.psd.ofdm if self.psd is not None and self.psd.ofdm is not None else self.ofdm
        return cfg.build()

    def psd_symbols(self) -> int:
        return 2000 if self.psd is None else self.psd.n_symbols


PrecoderConfig.model_rebuild()


def _format_errors(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        path = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{path}: {e['msg']}")
    return "; ".join(lines)


def parse_config(data: dict, source: str = "<config>") -> ScenarioConfig:
    """Validate a mapping; raises ``ConfigError`` naming the failing field paths."""
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    try:
        cfg = ScenarioConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(f"{source}: {_format_errors(err)}") from None
    try:
        cfg.grid.build()
        cfg.ofdm.build()
        cfg.psd_params()
        for c in cfg.curves:
            if c.grid is not None:
                c.grid.build()
        if cfg.ber is not None:
            cfg.ber.channel.build()
        if cfg.condnum is not None:
            for ch in cfg.condnum.channels:
                ch.build()
    except ValueError as err:
        raise ConfigError(f"{source}: {err}") from None
    return cfg


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as err:
        raise ConfigError(f"{path}: {err}") from None
    return parse_config(data, str(path))


def _preset_dir():
    return resources.files("jspofdm") / "presets"


def list_presets() -> List[Tuple[str, str]]:
    """``(id, description)`` of the shipped presets in a stable order."""
    def order(name):
        stem = name[:-5]
        return (0, int(stem[3:])) if stem.startswith("fig") and stem[3:].isdigit() else (1, stem)

    names = sorted((p.name for p in _preset_dir().iterdir() if p.name.endswith(".yaml")), key=order)
    out = []
    for name in names:
        data = yaml.safe_load((_preset_dir() / name).read_text(encoding="utf-8"))
        out.append((name[:-5], str(data.get("description", "")).strip().splitlines()[0]))
    return out


def load_preset(preset_id: str) -> ScenarioConfig:
    path = _preset_dir() / f"{preset_id}.yaml"
    if not path.is_file():
        known = ", ".join(p for p, _ in list_presets())
        raise ConfigError(f"unknown preset {preset_id!r} (known: {known})")
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    return parse_config(data, f"preset {preset_id}")
