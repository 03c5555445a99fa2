"""Experiment configuration and its flat ``key = value`` file format."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..channels import ChannelSpec
from ..code import block_lengths

SCHEDULES = {"pus": ("pus",), "sus": ("sus",), "both": ("pus", "sus")}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    q: int = 2
    n_symbols: int | None = None
    n_bits: int = 1002
    rate: str = "1/3"
    col_weight: int = 3
    channel: str = "BSC"
    noise: list[float] = field(default_factory=lambda: [0.1])
    source: str = "iid"
    schedules: str = "both"
    trials: int = 300
    max_iters: int = 200
    base_seed: int = 1
    code_seed: int | None = None
    code_a: str | None = None
    code_b: str | None = None
    sus_order: str = "natural"
    workers: int = 1
    bin_width: float = 0.02
    min_bin_count: int = 30
    out: str | None = None
    trials_log: str | None = None

    def __post_init__(self):
        self.validate()

    @property
    def m(self) -> int:
        return self.q.bit_length() - 1

    @property
    def N(self) -> int:
        return self.n_symbols if self.n_symbols is not None else self.n_bits // self.m

    @property
    def seed_for_code(self) -> int:
        return self.base_seed if self.code_seed is None else self.code_seed

    @property
    def schedule_list(self) -> tuple[str, ...]:
        return SCHEDULES[self.schedules]

    def channel_specs(self) -> list[ChannelSpec]:
        return [ChannelSpec(self.channel, p) for p in self.noise]

    def validate(self) -> None:
        if isinstance(self.noise, (int, float)):
            self.noise = [float(self.noise)]
        self.noise = [float(p) for p in self.noise]
        if not self.noise:
            raise ConfigError("at least one noise level is required")
        if self.q < 2 or self.q & (self.q - 1):
            raise ConfigError(f"q must be a power of two, got {self.q}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        self.schedules = self.schedules.lower()
        if self.schedules not in SCHEDULES:
            raise ConfigError(f"schedules must be one of {sorted(SCHEDULES)}")
        if self.sus_order not in ("natural", "random"):
            raise ConfigError("sus_order must be 'natural' or 'random'")
        if not 0 < self.bin_width <= 1:
            raise ConfigError("bin_width must lie in (0, 1]")
        if (self.code_a is None) != (self.code_b is None):
            raise ConfigError("code_a and code_b must be given together")
        if self.code_a is None:
            try:
                block_lengths(self.N, self.rate)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        try:
            self.channel_specs()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


_FIELD_TYPES = {
    "q": int, "n_symbols": int, "n_bits": int, "col_weight": int, "trials": int,
    "max_iters": int, "base_seed": int, "code_seed": int, "workers": int,
    "min_bin_count": int, "bin_width": float,
}


def _convert(key: str, raw: str):
    if key == "noise":
        return [float(v) for v in raw.replace(",", " ").split()]
    conv = _FIELD_TYPES.get(key, str)
    return conv(raw)


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value {raw!r} for {key}") from None
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))
