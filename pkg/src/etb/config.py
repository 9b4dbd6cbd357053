"""Experiment configuration shared by the CLI and the scripts."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .budget import Budget, get_budget

KINDS = ("fl", "spl", "et", "cells", "k", "sphere")
PROBES = ("stabilization", "kh", "elementary", "d", "k")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    ring: str | None = None  # None: fq:2, or the default case list for verify
    rank: int | None = None
    kind: str = "et"
    coeff: str = "z"
    suite: str | None = None
    probe: str = "stabilization"
    m: int = 1
    d: int = 3
    max_r: int = 5
    max_simplices: int | None = None
    max_group: int | None = None
    max_vectors: int | None = None
    jobs: int = 1
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown complex kind {self.kind!r}")
        if self.probe not in PROBES:
            raise ConfigError(f"unknown probe {self.probe!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        if (self.rank is not None and self.rank < 0) or self.jobs < 1:
            raise ConfigError("rank must be >= 0 and jobs >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = sorted(set(data) - known)
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(extra)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def merged(self, overrides: dict) -> "ExperimentConfig":
        """Copy with the non-None entries of ``overrides`` applied."""
        known = {f.name for f in fields(self)}
        upd = {k: v for k, v in overrides.items() if v is not None}
        extra = sorted(set(upd) - known)
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(extra)}")
        return replace(self, **upd)

    @property
    def ring_name(self) -> str:
        return self.ring or "fq:2"

    @property
    def n(self) -> int:
        return 2 if self.rank is None else self.rank

    def budget(self) -> Budget:
        base = get_budget()
        return Budget(
            vectors=self.max_vectors if self.max_vectors is not None else base.vectors,
            simplices=self.max_simplices if self.max_simplices is not None else base.simplices,
            group=self.max_group if self.max_group is not None else base.group,
        )

    def echo(self) -> dict:
        """Inputs as echoed in reports (output plumbing excluded)."""
        d = asdict(self)
        for k in ("out", "format", "jobs"):
            d.pop(k)
        return d
