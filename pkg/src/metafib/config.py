"""Run configuration files (JSON objects).

Recognized keys::

    family      "conway" | "variant" | "conolly" | "general"
    k, a, b, c  integers (Conway / variant families)
    s           integer (conolly)
    terms       list of [a_i, b_i] pairs (general)
    ics         list of integers, or a pattern string such as "ones:3"
    horizon     number of terms to generate
    format      "table" | "csv" | "bfile" | "json"
    samples     list of indices, or "geometric"
    reference   "half" | "phi" | null
    tolerance   bisection tolerance for phi_k
    tail        [low, high] tail window for ratio reports

Unknown keys are rejected.  Command-line flags override file values.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from typing import Optional, Union

from .core import RecursionSpec, spec_from_dict
from .survey import parse_patterns

FORMATS = ("table", "csv", "bfile", "json")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: Optional[str] = None
    k: Optional[int] = None
    a: Optional[int] = None
    b: Optional[int] = None
    c: Optional[int] = None
    s: Optional[int] = None
    terms: Optional[list] = None
    ics: Union[list, str, None] = None
    horizon: Optional[int] = None
    format: Optional[str] = None
    samples: Union[list, str, None] = None
    reference: Optional[str] = None
    tolerance: Optional[float] = None
    tail: Optional[list] = None

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.check()
        return cfg

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def merged(self, overrides: dict) -> RunConfig:
        """Copy with every non-None override applied."""
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None and k in data})
        return RunConfig.from_dict({k: v for k, v in data.items() if v is not None})

    def check(self) -> None:
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.reference not in (None, "half", "phi"):
            raise ConfigError(f"reference must be 'half', 'phi' or null, got {self.reference!r}")
        if self.horizon is not None and (not isinstance(self.horizon, int) or self.horizon < 1):
            raise ConfigError(f"horizon must be a positive integer, got {self.horizon!r}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.family is not None:
            self.spec()

    def spec(self) -> RecursionSpec:
        params = {
            "conway": ("k", "a", "b"),
            "variant": ("k", "a", "b", "c"),
            "conolly": ("s",),
            "general": ("terms",),
        }.get(self.family)
        if params is None:
            raise ConfigError(f"unknown family {self.family!r}")
        missing = [p for p in params if getattr(self, p) is None]
        if missing:
            raise ConfigError(f"family {self.family} needs {', '.join(missing)}")
        return spec_from_dict({"family": self.family, **{p: getattr(self, p) for p in params}})

    def initial_conditions(self) -> list[int]:
        if self.ics is None:
            raise ConfigError("no initial conditions given")
        if isinstance(self.ics, list):
            return [int(v) for v in self.ics]
        patterns = parse_patterns(self.ics)
        if len(patterns) != 1:
            raise ConfigError(f"ics pattern {self.ics!r} must name a single sequence")
        return patterns[0].materialize(self.spec())


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return RunConfig.from_dict(data)


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"
