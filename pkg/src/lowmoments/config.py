"""Experiment configuration: dataclass, `key = value` file loader, x rules."""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .primes import is_prime

SUBCOMMANDS = ("tau", "moments", "ladder", "random", "euler-identity", "euler-grid", "mertens", "rankin", "smooth", "parseval")
MC_SUBCOMMANDS = ("random", "euler-identity")


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    command: str
    q: list[int] = field(default_factory=list)
    x_rule: str | None = None
    xs: list[int] = field(default_factory=list)
    ks: list[float] = field(default_factory=lambda: [0.5, 1.0])
    trials: int = 10_000
    seed: int = 20240101
    table_limit: int | None = None
    out: str | None = None
    method: str = "transform"
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.command!r}")
        for q in self.q:
            if q < 3 or not is_prime(q):
                raise ConfigError(f"modulus {q} is not an odd prime")
        for k in self.ks:
            if not 0 <= k <= 1:
                raise ConfigError(f"k={k} outside [0, 1]")
        if self.command in MC_SUBCOMMANDS and self.trials < 2:
            raise ConfigError(f"trials must be >= 2, got {self.trials}")
        if self.method not in ("transform", "direct"):
            raise ConfigError(f"method must be transform or direct, got {self.method!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.command == "ladder" and len(self.q) < 3:
            raise ConfigError(f"ladder needs at least 3 primes, got {len(self.q)}")
        if self.command in ("moments", "ladder") and not self.q:
            raise ConfigError("--q is required")
        if self.x_rule is not None:
            for q in self.q:
                resolve_x(self.x_rule, q)


_RULE = re.compile(r"^\s*(?:(\d+)|sqrt|q\^([0-9.]+)|q/(\d+)|q-(\d+)|q)\s*$")


def resolve_x(rule: str, q: int) -> int:
    """Absolute x, or a q-relative rule: sqrt, q^r, q/d, q-c, q (all floored)."""
    m = _RULE.match(rule)
    if not m:
        raise ConfigError(f"cannot parse x rule {rule!r}")
    absolute, power, div, minus = m.groups()
    r = rule.strip()
    if absolute is not None:
        x = int(absolute)
    elif r == "sqrt" or (power is not None and float(power) == 0.5):
        x = math.isqrt(q)
    elif power is not None:
        x = math.floor(q ** float(power))
    elif div is not None:
        x = q // int(div)
    elif minus is not None:
        x = q - int(minus)
    else:
        x = q
    if not 1 <= x <= q:
        raise ConfigError(f"x rule {rule!r} gives x={x}, outside [1, q={q}]")
    return x


def read_config_file(path: str | Path) -> dict[str, str]:
    """Plain `key = value` lines; '#' starts a comment; dashes in keys become underscores."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out
