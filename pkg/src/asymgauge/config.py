"""Flat key=value run configuration.

One file drives the whole pipeline. Every key can be overridden on the
command line with ``--key value``; the resolved mapping (defaults, file,
then overrides) is what gets hashed into output metadata, so two runs with
the same hash saw the same configuration no matter how it was assembled.
Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ConfigurationError, ParseError

__all__ = ["RunConfig", "load_config", "KNOWN_KEYS"]

# key -> default (None means unset); values are kept as strings until typed
# access, so hashing is independent of parse quirks
KNOWN_KEYS: dict[str, str | None] = {
    "output_dir": None,
    "seed": "7",
    "cap": "1000",
    "gammas": "0,0.1,1,10",
    "bin_size": "200",
    "bin_gamma": "0",
    "prob_floor": "1e-12",
    "support_policy": "pair-vocab",
    "datasets": None,
    "conceptnet": None,
    "language": "en",
    "corpus_dir": None,
    "corpus_file": None,
    "vectors": None,
    "dual_vectors": None,
    "vocab_from": None,
    "scorer": "mock:closed-form",
    "scorer_retries": "2",
    "lm_name": "lm",
    "compare": None,
    "alar": None,
    "relations_from": None,
    "sim_gold": None,
    "sim_scores": None,
    "alar_signed_log_scale": None,
}


@dataclass(frozen=True)
class RunConfig:
    values: dict[str, str | None]
    base_dir: Path

    def get(self, key: str) -> str | None:
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"unknown config key {key!r}")
        return self.values.get(key)

    def require(self, key: str) -> str:
        value = self.get(key)
        if value is None or value == "":
            raise ConfigurationError(f"config key {key!r} is required here")
        return value

    def get_int(self, key: str) -> int:
        raw = self.require(key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(f"{key} must be an integer, got {raw!r}") from None

    def get_float(self, key: str) -> float:
        raw = self.require(key)
        try:
            return float(raw)
        except ValueError:
            raise ConfigurationError(f"{key} must be a number, got {raw!r}") from None

    def get_floats(self, key: str) -> list[float]:
        raw = self.require(key)
        try:
            return [float(f) for f in raw.split(",") if f.strip() != ""]
        except ValueError:
            raise ConfigurationError(f"{key} must be comma-separated numbers") from None

    def get_names(self, key: str) -> list[str]:
        raw = self.get(key)
        if raw is None or raw == "":
            return []
        return [f.strip() for f in raw.split(",") if f.strip()]

    def path(self, raw: str) -> Path:
        p = Path(raw)
        return p if p.is_absolute() else self.base_dir / p

    def get_path(self, key: str) -> Path:
        return self.path(self.require(key))

    def named_paths(self, key: str) -> list[tuple[str, Path]]:
        """Parse ``name:path[,name:path...]`` lists."""
        out: list[tuple[str, Path]] = []
        for item in self.get_names(key):
            name, sep, raw = item.partition(":")
            if not sep or not name or not raw:
                raise ConfigurationError(f"{key} entries must be name:path, got {item!r}")
            out.append((name, self.path(raw)))
        return out

    def named_path_pairs(self, key: str) -> list[tuple[str, Path, Path]]:
        """Parse ``name:path1:path2[,...]`` lists."""
        out: list[tuple[str, Path, Path]] = []
        for item in self.get_names(key):
            parts = item.split(":")
            if len(parts) != 3 or not all(parts):
                raise ConfigurationError(
                    f"{key} entries must be name:path:path, got {item!r}"
                )
            out.append((parts[0], self.path(parts[1]), self.path(parts[2])))
        return out

    def name_pairs(self, key: str) -> list[tuple[str, str]]:
        """Parse ``i:j[,i:j...]`` resource pair lists."""
        out: list[tuple[str, str]] = []
        for item in self.get_names(key):
            i, sep, j = item.partition(":")
            if not sep or not i or not j:
                raise ConfigurationError(f"{key} entries must be i:j, got {item!r}")
            out.append((i, j))
        return out

    def output_dir(self) -> Path:
        return self.get_path("output_dir")

    def hash(self) -> str:
        """Stable digest of the fully resolved configuration."""
        canon = "\n".join(
            f"{key}={self.values.get(key) or ''}" for key in sorted(KNOWN_KEYS)
        )
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _parse_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParseError("expected key = value", line_no)
            key = key.strip()
            value = value.strip()
            if key not in KNOWN_KEYS:
                raise ConfigurationError(f"line {line_no}: unknown config key {key!r}")
            if key in values:
                raise ConfigurationError(f"line {line_no}: duplicate config key {key!r}")
            values[key] = value
    return values


def load_config(
    path: str | Path,
    overrides: Sequence[tuple[str, str]] | Mapping[str, str] = (),
) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    resolved: dict[str, str | None] = dict(KNOWN_KEYS)
    resolved.update(_parse_file(path))
    if isinstance(overrides, Mapping):
        overrides = list(overrides.items())
    for key, value in overrides:
        if key not in KNOWN_KEYS:
            raise ConfigurationError(f"unknown config key {key!r} in override")
        resolved[key] = value
    return RunConfig(values=resolved, base_dir=path.resolve().parent)
