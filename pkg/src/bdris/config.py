"""Scenario configuration: JSON schema, defaults and validation."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .architecture import Architecture, Kind, build_architecture
from .channel import Geometry, PathLossParams
from .errors import ArchitectureError, ChannelError, ConfigError
from .graph import random_spanning_tree
from .network import Z0_DEFAULT
from .optimize import MAX_ITER_DEFAULT, TOL_DEFAULT

THREADS_ENV = "BDRIS_THREADS"

_TOP_LEVEL_KEYS = frozenset(
    {
        "geometry",
        "path_loss",
        "rician_k_db",
        "p_t_mw",
        "z0",
        "n_list",
        "m_list",
        "trials",
        "seed",
        "tol",
        "max_iter",
        "architectures",
    }
)
_GROUPED = frozenset({Kind.FOREST, Kind.GROUP})


@dataclass(frozen=True)
class ArchitectureSpec:
    """One entry of the ``architectures`` list.

    The generic ``tree`` kind draws a uniform random spanning tree per trial.
    """

    kind: Kind
    group_size: Optional[int] = None
    inner: Kind = Kind.TRIDIAGONAL

    @property
    def label(self) -> str:
        if self.kind is Kind.FOREST:
            return f"forest-{self.inner.value}"
        return self.kind.value

    def build(self, n: int, rng: Optional[np.random.Generator] = None) -> Architecture:
        tree = None
        if self.kind is Kind.TREE:
            tree = random_spanning_tree(n, rng or np.random.default_rng(0))
        return build_architecture(
            self.kind, n, self.group_size, inner=self.inner, tree=tree
        )

    def to_dict(self) -> Union[str, dict[str, Any]]:
        if self.kind not in _GROUPED:
            return self.kind.value
        data: dict[str, Any] = {"kind": self.kind.value, "group_size": self.group_size}
        if self.kind is Kind.FOREST:
            data["inner"] = self.inner.value
        return data

    @classmethod
    def from_dict(cls, data: Union[str, dict[str, Any]]) -> ArchitectureSpec:
        if isinstance(data, str):
            data = {"kind": data}
        if not isinstance(data, dict):
            raise ConfigError(
                f"architectures: entry must be a string or object, got {data!r}"
            )
        unknown = set(data) - {"kind", "group_size", "inner"}
        if unknown:
            raise ConfigError(f"architectures: unknown key {sorted(unknown)[0]!r}")
        try:
            kind = Kind(data.get("kind"))
            inner = Kind(data.get("inner", Kind.TRIDIAGONAL.value))
        except ValueError as e:
            raise ConfigError(f"architectures: {e}") from e
        group_size = data.get("group_size")
        if kind in _GROUPED:
            group_size = _positive_int("architectures.group_size", group_size)
        elif group_size is not None:
            raise ConfigError(f"architectures: {kind.value} takes no group_size")
        if kind is Kind.FOREST and inner not in (Kind.TRIDIAGONAL, Kind.ARROWHEAD):
            raise ConfigError("architectures.inner must be tridiagonal or arrowhead")
        return cls(kind, group_size, inner)

    @classmethod
    def parse(cls, text: str) -> ArchitectureSpec:
        """Command-line form: ``tridiagonal``, ``group:8``, ``forest-arrowhead:4``."""
        name, _, size = text.partition(":")
        kind, _, inner = name.partition("-")
        data: dict[str, Any] = {"kind": kind}
        if inner:
            data["inner"] = inner
        if size:
            try:
                data["group_size"] = int(size)
            except ValueError as e:
                raise ConfigError(f"invalid group size in {text!r}") from e
        return cls.from_dict(data)


def default_architectures() -> tuple[ArchitectureSpec, ...]:
    return (
        ArchitectureSpec(Kind.SINGLE),
        ArchitectureSpec(Kind.FOREST, 2),
        ArchitectureSpec(Kind.FOREST, 4),
        ArchitectureSpec(Kind.FOREST, 8),
        ArchitectureSpec(Kind.GROUP, 8),
        ArchitectureSpec(Kind.TRIDIAGONAL),
        ArchitectureSpec(Kind.FULLY),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved experiment description."""

    geometry: Geometry = field(default_factory=Geometry)
    path_loss: PathLossParams = field(default_factory=PathLossParams)
    rician_k_db: tuple[float, ...] = (0.0, 10.0)
    p_t_mw: float = 10.0
    z0: float = Z0_DEFAULT
    n_list: tuple[int, ...] = (8, 16, 32, 64)
    m_list: tuple[int, ...] = (2, 8)
    trials: int = 1000
    seed: int = 0
    tol: float = TOL_DEFAULT
    max_iter: int = MAX_ITER_DEFAULT
    architectures: tuple[ArchitectureSpec, ...] = field(
        default_factory=default_architectures
    )

    @property
    def p_t(self) -> float:
        """Transmit power in watts."""
        return self.p_t_mw * 1e-3

    @classmethod
    def default(cls) -> ScenarioConfig:
        return cls()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ScenarioConfig:
        """Validate a JSON document; omitted keys take their defaults."""
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - _TOP_LEVEL_KEYS
        if unknown:
            raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
        defaults = cls()
        kwargs: dict[str, Any] = {}
        try:
            if "geometry" in data:
                kwargs["geometry"] = Geometry(**_object("geometry", data["geometry"]))
            if "path_loss" in data:
                kwargs["path_loss"] = PathLossParams(
                    **_object("path_loss", data["path_loss"])
                )
        except TypeError as e:
            raise ConfigError(f"geometry/path_loss: {e}") from e
        except ChannelError as e:
            raise ConfigError(str(e)) from e
        if "rician_k_db" in data:
            k = data["rician_k_db"]
            k_list = k if isinstance(k, list) else [k]
            kwargs["rician_k_db"] = tuple(
                _number("rician_k_db", v) for v in _nonempty("rician_k_db", k_list)
            )
        for key in ("p_t_mw", "z0", "tol"):
            if key in data:
                kwargs[key] = _number(key, data[key], positive=True)
        for key in ("n_list", "m_list"):
            if key in data:
                kwargs[key] = tuple(
                    _positive_int(key, v) for v in _nonempty(key, data[key])
                )
        for key in ("trials", "max_iter"):
            if key in data:
                kwargs[key] = _positive_int(key, data[key])
        if "seed" in data:
            seed = data["seed"]
            if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
                raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
            kwargs["seed"] = seed
        if "architectures" in data:
            kwargs["architectures"] = tuple(
                ArchitectureSpec.from_dict(entry)
                for entry in _nonempty("architectures", data["architectures"])
            )
        config = replace(defaults, **kwargs)
        config.check_grid()
        return config

    @classmethod
    def load(cls, path: Union[str, Path]) -> ScenarioConfig:
        """Read a JSON config file.

        ``OSError`` and ``json.JSONDecodeError`` propagate unchanged so callers
        can tell an unreadable file from a schema violation.
        """
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def with_seed(self, seed: int) -> ScenarioConfig:
        return replace(self, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        return {
            "geometry": {
                "tx": list(self.geometry.tx),
                "rx": list(self.geometry.rx),
                "ris": list(self.geometry.ris),
            },
            "path_loss": {
                "l0_db": self.path_loss.l0_db,
                "d0": self.path_loss.d0,
                "alpha_ri": self.path_loss.alpha_ri,
                "alpha_it": self.path_loss.alpha_it,
            },
            "rician_k_db": list(self.rician_k_db),
            "p_t_mw": self.p_t_mw,
            "z0": self.z0,
            "n_list": list(self.n_list),
            "m_list": list(self.m_list),
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "architectures": [spec.to_dict() for spec in self.architectures],
        }

    def check_grid(self) -> None:
        """Every grouped architecture must divide every ``n`` in the grid."""
        for spec in self.architectures:
            for n in self.n_list:
                try:
                    spec.build(n)
                except ArchitectureError as e:
                    message = f"architectures ({spec.label}, n={n}): {e}"
                    raise ConfigError(message) from e


def config_hash(config: ScenarioConfig) -> str:
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def threads_from_env() -> int:
    """Worker count capped by ``BDRIS_THREADS``."""
    available = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return available
    try:
        threads = int(raw)
    except ValueError as e:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from e
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {threads}")
    return threads


def _object(key: str, value: Any) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError(f"{key} must be an object")
    return value


def _nonempty(key: str, value: Any) -> list[Any]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key} must be a non-empty list")
    return value


def _number(key: str, value: Any, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{key} must be positive, got {value}")
    return float(value)


def _positive_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{key} must be a positive integer, got {value!r}")
    return value
