"""Monte Carlo sweeps and circuit-complexity tables."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, TextIO, Union

import networkx
import numpy as np
import scipy

from . import __version__
from .architecture import Kind, admittance_count, build_architecture
from .channel import LOS_MODEL, StreamFactory, sample_channels
from .config import ArchitectureSpec, ScenarioConfig, config_hash, threads_from_env
from .errors import ArchitectureError, ConfigError
from .optimize import optimize_architecture

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    "arch",
    "n",
    "m",
    "group_size",
    "k_db",
    "trials",
    "mean_power_w",
    "stderr_w",
    "mean_iters",
)


@dataclass(frozen=True)
class SweepRow:
    arch: str
    n: int
    m: int
    group_size: Optional[int]
    k_db: float
    trials: int
    mean_power_w: float
    stderr_w: float
    mean_iters: float

    def as_csv(self) -> list[Any]:
        return [
            self.arch,
            self.n,
            self.m,
            "" if self.group_size is None else self.group_size,
            repr(self.k_db),
            self.trials,
            repr(self.mean_power_w),
            repr(self.stderr_w),
            repr(self.mean_iters),
        ]


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_csv(self, out: Union[str, Path, TextIO]) -> None:
        """Write rows with the fixed :data:`SWEEP_COLUMNS` header."""
        if isinstance(out, (str, Path)):
            with open(out, "w", newline="") as f:
                self.to_csv(f)
            return
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(row.as_csv() for row in self.rows)

    def csv_text(self) -> str:
        buffer = io.StringIO()
        self.to_csv(buffer)
        return buffer.getvalue()

    def write_metadata(self, path: Union[str, Path]) -> None:
        with open(path, "w") as f:
            json.dump(self.metadata, f, indent=2, sort_keys=True)

    def find(
        self, arch: str, n: int, m: int, k_db: float, group_size: Optional[int] = None
    ) -> SweepRow:
        for row in self.rows:
            if (row.arch, row.n, row.m, row.k_db, row.group_size) == (
                arch,
                n,
                m,
                k_db,
                group_size,
            ):
                return row
        raise KeyError((arch, n, m, k_db, group_size))

    def gain(
        self,
        numerator: tuple[str, Optional[int]],
        denominator: tuple[str, Optional[int]],
    ) -> dict[tuple[int, int, float], float]:
        """Ratio of mean powers per ``(n, m, k_db)`` grid point.

        Architectures are given as ``(label, group_size)`` pairs.
        """
        ratios = {}
        for row in self.rows:
            if (row.arch, row.group_size) != numerator:
                continue
            other = self.find(denominator[0], row.n, row.m, row.k_db, denominator[1])
            ratios[(row.n, row.m, row.k_db)] = row.mean_power_w / other.mean_power_w
        return ratios


def run_sweep(config: ScenarioConfig, threads: Optional[int] = None) -> SweepResult:
    """Average optimized received power over seeded trials at every grid point.

    All architectures of a trial see the same channel realization. Trials run
    on a thread pool and are reduced in trial order, so the output does not
    depend on ``threads``.
    """
    if not config.architectures:
        raise ConfigError("architectures must be a non-empty list")
    config.check_grid()
    threads = threads or threads_from_env()
    streams = StreamFactory(config.seed)
    logger.info(
        "sweep: %d grid points x %d trials on %d threads",
        len(config.rician_k_db) * len(config.n_list) * len(config.m_list),
        config.trials,
        threads,
    )
    started = time.perf_counter()
    rows: list[SweepRow] = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for k_db in config.rician_k_db:
            for n in config.n_list:
                for m in config.m_list:
                    logger.debug("grid point n=%d m=%d k_db=%g", n, m, k_db)
                    outcomes = list(
                        pool.map(
                            lambda t, n=n, m=m, k=k_db: _run_trial(
                                config, streams, n, m, k, t
                            ),
                            range(config.trials),
                        )
                    )
                    powers = np.array([o[0] for o in outcomes])
                    iters = np.array([o[1] for o in outcomes])
                    for col, spec in enumerate(config.architectures):
                        rows.append(
                            _summarize(spec, n, m, k_db, powers[:, col], iters[:, col])
                        )
    logger.info("sweep finished in %.1f s", time.perf_counter() - started)
    metadata = {
        "seed": config.seed,
        "config": config.to_dict(),
        "config_hash": config_hash(config),
        "versions": {
            "los_model": LOS_MODEL,
            "bdris": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "networkx": networkx.__version__,
        },
    }
    return SweepResult(tuple(rows), metadata)


def _run_trial(
    config: ScenarioConfig,
    streams: StreamFactory,
    n: int,
    m: int,
    k_db: float,
    trial: int,
) -> tuple[list[float], list[int]]:
    ch = sample_channels(
        n, m, config.geometry, config.path_loss, k_db, streams.trial(trial)
    )
    powers, iterations = [], []
    for spec in config.architectures:
        arch = spec.build(n, streams.generator("tree", trial))
        result = optimize_architecture(
            arch,
            ch.h_ri,
            ch.h_it,
            config.z0,
            config.tol,
            config.max_iter,
            streams.generator("precoder", trial),
            p_t=config.p_t,
        )
        powers.append(result.power)
        iterations.append(result.iterations)
    return powers, iterations


def _summarize(
    spec: ArchitectureSpec,
    n: int,
    m: int,
    k_db: float,
    powers: np.ndarray,
    iterations: np.ndarray,
) -> SweepRow:
    trials = powers.size
    stderr = float(np.std(powers, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return SweepRow(
        arch=spec.label,
        n=n,
        m=m,
        group_size=spec.group_size,
        k_db=k_db,
        trials=trials,
        mean_power_w=float(np.mean(powers)),
        stderr_w=stderr,
        mean_iters=float(np.mean(iterations)),
    )


@dataclass(frozen=True)
class ComplexityTable:
    """Tunable admittance counts; ``None`` where a group size does not divide N."""

    columns: tuple[str, ...]
    rows: tuple[dict[str, Optional[int]], ...]

    def row(self, n: int) -> dict[str, Optional[int]]:
        for row in self.rows:
            if row["n"] == n:
                return row
        raise KeyError(n)

    def to_csv(self, out: TextIO) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow("" if row[c] is None else row[c] for c in self.columns)


def complexity_table(
    n_values: Iterable[int], group_sizes: Iterable[int], strict: bool = True
) -> ComplexityTable:
    """Count admittances of every architecture for each ``n``.

    Args:
        n_values: Numbers of RIS ports.
        group_sizes: Group sizes for the forest and group columns.
        strict: Raise when a group size does not divide some ``n``; otherwise
            leave that cell empty.

    Raises:
        ConfigError: On empty inputs or, when ``strict``, a divisibility violation.
    """
    n_values = list(n_values)
    group_sizes = list(group_sizes)
    if not n_values or not group_sizes:
        raise ConfigError("complexity table needs at least one n and one group size")
    columns = ["n", "fully"]
    columns += [f"group_{g}" for g in group_sizes]
    columns += ["tree"]
    columns += [f"forest_{g}" for g in group_sizes]
    columns += ["single"]
    rows = []
    for n in n_values:
        row: dict[str, Optional[int]] = {"n": n}
        for kind in (Kind.FULLY, Kind.TRIDIAGONAL, Kind.SINGLE):
            column = "tree" if kind is Kind.TRIDIAGONAL else kind.value
            row[column] = admittance_count(build_architecture(kind, n))
        for g in group_sizes:
            for kind in (Kind.GROUP, Kind.FOREST):
                try:
                    count = admittance_count(build_architecture(kind, n, g))
                except ArchitectureError as e:
                    if strict:
                        raise ConfigError(str(e)) from e
                    count = None
                row[f"{kind.value}_{g}"] = count
        rows.append(row)
    return ComplexityTable(tuple(columns), tuple(rows))
