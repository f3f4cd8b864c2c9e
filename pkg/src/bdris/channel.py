"""Seeded channel realizations for the RIS-aided MISO link.

Large-scale gain follows ``L(d) = L0 (d / D0)^-alpha``. The RIS-receiver
channel is Rayleigh; the transmitter-RIS channel is Rician with a rank-one
line-of-sight part built from half-wavelength ULA steering vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .errors import ChannelError

Point = tuple[float, float]
Link = Literal["ri", "it"]

LOS_MODEL = "rank-one ULA steering, half-wavelength spacing"
STREAM_NAMES = ("h_ri", "h_nlos", "precoder", "tree")


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class Geometry:
    """Positions in meters on a two-dimensional plane."""

    tx: Point = (0.0, 0.0)
    rx: Point = (52.0, 0.0)
    ris: Point = (50.0, 2.0)

    def __post_init__(self) -> None:
        points = {
            name: _point(name, getattr(self, name)) for name in ("tx", "rx", "ris")
        }
        for name, value in points.items():
            object.__setattr__(self, name, value)
        if len(set(points.values())) != 3:
            raise ChannelError("transmitter, receiver and RIS must be distinct points")

    def distances(self) -> tuple[float, float]:
        """``(d_IT, d_RI)``: transmitter-RIS and RIS-receiver distances."""
        return math.dist(self.tx, self.ris), math.dist(self.ris, self.rx)


@dataclass(frozen=True)
class PathLossParams:
    l0_db: float = -30.0
    d0: float = 1.0
    alpha_ri: float = 2.8
    alpha_it: float = 2.0

    def __post_init__(self) -> None:
        if not self.d0 > 0:
            raise ChannelError(f"reference distance must be positive, got {self.d0}")
        if self.alpha_ri < 0 or self.alpha_it < 0:
            raise ChannelError("path-loss exponents must be non-negative")

    def exponent(self, link: Link) -> float:
        if link == "ri":
            return self.alpha_ri
        if link == "it":
            return self.alpha_it
        raise ChannelError(f"unknown link {link!r}, expected 'ri' or 'it'")


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """``h_ri`` has shape ``(N,)``, ``h_it`` has shape ``(N, M)``."""

    h_ri: np.ndarray
    h_it: np.ndarray

    def __post_init__(self) -> None:
        if not (np.all(np.isfinite(self.h_ri)) and np.all(np.isfinite(self.h_it))):
            raise ChannelError("channel realization has non-finite entries")

    @property
    def n(self) -> int:
        return self.h_it.shape[0]

    @property
    def m(self) -> int:
        return self.h_it.shape[1]


@dataclass(frozen=True)
class TrialStreams:
    """Independent generators for one Monte Carlo trial."""

    h_ri: np.random.Generator
    h_nlos: np.random.Generator
    precoder: np.random.Generator
    tree: np.random.Generator


class StreamFactory:
    """Counter-based named random streams keyed by ``(seed, trial, name)``.

    Each stream is a Philox generator seeded from a ``SeedSequence`` whose
    spawn key encodes the trial index and stream name, so a trial's draws do
    not depend on which other trials or streams were consumed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)

    def generator(self, name: str, trial: int = 0) -> np.random.Generator:
        if name not in STREAM_NAMES:
            raise ChannelError(f"unknown stream {name!r}")
        sequence = np.random.SeedSequence(
            self.seed, spawn_key=(int(trial), STREAM_NAMES.index(name))
        )
        return np.random.Generator(np.random.Philox(sequence))

    def trial(self, index: int) -> TrialStreams:
        streams = {name: self.generator(name, index) for name in STREAM_NAMES}
        return TrialStreams(**streams)


def path_loss(d: float, params: PathLossParams, exponent: Link) -> float:
    """Linear power gain ``10^(l0_db/10) (d / d0)^-alpha`` of one link."""
    if not d > 0:
        raise ChannelError(f"distance must be positive, got {d}")
    return db_to_linear(params.l0_db) * (d / params.d0) ** -params.exponent(exponent)


def steering_vector(size: int, angle: float) -> np.ndarray:
    """Unit-modulus response of a half-wavelength ULA toward ``angle`` (rad)."""
    return np.exp(1j * np.pi * np.arange(size) * np.sin(angle))


def los_component(n: int, m: int, geometry: Geometry) -> np.ndarray:
    """Deterministic line-of-sight matrix with ``||H_LoS||_F^2 = N M``."""
    (tx_x, tx_y), (ris_x, ris_y) = geometry.tx, geometry.ris
    departure = math.atan2(ris_y - tx_y, ris_x - tx_x)
    arrival = math.atan2(tx_y - ris_y, tx_x - ris_x)
    return np.outer(steering_vector(n, arrival), steering_vector(m, departure))


def sample_channels(
    n: int,
    m: int,
    geometry: Geometry,
    params: PathLossParams,
    rician_k_db: float,
    rng: Union[np.random.Generator, TrialStreams],
) -> ChannelRealization:
    """Draw ``h_RI`` (Rayleigh) and ``H_IT`` (Rician), large-scale gain included.

    ``rng`` may be a single generator or the named streams of a trial; with
    named streams ``h_RI`` and the NLoS part never share draws.
    """
    if n < 1 or m < 1:
        raise ChannelError(f"need n, m >= 1, got n={n}, m={m}")
    if isinstance(rng, TrialStreams):
        ri_rng, nlos_rng = rng.h_ri, rng.h_nlos
    else:
        ri_rng = nlos_rng = rng
    d_it, d_ri = geometry.distances()
    gain_ri = path_loss(d_ri, params, "ri")
    gain_it = path_loss(d_it, params, "it")
    k = db_to_linear(rician_k_db)

    h_ri = math.sqrt(gain_ri) * _complex_gaussian(ri_rng, (n,))
    nlos = _complex_gaussian(nlos_rng, (n, m))
    los = los_component(n, m, geometry)
    h_it = math.sqrt(gain_it) * (
        math.sqrt(k / (1 + k)) * los + math.sqrt(1 / (1 + k)) * nlos
    )
    return ChannelRealization(h_ri, h_it)


def _complex_gaussian(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Circularly-symmetric standard complex Gaussian draws, ``E|x|^2 = 1``."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def _point(name: str, value) -> Point:
    try:
        x, y = (float(v) for v in value)
    except (TypeError, ValueError) as e:
        raise ChannelError(f"{name} must be an (x, y) pair, got {value!r}") from e
    return (x, y)
