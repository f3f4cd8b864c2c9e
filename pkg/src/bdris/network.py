"""Multiport network conversions and received-power evaluation.

Scattering, admittance and susceptance matrices of the reconfigurable
impedance network are related through the reference impedance ``z0``::

    Theta = (I + z0 Y)^-1 (I - z0 Y),     Y = jB for a lossless network

Matrix indices are 0-based in numpy; port numbers and edges stay 1-based.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np
import scipy.linalg

from .architecture import Architecture, susceptance_support
from .errors import NetworkError

Z0_DEFAULT = 50.0
SYMMETRY_RTOL = 1e-10
UNITARY_RTOL = 1e-10
PRECODER_ATOL = 1e-12

ArrayLike = Union[np.ndarray, Sequence[Any]]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


def is_symmetric(m: np.ndarray, rtol: float = SYMMETRY_RTOL) -> bool:
    m = np.asarray(m)
    scale = np.linalg.norm(m)
    return bool(np.linalg.norm(m - m.T) <= rtol * max(scale, 1.0))


def is_unitary(m: np.ndarray, rtol: float = UNITARY_RTOL) -> bool:
    m = np.asarray(m)
    n = m.shape[0]
    gram = m.conj().T @ m
    return bool(np.linalg.norm(gram - np.eye(n)) <= rtol * np.sqrt(n))


@dataclass(frozen=True, eq=False)
class SusceptanceMatrix:
    """Real symmetric susceptance matrix ``B`` in siemens."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        b = np.asarray(self.entries)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise NetworkError(f"susceptance matrix must be square, got {b.shape}")
        if np.iscomplexobj(b):
            if np.any(b.imag != 0):
                raise NetworkError("susceptance matrix must be real")
            b = b.real
        if not np.all(np.isfinite(b)):
            raise NetworkError("susceptance matrix has non-finite entries")
        if not is_symmetric(b):
            raise NetworkError("susceptance matrix must be symmetric")
        # store the exactly symmetric upper triangle mirror
        b = np.triu(b) + np.triu(b, 1).T
        object.__setattr__(self, "entries", _frozen(b.astype(float)))

    @classmethod
    def from_array(
        cls, b: ArrayLike, arch: Optional[Architecture] = None
    ) -> SusceptanceMatrix:
        matrix = cls(np.asarray(b, dtype=float))
        if arch is not None:
            matrix.check_support(arch)
        return matrix

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def check_support(self, arch: Architecture) -> None:
        """Raise if ``B`` is nonzero outside the architecture's support."""
        if arch.n != self.n:
            raise NetworkError(f"matrix has {self.n} ports, architecture {arch.n}")
        _check_support(self.entries, arch)


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """Complex symmetric unitary scattering matrix of a lossless network."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        theta = np.asarray(self.entries, dtype=complex)
        if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
            raise NetworkError(f"scattering matrix must be square, got {theta.shape}")
        if not is_symmetric(theta):
            raise NetworkError("scattering matrix must be symmetric")
        if not is_unitary(theta):
            raise NetworkError("scattering matrix must be unitary")
        object.__setattr__(self, "entries", _frozen(theta))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ComponentValues:
    """Tunable admittances in siemens.

    ``grounded[k]`` connects port ``k + 1`` to ground; ``interconnecting`` maps
    a 1-based edge ``(n, m)`` to the admittance between ports ``n`` and ``m``.
    """

    grounded: tuple[complex, ...]
    interconnecting: Mapping[tuple[int, int], complex]


def scattering_from_admittance(y: ArrayLike, z0: float = Z0_DEFAULT) -> np.ndarray:
    """``Theta = (I + z0 Y)^-1 (I - z0 Y)``; unitary only for lossless ``Y``."""
    y = np.asarray(y, dtype=complex)
    _check_z0(z0)
    eye = np.eye(y.shape[0])
    try:
        lu = scipy.linalg.lu_factor(eye + z0 * y, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise NetworkError(f"cannot factor I + z0*Y: {e}") from e
    if np.any(np.abs(np.diag(lu[0])) == 0):
        raise NetworkError("I + z0*Y is singular")
    return scipy.linalg.lu_solve(lu, eye - z0 * y)


def scattering_from_susceptance(
    b: SusceptanceMatrix | ArrayLike, z0: float = Z0_DEFAULT
) -> ScatteringMatrix:
    """Scattering matrix of a lossless reciprocal network with susceptance ``b``.

    ``I + j z0 B`` is never singular for real symmetric ``B`` because its
    eigenvalues are ``1 + j z0 lambda`` with real ``lambda``.
    """
    if not isinstance(b, SusceptanceMatrix):
        b = SusceptanceMatrix(np.asarray(b))
    theta = scattering_from_admittance(1j * b.entries, z0)
    # reciprocity holds exactly in theory; remove rounding asymmetry
    return ScatteringMatrix((theta + theta.T) / 2)


def susceptance_from_scattering(
    theta: ScatteringMatrix | ArrayLike, z0: float = Z0_DEFAULT
) -> SusceptanceMatrix:
    """Inverse of :func:`scattering_from_susceptance`."""
    _check_z0(z0)
    t = theta.entries if isinstance(theta, ScatteringMatrix) else np.asarray(theta)
    eye = np.eye(t.shape[0])
    # B (I + Theta) = (I - Theta) / (j z0), solved through the transpose
    try:
        lhs = scipy.linalg.solve((eye + t).T, (eye - t).T).T
    except np.linalg.LinAlgError as e:
        raise NetworkError("I + Theta is singular") from e
    b = lhs / (1j * z0)
    return SusceptanceMatrix((b.real + b.real.T) / 2)


def components_from_admittance(y: ArrayLike, arch: Architecture) -> ComponentValues:
    """Pick tunable admittances that realize ``y`` on the architecture's graph.

    The round trip through :func:`admittance_from_components` is exact for
    dyadic entries. Otherwise the row sums and the diagonal rebuild round, so
    the diagonal comes back within a few ulps of the row magnitude.
    """
    y = np.asarray(y, dtype=complex)
    if y.shape != (arch.n, arch.n):
        raise NetworkError(f"admittance matrix must be {arch.n}x{arch.n}")
    _check_support(y, arch)
    grounded = tuple(complex(v) for v in y.sum(axis=1))
    interconnecting = {(a, b): complex(-y[a - 1, b - 1]) for a, b in arch.graph.edges}
    return ComponentValues(grounded, interconnecting)


def admittance_from_components(c: ComponentValues, n: int) -> np.ndarray:
    """Admittance matrix of ``n`` ports from grounded and interconnecting values.

    Interconnecting keys are 1-based port pairs ``(i, j)`` with ``i != j``.
    """
    if len(c.grounded) != n:
        raise NetworkError(f"expected {n} grounded admittances, got {len(c.grounded)}")
    for a, b in c.interconnecting:
        if a == b:
            raise NetworkError(f"interconnecting admittance {(a, b)} is a self-loop")
        if not (1 <= a <= n and 1 <= b <= n):
            raise NetworkError(f"interconnecting admittance {(a, b)} outside 1..{n}")
    y = np.diag(np.asarray(c.grounded, dtype=complex))
    for (a, b), value in c.interconnecting.items():
        i, j = a - 1, b - 1
        y[i, j] = y[j, i] = -value
        y[i, i] += value
        y[j, j] += value
    return y


def received_power(
    h_ri: ArrayLike,
    theta: ScatteringMatrix | ArrayLike,
    h_it: ArrayLike,
    w: ArrayLike,
    p_t: float,
) -> float:
    """``p_t |h_RI Theta H_IT w|^2`` in watts."""
    h_ri = _row(h_ri)
    h_it = _matrix(h_it)
    w = np.ravel(np.asarray(w, dtype=complex))
    if abs(np.linalg.norm(w) - 1.0) > PRECODER_ATOL:
        raise NetworkError(f"precoder must have unit norm, got {np.linalg.norm(w)}")
    t = theta.entries if isinstance(theta, ScatteringMatrix) else np.asarray(theta)
    return float(p_t * abs(h_ri @ t @ h_it @ w) ** 2)


def upper_bound(h_ri: ArrayLike, h_it: ArrayLike, p_t: float) -> float:
    """``p_t ||h_RI||^2 sigma_max(H_IT)^2``, reachable by a connected BD-RIS."""
    h_ri = _row(h_ri)
    h_it = _matrix(h_it)
    return float(p_t * np.vdot(h_ri, h_ri).real * np.linalg.norm(h_it, 2) ** 2)


def group_upper_bound(
    h_ri: ArrayLike,
    h_it_eff: ArrayLike,
    partition: Iterable[Iterable[int]],
    p_t: float,
) -> float:
    """``p_t (sum_g ||h_RI,g|| ||h_IT,g^eff||)^2`` for a block-diagonal network."""
    h_ri = _row(h_ri)
    h_eff = np.ravel(np.asarray(h_it_eff, dtype=complex))
    if h_eff.shape != h_ri.shape:
        raise NetworkError("effective channel length must match h_RI")
    groups = check_partition(partition, h_ri.size)
    total = sum(
        np.linalg.norm(h_ri[idx]) * np.linalg.norm(h_eff[idx]) for idx in groups
    )
    return float(p_t * total**2)


def check_partition(partition: Iterable[Iterable[int]], n: int) -> list[np.ndarray]:
    """Validate a 1-based port partition; return 0-based index arrays."""
    groups = [np.asarray(sorted(g), dtype=int) for g in partition]
    ports = sorted(int(p) for g in groups for p in g)
    if any(g.size == 0 for g in groups) or ports != list(range(1, n + 1)):
        raise NetworkError(f"partition does not cover ports 1..{n} exactly once")
    return [g - 1 for g in groups]


def matrix_to_json(m: ArrayLike) -> list[Any]:
    """Nested row-major lists of ``[re, im]`` pairs (vectors nest one level)."""
    m = np.asarray(m, dtype=complex)
    return np.stack([m.real, m.imag], axis=-1).tolist()


def matrix_from_json(data: Sequence[Any]) -> np.ndarray:
    pairs = np.asarray(data, dtype=float)
    if pairs.ndim < 2 or pairs.shape[-1] != 2:
        raise NetworkError("expected nested lists of [re, im] pairs")
    return pairs[..., 0] + 1j * pairs[..., 1]


def _check_support(m: np.ndarray, arch: Architecture) -> None:
    allowed = np.zeros(m.shape, dtype=bool)
    rows, cols = zip(*susceptance_support(arch))
    allowed[np.asarray(rows) - 1, np.asarray(cols) - 1] = True
    bad = np.argwhere((m != 0) & ~allowed)
    if bad.size:
        i, j = bad[0] + 1
        raise NetworkError(
            f"entry ({i}, {j}) is nonzero but ports {i} and {j} are not connected"
        )


def _check_z0(z0: float) -> None:
    if not z0 > 0:
        raise NetworkError(f"reference impedance must be positive, got {z0}")


def _row(h: ArrayLike) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim == 2 and h.shape[0] != 1:
        raise NetworkError(f"h_RI must be a row vector, got shape {h.shape}")
    return np.ravel(h)


def _matrix(h: ArrayLike) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim == 1:
        h = h[:, np.newaxis]
    if h.ndim != 2:
        raise NetworkError(f"H_IT must be a matrix, got shape {h.shape}")
    return h
