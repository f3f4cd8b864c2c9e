"""Received-power maximization for tree-, forest-, group- and single-connected RIS.

A tree-connected RIS reaches the upper bound ``P_T ||h_RI||^2 ||H_IT||^2``
for every channel: the condition ``Theta u_IT = h_RI^H / ||h_RI||`` becomes a
real linear system in the ``2N - 1`` free entries of ``B`` whose solution is
unique. Forest-connected architectures solve that system per group inside an
alternating optimization with the MRT precoder.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Union

import numpy as np
import scipy.linalg

from .architecture import TREE_KINDS, Architecture, Kind, build_architecture
from .errors import ArchitectureError, DegenerateChannelError
from .graph import RisGraph, is_tree, path_graph
from .network import (
    Z0_DEFAULT,
    ArrayLike,
    ScatteringMatrix,
    SusceptanceMatrix,
    matrix_to_json,
    scattering_from_susceptance,
    upper_bound,
)

logger = logging.getLogger(__name__)

P_T_DEFAULT = 1e-2
TOL_DEFAULT = 1e-8
MAX_ITER_DEFAULT = 100
RANK_RTOL = 1e-10
PHASE_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Real system ``A x = b`` for the free entries of a tree's ``B``.

    ``unknown_layout[k]`` is the 1-based ``(i, j)`` position of ``x[k]``: the
    ``N`` diagonal entries first, then one entry per edge in edge order.
    """

    a_matrix: np.ndarray
    b_vector: np.ndarray
    unknown_layout: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return self.b_vector.size // 2

    @property
    def augmented(self) -> np.ndarray:
        return np.column_stack([self.a_matrix, self.b_vector])

    def assemble(self, x: np.ndarray) -> np.ndarray:
        """Place the unknowns into a symmetric ``N x N`` matrix."""
        b = np.zeros((self.n, self.n))
        for value, (i, j) in zip(x, self.unknown_layout):
            b[i - 1, j - 1] = b[j - 1, i - 1] = value
        return b


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    susceptance: SusceptanceMatrix
    scattering: ScatteringMatrix
    precoder: np.ndarray
    power: float
    bound: float
    iterations: int = 1
    objective_history: tuple[float, ...] = field(default=())
    label: str = ""

    @property
    def ratio(self) -> float:
        return self.power / self.bound

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "power": self.power,
            "bound": self.bound,
            "ratio": self.ratio,
            "iterations": self.iterations,
            "objective_history": list(self.objective_history),
            "susceptance": self.susceptance.entries.tolist(),
            "scattering": matrix_to_json(self.scattering.entries),
            "precoder": matrix_to_json(self.precoder),
        }


def dominant_left_singular_vector(h: ArrayLike) -> np.ndarray:
    """Unit vector ``u`` maximizing ``||h^H u||``.

    The phase is fixed so the first entry with modulus above ``1e-12`` is
    real and positive.
    """
    h = np.asarray(h, dtype=complex)
    u, _, _ = _dominant_triplet(h[:, np.newaxis] if h.ndim == 1 else h)
    return u


def coefficient_matrix(graph: RisGraph, alpha: ArrayLike) -> np.ndarray:
    """``A = [[Re A1, Re A2], [Im A1, Im A2]]`` with ``A1 = diag(alpha)``.

    Column ``l`` of ``A2`` holds ``alpha[n_l]`` in row ``m_l`` and
    ``alpha[m_l]`` in row ``n_l`` for the ``l``-th edge ``(n_l, m_l)``.
    """
    alpha = np.ravel(np.asarray(alpha, dtype=complex))
    n = graph.n
    a2 = np.zeros((n, len(graph.edges)), dtype=complex)
    for col, (p, q) in enumerate(graph.edges):
        a2[q - 1, col] = alpha[p - 1]
        a2[p - 1, col] = alpha[q - 1]
    a_complex = np.hstack([np.diag(alpha), a2])
    return np.vstack([a_complex.real, a_complex.imag])


def build_linear_system(
    tree: Union[Architecture, RisGraph],
    h_ri: ArrayLike,
    u_it: ArrayLike,
    z0: float = Z0_DEFAULT,
) -> LinearSystem:
    """Linear system whose solution maps ``u_it`` onto ``h_ri^H / ||h_ri||``."""
    graph = tree.graph if isinstance(tree, Architecture) else tree
    if not is_tree(graph):
        raise ArchitectureError("linear system is only defined for tree graphs")
    h = np.ravel(np.asarray(h_ri, dtype=complex))
    u = np.ravel(np.asarray(u_it, dtype=complex))
    if h.size != graph.n or u.size != graph.n:
        raise ArchitectureError(f"channels must have {graph.n} entries")
    norm = np.linalg.norm(h)
    if norm == 0:
        raise DegenerateChannelError("h_RI is zero")
    h_hat_h = np.conj(h) / norm
    alpha = 1j * z0 * (u + h_hat_h)
    beta = u - h_hat_h
    layout = tuple((v, v) for v in graph.vertices) + graph.edges
    return LinearSystem(
        a_matrix=coefficient_matrix(graph, alpha),
        b_vector=np.concatenate([beta.real, beta.imag]),
        unknown_layout=layout,
    )


def solve_least_squares(system: LinearSystem) -> np.ndarray:
    """Solve through a column-pivoted QR factorization of ``A``.

    Raises:
        DegenerateChannelError: If ``A`` is numerically rank deficient.
    """
    a, b = system.a_matrix, system.b_vector
    q, r, perm = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size and diag[-1] <= RANK_RTOL * diag[0]:
        rank = int(np.count_nonzero(diag > RANK_RTOL * diag[0]))
        raise DegenerateChannelError(
            f"coefficient matrix has rank {rank} < {a.shape[1]}"
        )
    z = scipy.linalg.solve_triangular(r, q.T @ b)
    x = np.empty_like(z)
    x[perm] = z
    return x


def solve_normal_equations(system: LinearSystem) -> np.ndarray:
    """``x = (A^T A)^-1 A^T b``."""
    a, b = system.a_matrix, system.b_vector
    return scipy.linalg.solve(a.T @ a, a.T @ b, assume_a="pos")


def numerical_rank(matrix: np.ndarray, rtol: float = 1e-8) -> int:
    """Number of singular values above ``rtol * sigma_max``."""
    s = scipy.linalg.svdvals(matrix)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def tree_optimize(
    h_ri: ArrayLike,
    h_it: ArrayLike,
    tree: Architecture,
    z0: float = Z0_DEFAULT,
    *,
    p_t: float = P_T_DEFAULT,
) -> OptimizationResult:
    """Closed-form global optimum of a tree-connected RIS with MRT precoding."""
    h, big_h = _channels(h_ri, h_it, tree.n)
    if not is_tree(tree.graph):
        raise ArchitectureError(f"{tree.label} architecture is not tree-connected")
    u, _, v = _dominant_triplet(big_h)
    b = _solve_tree(tree.graph, h, u, z0)
    return _result(h, big_h, b, v, z0, p_t, label=tree.label)


def fully_optimize(
    h_ri: ArrayLike,
    h_it: ArrayLike,
    z0: float = Z0_DEFAULT,
    *,
    p_t: float = P_T_DEFAULT,
) -> OptimizationResult:
    """Fully-connected optimum.

    The complete graph contains every tree, so the path-graph solution is a
    feasible fully-connected network that already reaches the upper bound.
    """
    h, big_h = _channels(h_ri, h_it)
    u, _, v = _dominant_triplet(big_h)
    b = _solve_tree(path_graph(h.size), h, u, z0)
    return _result(h, big_h, b, v, z0, p_t, label=Kind.FULLY.value)


def forest_b_update(
    h_ri: ArrayLike,
    h_it_eff: ArrayLike,
    forest: Architecture,
    z0: float = Z0_DEFAULT,
) -> SusceptanceMatrix:
    """Optimal block-diagonal ``B`` for a fixed effective channel ``H_IT w``.

    Each group solves the tree system that maps its normalized effective
    channel onto its normalized ``h_RI`` block, which makes every group's
    contribution real positive and reaches the group upper bound.
    """
    h = np.ravel(np.asarray(h_ri, dtype=complex))
    h_eff = np.ravel(np.asarray(h_it_eff, dtype=complex))
    if h.size != forest.n or h_eff.size != forest.n:
        raise ArchitectureError(f"channels must have {forest.n} entries")
    b = np.zeros((forest.n, forest.n))
    for ports in forest.groups:
        idx = np.asarray(ports) - 1
        sub = forest.graph.subgraph(ports)
        if not is_tree(sub):
            raise ArchitectureError(f"group {ports} is not tree-connected")
        e = h_eff[idx]
        norm = np.linalg.norm(e)
        if norm == 0:
            raise DegenerateChannelError(f"effective channel of group {ports} is zero")
        b[np.ix_(idx, idx)] = _solve_tree(sub, h[idx], e / norm, z0)
    return SusceptanceMatrix(b)


def forest_optimize(
    h_ri: ArrayLike,
    h_it: ArrayLike,
    forest: Architecture,
    z0: float = Z0_DEFAULT,
    tol: float = TOL_DEFAULT,
    max_iter: int = MAX_ITER_DEFAULT,
    rng: Optional[np.random.Generator] = None,
    *,
    p_t: float = P_T_DEFAULT,
) -> OptimizationResult:
    """Alternate the per-group closed-form ``B`` update with the MRT precoder.

    A forest with a single group is a tree and gets the closed-form optimum in
    one ``B`` update.
    """
    h, big_h = _channels(h_ri, h_it, forest.n)
    if forest.kind not in (Kind.FOREST, *TREE_KINDS):
        raise ArchitectureError(f"cannot run the forest scheme on {forest.label}")
    if len(forest.groups) == 1:
        if not is_tree(forest.graph):
            raise ArchitectureError(f"{forest.label} group is not tree-connected")
        u, _, v = _dominant_triplet(big_h)
        b = _solve_tree(forest.graph, h, u, z0)
        return _result(h, big_h, b, v, z0, p_t, label=forest.label)

    def b_step(w: np.ndarray) -> np.ndarray:
        return forest_b_update(h, big_h @ w, forest, z0).entries

    return _alternate(h, big_h, b_step, z0, p_t, tol, max_iter, rng, forest.label)


def group_optimize(
    h_ri: ArrayLike,
    h_it: ArrayLike,
    group_size: int,
    tol: float = TOL_DEFAULT,
    max_iter: int = MAX_ITER_DEFAULT,
    rng: Optional[np.random.Generator] = None,
    z0: float = Z0_DEFAULT,
    *,
    p_t: float = P_T_DEFAULT,
) -> OptimizationResult:
    """Group-connected baseline.

    Every group of a group-connected RIS contains a tree, and that tree alone
    already reaches the group upper bound, so the forest scheme with
    tridiagonal groups returns an optimal group-connected solution.
    """
    h, big_h = _channels(h_ri, h_it)
    forest = build_architecture(Kind.FOREST, h.size, group_size)
    result = forest_optimize(h, big_h, forest, z0, tol, max_iter, rng, p_t=p_t)
    return replace(result, label=Kind.GROUP.value)


def single_optimize(
    h_ri: ArrayLike,
    h_it: ArrayLike,
    tol: float = TOL_DEFAULT,
    max_iter: int = MAX_ITER_DEFAULT,
    rng: Optional[np.random.Generator] = None,
    z0: float = Z0_DEFAULT,
    *,
    p_t: float = P_T_DEFAULT,
) -> OptimizationResult:
    """Single-connected baseline: co-phase each port, then MRT, until converged."""
    h, big_h = _channels(h_ri, h_it)

    def b_step(w: np.ndarray) -> np.ndarray:
        theta = -np.angle(h * (big_h @ w))
        # e^{j theta} = (1 - j z0 b) / (1 + j z0 b)
        return np.diag(-np.tan(theta / 2) / z0)

    return _alternate(h, big_h, b_step, z0, p_t, tol, max_iter, rng, Kind.SINGLE.value)


def optimize_architecture(
    arch: Architecture,
    h_ri: ArrayLike,
    h_it: ArrayLike,
    z0: float = Z0_DEFAULT,
    tol: float = TOL_DEFAULT,
    max_iter: int = MAX_ITER_DEFAULT,
    rng: Optional[np.random.Generator] = None,
    *,
    p_t: float = P_T_DEFAULT,
) -> OptimizationResult:
    """Run the optimizer that matches ``arch.kind``."""
    if arch.kind is Kind.SINGLE:
        return single_optimize(h_ri, h_it, tol, max_iter, rng, z0, p_t=p_t)
    if arch.kind in TREE_KINDS:
        return tree_optimize(h_ri, h_it, arch, z0, p_t=p_t)
    if arch.kind is Kind.FOREST:
        return forest_optimize(h_ri, h_it, arch, z0, tol, max_iter, rng, p_t=p_t)
    if arch.kind is Kind.GROUP:
        return group_optimize(
            h_ri, h_it, arch.group_size, tol, max_iter, rng, z0, p_t=p_t
        )
    return fully_optimize(h_ri, h_it, z0, p_t=p_t)


def _alternate(
    h: np.ndarray,
    big_h: np.ndarray,
    b_step,
    z0: float,
    p_t: float,
    tol: float,
    max_iter: int,
    rng: Optional[np.random.Generator],
    label: str,
) -> OptimizationResult:
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    w = _initial_precoder(big_h.shape[1], rng)
    history: list[float] = []
    converged = False
    b = np.zeros((h.size, h.size))
    for iteration in range(1, max_iter + 1):
        b = b_step(w)
        theta = scattering_from_susceptance(b, z0).entries
        g = h @ theta @ big_h
        g_norm = np.linalg.norm(g)
        if g_norm == 0:
            raise DegenerateChannelError("cascaded channel vanished")
        w = np.conj(g) / g_norm
        history.append(float(p_t * g_norm**2))
        logger.debug("%s iteration %d: power %.6e W", label, iteration, history[-1])
        if len(history) > 1 and abs(history[-1] - history[-2]) <= tol * history[-2]:
            converged = True
            break
    if not converged and max_iter > 1:
        logger.warning("%s did not converge in %d iterations", label, max_iter)
    result = _result(h, big_h, b, w, z0, p_t, label=label)
    return replace(result, iterations=iteration, objective_history=tuple(history))


def _initial_precoder(m: int, rng: Optional[np.random.Generator]) -> np.ndarray:
    if m == 1:
        return np.ones(1, dtype=complex)
    rng = rng if rng is not None else np.random.Generator(np.random.Philox(0))
    w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return w / np.linalg.norm(w)


def _solve_tree(graph: RisGraph, h: np.ndarray, u: np.ndarray, z0: float) -> np.ndarray:
    if graph.n == 1:
        return _phase_match(h[0], u[0], z0)
    system = build_linear_system(graph, h, u, z0)
    return system.assemble(solve_least_squares(system))


def _phase_match(h: complex, u: complex, z0: float) -> np.ndarray:
    """``1 x 1`` susceptance with ``e^{j theta} u = conj(h) / |h|``."""
    if h == 0 or u == 0:
        raise DegenerateChannelError("channel entry is zero")
    theta = np.angle(np.conj(h) / u)
    # e^{j theta} = (1 - j z0 b) / (1 + j z0 b); theta = pi gives a huge finite b
    return np.array([[-np.tan(theta / 2) / z0]])


def _dominant_triplet(h: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    """``(u, s, v)`` with ``h v = s u`` and the phase convention applied to both."""
    if not np.any(h):
        raise DegenerateChannelError("channel matrix is zero")
    left, s, right_h = scipy.linalg.svd(h, full_matrices=False)
    u = left[:, 0]
    v = np.conj(right_h[0])
    lead = u[np.argmax(np.abs(u) > PHASE_ATOL)]
    rotation = np.conj(lead) / abs(lead)
    return u * rotation, float(s[0]), v * rotation


def _channels(
    h_ri: ArrayLike, h_it: ArrayLike, n: Optional[int] = None
) -> tuple[np.ndarray, np.ndarray]:
    h = np.asarray(h_ri, dtype=complex)
    if h.ndim == 2 and h.shape[0] != 1:
        raise ArchitectureError(f"h_RI must be a row vector, got shape {h.shape}")
    h = np.ravel(h)
    big_h = np.asarray(h_it, dtype=complex)
    if big_h.ndim == 1:
        big_h = big_h[:, np.newaxis]
    if big_h.ndim != 2 or big_h.shape[0] != h.size:
        raise ArchitectureError(
            f"H_IT must have {h.size} rows, got shape {big_h.shape}"
        )
    if n is not None and h.size != n:
        raise ArchitectureError(f"channels have {h.size} ports, architecture {n}")
    if not np.all(np.isfinite(h)) or not np.all(np.isfinite(big_h)):
        raise DegenerateChannelError("channels contain non-finite entries")
    if not np.any(h) or not np.any(big_h):
        raise DegenerateChannelError("channels must be nonzero")
    return h, big_h


def _result(
    h: np.ndarray,
    big_h: np.ndarray,
    b: np.ndarray,
    w: np.ndarray,
    z0: float,
    p_t: float,
    *,
    label: str,
) -> OptimizationResult:
    susceptance = SusceptanceMatrix(b)
    scattering = scattering_from_susceptance(susceptance, z0)
    power = float(p_t * abs(h @ scattering.entries @ big_h @ w) ** 2)
    return OptimizationResult(
        susceptance=susceptance,
        scattering=scattering,
        precoder=w,
        power=power,
        bound=upper_bound(h, big_h, p_t),
        iterations=1,
        objective_history=(power,),
        label=label,
    )

