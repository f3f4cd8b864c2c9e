"""Headless numerical property checks behind ``bdris validate``.

Every check draws its own seeded instances and returns a :class:`Check`; the
CLI prints one status line per check.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .architecture import (
    Architecture,
    Kind,
    admittance_count,
    build_architecture,
    closed_form_admittance_count,
)
from .config import ArchitectureSpec, ScenarioConfig
from .errors import ConfigError
from .graph import is_connected, random_spanning_tree
from .harness import complexity_table, run_sweep
from .network import (
    SusceptanceMatrix,
    admittance_from_components,
    components_from_admittance,
    group_upper_bound,
    is_symmetric,
    is_unitary,
    scattering_from_susceptance,
)
from .optimize import (
    P_T_DEFAULT,
    build_linear_system,
    dominant_left_singular_vector,
    forest_b_update,
    forest_optimize,
    numerical_rank,
    optimize_architecture,
    solve_least_squares,
    solve_normal_equations,
    tree_optimize,
)

logger = logging.getLogger(__name__)

SUITES = ("props", "all")
TRIALS_DEFAULT = 100

BOUND_RTOL = 1e-9
BOUND_OVERSHOOT = 1e-12
UNIQUENESS_RTOL = 1e-6
RESIDUAL_RTOL = 1e-9
GAP = 1e-6
GAP_FRACTION = 0.99
HISTORY_SLACK = 1e-12
BOUND_ANTENNAS = (1, 2, 8)
BOUND_SHAPES = (Kind.TRIDIAGONAL, Kind.ARROWHEAD, Kind.TREE)

# N=64 admittance counts of the complexity comparison
REFERENCE_COUNTS = {"fully": 2080, "tree": 127, "group_8": 288, "forest_8": 120}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def random_channels(
    rng: np.random.Generator, n: int, m: int
) -> tuple[np.ndarray, np.ndarray]:
    """Unit-variance complex Gaussian ``h_RI`` and ``H_IT``."""
    h_ri = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    h_it = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    return h_ri, h_it


def check_bound_achievement(rng: np.random.Generator, trials: int) -> Check:
    """Path, star and random trees with N up to 64 and M in {1, 2, 8}."""
    worst = 0.0
    for trial in range(trials):
        n = int(rng.integers(1, 65))
        m = int(rng.choice(BOUND_ANTENNAS))
        shape = BOUND_SHAPES[trial % len(BOUND_SHAPES)]
        if shape is Kind.TREE:
            tree = build_architecture(shape, n, tree=random_spanning_tree(n, rng))
        else:
            tree = build_architecture(shape, n)
        result = tree_optimize(*random_channels(rng, n, m), tree)
        worst = max(worst, abs(result.ratio - 1.0))
        if not 1 - BOUND_RTOL <= result.ratio <= 1 + BOUND_OVERSHOOT:
            detail = f"ratio {result.ratio!r} on {shape.value} N={n} M={m}"
            return Check("bound achievement", False, detail)
    return Check("bound achievement", True, f"max |ratio - 1| = {worst:.1e}")


def check_rank_properties(rng: np.random.Generator, trials: int) -> Check:
    for _ in range(trials):
        n = int(rng.integers(2, 33))
        h_ri, h_it = random_channels(rng, n, 2)
        system = build_linear_system(
            random_spanning_tree(n, rng), h_ri, dominant_left_singular_vector(h_it)
        )
        ranks = (
            numerical_rank(system.a_matrix),
            numerical_rank(system.augmented),
        )
        if ranks != (2 * n - 1, 2 * n - 1):
            return Check("rank properties", False, f"ranks {ranks} at N={n}")
        x = solve_least_squares(system)
        residual = np.linalg.norm(system.a_matrix @ x - system.b_vector)
        if residual > RESIDUAL_RTOL * np.linalg.norm(system.b_vector):
            return Check("rank properties", False, f"residual {residual:.1e} at N={n}")
    return Check("rank properties", True, f"{trials} systems consistent")


def check_uniqueness(rng: np.random.Generator, trials: int) -> Check:
    for _ in range(trials):
        n = int(rng.integers(2, 17))
        h_ri, h_it = random_channels(rng, n, 2)
        system = build_linear_system(
            random_spanning_tree(n, rng), h_ri, dominant_left_singular_vector(h_it)
        )
        qr = solve_least_squares(system)
        normal = solve_normal_equations(system)
        gap = np.linalg.norm(qr - normal) / np.linalg.norm(qr)
        if gap > UNIQUENESS_RTOL:
            return Check("uniqueness", False, f"solvers differ by {gap:.1e} at N={n}")
    return Check("uniqueness", True, f"{trials} systems agree")


def check_strict_gap(rng: np.random.Generator, trials: int) -> Check:
    """Disconnected architectures stay strictly below the bound for M >= 2."""
    disconnected = (
        build_architecture(Kind.FOREST, 8, 4),
        build_architecture(Kind.SINGLE, 8),
    )
    below = 0
    for _ in range(trials):
        h_ri, h_it = random_channels(rng, 8, 2)
        for arch in disconnected:
            result = optimize_architecture(arch, h_ri, h_it, rng=rng)
            below += result.ratio < 1 - GAP
    fraction = below / (trials * len(disconnected))
    return Check(
        "disconnected strict gap",
        fraction >= GAP_FRACTION,
        f"{fraction:.1%} of draws below the bound",
    )


def check_network_invariants(rng: np.random.Generator, trials: int) -> Check:
    for _ in range(trials):
        n = int(rng.integers(1, 17))
        kind = Kind.FOREST if n % 2 == 0 else Kind.TRIDIAGONAL
        arch = build_architecture(kind, n, 2 if kind is Kind.FOREST else None)
        b = np.zeros((n, n))
        for i, j in _support(arch):
            b[i, j] = b[j, i] = rng.standard_normal() / 50
        theta = scattering_from_susceptance(SusceptanceMatrix(b)).entries
        if not (is_symmetric(theta) and is_unitary(theta)):
            return Check("network invariants", False, f"Theta not lossless at N={n}")
        if not _block_diagonal(theta, arch):
            return Check("network invariants", False, f"Theta leaks at N={n}")
        y = 1j * b
        rebuilt = admittance_from_components(components_from_admittance(y, arch), n)
        if not np.allclose(rebuilt, y, rtol=0, atol=1e-12):
            return Check("network invariants", False, f"round trip at N={n}")
    return Check("network invariants", True, f"{trials} networks lossless")


def check_alternating(rng: np.random.Generator, trials: int) -> Check:
    forest = build_architecture(Kind.FOREST, 8, 2)
    for _ in range(trials):
        h_ri, h_it = random_channels(rng, 8, 4)
        result = forest_optimize(h_ri, h_it, forest, rng=rng)
        history = np.asarray(result.objective_history)
        if np.any(np.diff(history) < -HISTORY_SLACK * history[:-1]):
            return Check("alternating monotonicity", False, "objective decreased")
        if result.power > result.bound * (1 + BOUND_OVERSHOOT):
            return Check("alternating monotonicity", False, "bound exceeded")

        w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        w /= np.linalg.norm(w)
        b = forest_b_update(h_ri, h_it @ w, forest)
        theta = scattering_from_susceptance(b).entries
        power = P_T_DEFAULT * abs(h_ri @ theta @ h_it @ w) ** 2
        bound = group_upper_bound(h_ri, h_it @ w, forest.groups, P_T_DEFAULT)
        if abs(power - bound) > BOUND_RTOL * bound:
            return Check("alternating monotonicity", False, "group bound missed")
    return Check("alternating monotonicity", True, f"{trials} runs monotone")


def check_forest_matches_tree(rng: np.random.Generator, trials: int) -> Check:
    """One group spanning every port is a tree; with M = 1 no precoder is tuned."""
    for _ in range(trials):
        n = int(rng.integers(2, 17))
        h_ri, h_it = random_channels(rng, n, 1)
        forest = forest_optimize(
            h_ri, h_it, build_architecture(Kind.FOREST, n, n), rng=rng
        )
        tree = tree_optimize(h_ri, h_it, build_architecture(Kind.TRIDIAGONAL, n))
        if abs(forest.power - tree.power) > BOUND_RTOL * tree.power:
            return Check("single-group forest", False, f"power differs at N={n}")
    return Check("single-group forest", True, f"{trials} instances match")


def check_edge_removal(rng: np.random.Generator, trials: int) -> Check:
    """Removing any edge of a tree disconnects it."""
    for _ in range(trials):
        tree = random_spanning_tree(int(rng.integers(2, 33)), rng)
        for edge in tree.edges:
            if is_connected(tree.remove_edge(edge)):
                return Check("minimal connectivity", False, f"{edge} is redundant")
    return Check("minimal connectivity", True, f"{trials} trees minimal")


def check_complexity(rng: np.random.Generator, trials: int) -> Check:
    for n in range(1, 65):
        for g in (d for d in (1, 2, 4, 8, 16, 32, 64) if n % d == 0):
            for kind in (Kind.FOREST, Kind.GROUP):
                counted = admittance_count(build_architecture(kind, n, g))
                if counted != closed_form_admittance_count(kind, n, g):
                    return Check("complexity", False, f"{kind.value} N={n} g={g}")
        for kind in (Kind.SINGLE, Kind.TRIDIAGONAL, Kind.ARROWHEAD, Kind.FULLY):
            if admittance_count(build_architecture(kind, n)) != (
                closed_form_admittance_count(kind, n)
            ):
                return Check("complexity", False, f"{kind.value} N={n}")
    row = complexity_table([64], [8]).row(64)
    if any(row[column] != count for column, count in REFERENCE_COUNTS.items()):
        return Check("complexity", False, f"N=64 counts {row}")
    return Check("complexity", True, "closed forms match for N <= 64")


def check_sweep_determinism(rng: np.random.Generator, trials: int) -> Check:
    config = ScenarioConfig(
        n_list=(4,),
        m_list=(2,),
        rician_k_db=(0.0,),
        trials=max(2, trials // 10),
        seed=int(rng.integers(0, 2**31)),
        architectures=(
            ArchitectureSpec(Kind.SINGLE),
            ArchitectureSpec(Kind.FOREST, 2),
            ArchitectureSpec(Kind.TREE),
        ),
    )
    serial = run_sweep(config, threads=1).csv_text()
    parallel = run_sweep(config, threads=4).csv_text()
    return Check(
        "sweep determinism",
        serial == parallel,
        "identical CSV across thread counts" if serial == parallel else "CSV differs",
    )


PROPERTY_CHECKS: tuple[Callable[[np.random.Generator, int], Check], ...] = (
    check_bound_achievement,
    check_rank_properties,
    check_uniqueness,
    check_strict_gap,
    check_network_invariants,
    check_alternating,
    check_forest_matches_tree,
    check_edge_removal,
    check_complexity,
)


def run_suite(suite: str, trials: int = TRIALS_DEFAULT, seed: int = 0) -> list[Check]:
    """Run the property checks, plus the sweep determinism check for ``all``."""
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}, expected one of {SUITES}")
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    checks = list(PROPERTY_CHECKS)
    if suite == "all":
        checks.append(check_sweep_determinism)
    results = []
    for index, check in enumerate(checks):
        sequence = np.random.SeedSequence(seed, spawn_key=(index,))
        rng = np.random.Generator(np.random.Philox(sequence))
        result = check(rng, trials)
        logger.info("%s: %s", result.name, "pass" if result.passed else "FAIL")
        results.append(result)
    return results


def _support(arch: Architecture) -> list[tuple[int, int]]:
    """0-based upper-triangle positions, diagonal included."""
    return [(v - 1, v - 1) for v in arch.graph.vertices] + [
        (a - 1, b - 1) for a, b in arch.graph.edges
    ]


def _block_diagonal(theta: np.ndarray, arch: Architecture) -> bool:
    mask = np.zeros(theta.shape, dtype=bool)
    for ports in arch.groups:
        idx = np.asarray(ports) - 1
        mask[np.ix_(idx, idx)] = True
    return bool(np.all(np.abs(theta[~mask]) <= 1e-12))
