"""Tests for harness.py - Monte Carlo sweeps and complexity tables."""

import csv
import io
import json
import math
from dataclasses import replace

import pytest

from bdris.architecture import Kind
from bdris.config import ArchitectureSpec, ScenarioConfig
from bdris.errors import ConfigError
from bdris.harness import SWEEP_COLUMNS, complexity_table, run_sweep


@pytest.fixture
def small_config(scenario_dict):
    """Fixture scenario trimmed to a quick grid."""
    return ScenarioConfig.from_dict(scenario_dict)


@pytest.mark.unit
def test_sweep_rows_cover_the_grid(small_config):
    """Test row ordering, labels and shapes of a small sweep."""
    result = run_sweep(small_config, threads=1)

    assert len(result.rows) == 2 * len(small_config.architectures)
    assert [row.n for row in result.rows[:7]] == [4] * 7
    assert [row.arch for row in result.rows[:3]] == [
        "single",
        "forest-tridiagonal",
        "forest-arrowhead",
    ]
    for row in result.rows:
        assert row.trials == 3
        assert row.mean_power_w > 0
        assert row.stderr_w >= 0
        assert row.mean_iters >= 1


@pytest.mark.unit
def test_connected_architectures_average_the_same_power(small_config):
    """Test that tree, tridiagonal and fully share the bound on common channels."""
    result = run_sweep(small_config, threads=2)

    for n in small_config.n_list:
        tri = result.find("tridiagonal", n, 2, 0.0).mean_power_w
        assert result.find("tree", n, 2, 0.0).mean_power_w == pytest.approx(tri)
        assert result.find("fully", n, 2, 0.0).mean_power_w == pytest.approx(tri)
        single = result.find("single", n, 2, 0.0).mean_power_w
        assert single <= tri * (1 + 1e-9)


@pytest.mark.unit
def test_sweep_is_deterministic_across_thread_counts(small_config):
    """Test bit-identical CSV output for 1 and 4 threads."""
    serial = run_sweep(small_config, threads=1).csv_text()
    parallel = run_sweep(small_config, threads=4).csv_text()

    assert serial == parallel


@pytest.mark.unit
def test_sweep_changes_with_seed(small_config):
    """Test that a different seed draws different channels."""
    a = run_sweep(small_config, threads=1).csv_text()
    b = run_sweep(small_config.with_seed(12), threads=1).csv_text()

    assert a != b


@pytest.mark.unit
def test_single_trial_has_zero_stderr(small_config):
    """Test the trials = 1 boundary."""
    result = run_sweep(replace(small_config, trials=1), threads=1)

    assert all(row.stderr_w == 0.0 for row in result.rows)


@pytest.mark.unit
def test_sweep_rejects_empty_architectures(small_config):
    """Test that an empty architecture list is a config error."""
    with pytest.raises(ConfigError):
        run_sweep(replace(small_config, architectures=()))


@pytest.mark.unit
def test_csv_and_metadata_files(small_config, tmp_path):
    """Test the CSV header and the metadata sidecar."""
    result = run_sweep(small_config, threads=1)
    out = tmp_path / "results.csv"
    meta = tmp_path / "results.csv.meta.json"

    result.to_csv(out)
    result.write_metadata(meta)

    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert len(rows) == len(result.rows) + 1
    assert rows[1][3] == ""
    assert float(rows[1][6]) == result.rows[0].mean_power_w

    metadata = json.loads(meta.read_text())
    assert metadata["seed"] == 11
    assert len(metadata["config_hash"]) == 16
    assert set(metadata["versions"]) == {
        "bdris",
        "numpy",
        "scipy",
        "networkx",
        "los_model",
    }
    assert metadata["config"]["trials"] == 3


@pytest.mark.unit
def test_gain_ratios(small_config):
    """Test per-grid-point mean power ratios."""
    result = run_sweep(small_config, threads=1)

    gains = result.gain(("tridiagonal", None), ("single", None))

    assert set(gains) == {(4, 2, 0.0), (8, 2, 0.0)}
    for (n, m, k), gain in gains.items():
        tri = result.find("tridiagonal", n, m, k).mean_power_w
        single = result.find("single", n, m, k).mean_power_w
        assert gain == pytest.approx(tri / single)
        assert gain >= 1 - 1e-9
    with pytest.raises(KeyError):
        result.gain(("tridiagonal", None), ("forest-tridiagonal", 8))


@pytest.mark.unit
def test_complexity_table_reference_row():
    """Test the N=64 row: fully 2080, tree 127, group(8) 288, forest(8) 120."""
    table = complexity_table([64], [2, 4, 8])
    row = table.row(64)

    assert row["fully"] == 2080
    assert row["tree"] == 127
    assert row["group_8"] == 288
    assert row["forest_8"] == 120
    assert row["forest_2"] == 96
    assert row["group_2"] == 96
    assert row["single"] == 64
    assert math.isclose(row["fully"] / row["tree"], 16.377, abs_tol=1e-3)
    assert row["group_8"] / row["forest_8"] == 2.4


@pytest.mark.unit
def test_complexity_table_blank_cells_for_non_divisors():
    """Test that non-divisible group sizes are left empty unless strict."""
    table = complexity_table(range(1, 5), [2, 4], strict=False)

    assert table.row(3)["forest_2"] is None
    assert table.row(4)["forest_4"] == 7
    out = io.StringIO()
    table.to_csv(out)
    lines = out.getvalue().splitlines()
    assert lines[0] == "n,fully,group_2,group_4,tree,forest_2,forest_4,single"
    assert lines[1] == "1,1,,,1,,,1"
    with pytest.raises(ConfigError):
        complexity_table(range(1, 5), [2, 4])
    with pytest.raises(ConfigError):
        complexity_table([], [2])


@pytest.mark.slow
def test_forest_gain_over_single():
    """Test the forest(8) over single gain at N=64, M=2, K=0 dB (1000 trials)."""
    config = ScenarioConfig(
        n_list=(64,),
        m_list=(2,),
        rician_k_db=(0.0,),
        trials=1000,
        architectures=(
            ArchitectureSpec(Kind.SINGLE),
            ArchitectureSpec(Kind.FOREST, 8),
            ArchitectureSpec(Kind.TRIDIAGONAL),
        ),
    )

    result = run_sweep(config)

    forest = result.gain(("forest-tridiagonal", 8), ("single", None))[(64, 2, 0.0)]
    tree = result.gain(("tridiagonal", None), ("single", None))[(64, 2, 0.0)]
    assert forest == pytest.approx(1.446, abs=0.05)
    assert 1.0 < forest < tree


@pytest.fixture(scope="module")
def n64_sweep():
    """N=64 sweep over M in {2, 8} and K in {0, 10} dB, 300 trials."""
    config = ScenarioConfig(
        n_list=(64,),
        m_list=(2, 8),
        rician_k_db=(0.0, 10.0),
        trials=300,
        architectures=(
            ArchitectureSpec(Kind.SINGLE),
            ArchitectureSpec(Kind.FOREST, 2),
            ArchitectureSpec(Kind.FOREST, 4),
            ArchitectureSpec(Kind.FOREST, 8),
            ArchitectureSpec(Kind.TRIDIAGONAL),
        ),
    )
    return run_sweep(config)


N64_CHAIN = [
    ("single", None),
    ("forest-tridiagonal", 2),
    ("forest-tridiagonal", 4),
    ("forest-tridiagonal", 8),
    ("tridiagonal", None),
]


@pytest.mark.slow
def test_mean_power_rises_with_transmit_antennas(n64_sweep):
    """Test that every architecture gains from M=2 to M=8."""
    for label, size in N64_CHAIN:
        for k in (0.0, 10.0):
            two = n64_sweep.find(label, 64, 2, k, size).mean_power_w
            eight = n64_sweep.find(label, 64, 8, k, size).mean_power_w
            assert eight > two, (label, size, k)


@pytest.mark.slow
def test_architecture_chain_is_ordered(n64_sweep):
    """Test single <= forest(2) <= forest(4) <= forest(8) <= tree everywhere."""
    for m in (2, 8):
        for k in (0.0, 10.0):
            powers = [
                n64_sweep.find(label, 64, m, k, size).mean_power_w
                for label, size in N64_CHAIN
            ]
            for lower, higher in zip(powers, powers[1:]):
                assert lower <= higher * (1 + 1e-9), (m, k, powers)


@pytest.mark.slow
def test_tree_gain_shrinks_with_rician_factor(n64_sweep):
    """Test the tree over single gain: larger in Rayleigh than at K=10 dB."""
    gains = n64_sweep.gain(("tridiagonal", None), ("single", None))

    assert gains[(64, 2, 0.0)] > gains[(64, 2, 10.0)]
    assert gains[(64, 2, 0.0)] == pytest.approx(1.469, abs=0.08)
    assert any(1.35 <= g <= 1.70 for g in gains.values())
