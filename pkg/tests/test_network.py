"""Tests for network.py - Microwave network relations and received power."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bdris.architecture import Kind, build_architecture
from bdris.errors import NetworkError
from bdris.network import (
    ComponentValues,
    ScatteringMatrix,
    SusceptanceMatrix,
    admittance_from_components,
    check_partition,
    components_from_admittance,
    group_upper_bound,
    is_unitary,
    matrix_from_json,
    matrix_to_json,
    received_power,
    scattering_from_admittance,
    scattering_from_susceptance,
    susceptance_from_scattering,
    upper_bound,
)


def random_b(rng, arch):
    """Random real symmetric B supported on ``arch``."""
    b = np.diag(rng.standard_normal(arch.n) / 50)
    for p, q in arch.graph.edges:
        b[p - 1, q - 1] = b[q - 1, p - 1] = rng.standard_normal() / 50
    return b


@pytest.mark.unit
def test_zero_susceptance_gives_identity():
    """Test that B = 0 maps to Theta = I."""
    theta = scattering_from_susceptance(np.zeros((3, 3)))

    assert_allclose(theta.entries, np.eye(3), atol=1e-15)


@pytest.mark.unit
def test_single_port_scattering():
    """Test the 1x1 case e^{j theta} = (1 - j z0 b) / (1 + j z0 b)."""
    b = 0.013
    theta = scattering_from_susceptance(np.array([[b]]), z0=50)

    expected = (1 - 1j * 50 * b) / (1 + 1j * 50 * b)
    assert_allclose(theta.entries[0, 0], expected, rtol=1e-14)
    assert abs(theta.entries[0, 0]) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.unit
@pytest.mark.parametrize(
    "kind,group_size",
    [
        (Kind.SINGLE, None),
        (Kind.TRIDIAGONAL, None),
        (Kind.FOREST, 3),
        (Kind.FULLY, None),
    ],
)
def test_scattering_is_symmetric_and_unitary(rng, kind, group_size):
    """Test losslessness and reciprocity over varied supports."""
    arch = build_architecture(kind, 6, group_size)

    for _ in range(20):
        theta = scattering_from_susceptance(random_b(rng, arch)).entries
        assert_allclose(theta, theta.T, atol=1e-12)
        assert_allclose(theta.conj().T @ theta, np.eye(6), atol=1e-10)


@pytest.mark.unit
def test_block_diagonal_b_gives_block_diagonal_theta(rng):
    """Test that forest groups do not couple through Theta."""
    arch = build_architecture(Kind.FOREST, 6, 3)
    theta = scattering_from_susceptance(random_b(rng, arch)).entries

    assert_allclose(theta[:3, 3:], 0, atol=1e-14)
    assert_allclose(theta[3:, :3], 0, atol=1e-14)


@pytest.mark.unit
def test_susceptance_roundtrip(rng):
    """Test that B -> Theta -> B recovers B."""
    arch = build_architecture(Kind.TRIDIAGONAL, 5)
    b = random_b(rng, arch)

    recovered = susceptance_from_scattering(scattering_from_susceptance(b))

    assert_allclose(recovered.entries, b, atol=1e-12)


@pytest.mark.unit
def test_susceptance_rejects_asymmetric_and_complex():
    """Test SusceptanceMatrix validation."""
    with pytest.raises(NetworkError):
        SusceptanceMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NetworkError):
        SusceptanceMatrix(np.array([[1j, 0], [0, 0]]))
    with pytest.raises(NetworkError):
        SusceptanceMatrix(np.zeros((2, 3)))
    with pytest.raises(NetworkError):
        SusceptanceMatrix(np.array([[np.nan]]))


@pytest.mark.unit
def test_susceptance_entries_are_read_only():
    """Test that stored entries cannot be mutated."""
    b = SusceptanceMatrix(np.eye(2))

    with pytest.raises(ValueError):
        b.entries[0, 0] = 5.0


@pytest.mark.unit
def test_support_check(rng):
    """Test that entries outside the graph support are rejected."""
    arch = build_architecture(Kind.TRIDIAGONAL, 3)
    b = random_b(rng, arch)

    SusceptanceMatrix.from_array(b, arch)
    b[0, 2] = b[2, 0] = 0.01
    with pytest.raises(NetworkError):
        SusceptanceMatrix.from_array(b, arch)


@pytest.mark.unit
def test_scattering_matrix_validation():
    """Test that non-unitary matrices are rejected."""
    assert ScatteringMatrix(np.eye(2)).n == 2
    with pytest.raises(NetworkError):
        ScatteringMatrix(2 * np.eye(2))
    assert not is_unitary(np.ones((2, 2)))


@pytest.mark.unit
def test_singular_admittance_raises():
    """Test that a singular I + z0 Y is reported."""
    with pytest.raises(NetworkError):
        scattering_from_admittance(np.array([[-0.25]]), z0=4)


@pytest.mark.unit
def test_components_roundtrip_dyadic():
    """Test exact round trip on dyadic admittances."""
    arch = build_architecture(Kind.TRIDIAGONAL, 3)
    y = 1j * np.array([[0.5, -0.25, 0], [-0.25, 0.125, 0.75], [0, 0.75, -1.0]])

    components = components_from_admittance(y, arch)

    assert set(components.interconnecting) == {(1, 2), (2, 3)}
    assert components.interconnecting[(1, 2)] == 0.25j
    np.testing.assert_array_equal(admittance_from_components(components, 3), y)


@pytest.mark.unit
def test_components_roundtrip_random(rng):
    """Test the round trip on non-dyadic admittances within a few ulps."""
    arch = build_architecture(Kind.FOREST, 6, 3)
    y = 1j * random_b(rng, arch)

    rebuilt = admittance_from_components(components_from_admittance(y, arch), 6)

    off = ~np.eye(6, dtype=bool)
    np.testing.assert_array_equal(rebuilt[off], y[off])
    ulps = 16 * np.spacing(np.abs(y).max())
    assert_allclose(rebuilt, y, rtol=0, atol=ulps)


@pytest.mark.unit
def test_components_reject_off_support():
    """Test that Y outside the architecture support is rejected."""
    arch = build_architecture(Kind.SINGLE, 2)

    with pytest.raises(NetworkError):
        components_from_admittance(np.ones((2, 2)), arch)
    with pytest.raises(NetworkError):
        admittance_from_components(ComponentValues((1.0,), {}), 2)



@pytest.mark.unit
@pytest.mark.parametrize(
    "key,match", [((0, 2), "outside"), ((2, 4), "outside"), ((2, 2), "self-loop")]
)
def test_components_reject_bad_interconnecting_keys(key, match):
    """Test that out-of-range and self-loop port pairs raise NetworkError."""
    components = ComponentValues((1.0, 1.0, 1.0), {key: 0.5j})

    with pytest.raises(NetworkError, match=match):
        admittance_from_components(components, 3)


@pytest.mark.unit
def test_received_power_and_bounds(channels):
    """Test power formula and bound ordering for a random network."""
    h_ri, h_it = channels(4, 2)
    w = np.array([1, 1j]) / np.sqrt(2)
    theta = np.eye(4)

    power = received_power(h_ri, theta, h_it, w, p_t=0.01)

    assert power == pytest.approx(0.01 * abs(h_ri @ h_it @ w) ** 2)
    expected_bound = 0.01 * np.sum(abs(h_ri) ** 2) * np.linalg.norm(h_it, 2) ** 2
    assert upper_bound(h_ri, h_it, 0.01) == pytest.approx(expected_bound)
    assert power <= upper_bound(h_ri, h_it, 0.01)


@pytest.mark.unit
def test_received_power_requires_unit_precoder(channels):
    """Test the unit-norm precondition on w."""
    h_ri, h_it = channels(2, 2)

    with pytest.raises(NetworkError):
        received_power(h_ri, np.eye(2), h_it, np.array([1.0, 1.0]), 0.01)


@pytest.mark.unit
def test_group_upper_bound(channels):
    """Test the block bound and its reduction to the full bound for one group."""
    h_ri, h_it = channels(4, 1)
    h_eff = h_it[:, 0]

    one_group = group_upper_bound(h_ri, h_eff, [(1, 2, 3, 4)], 0.01)
    two_groups = group_upper_bound(h_ri, h_eff, [(1, 2), (3, 4)], 0.01)

    assert one_group == pytest.approx(upper_bound(h_ri, h_it, 0.01))
    assert two_groups <= one_group * (1 + 1e-12)


@pytest.mark.unit
def test_partition_must_cover_ports():
    """Test partition validation."""
    assert [list(g) for g in check_partition([(2, 1), (3,)], 3)] == [[0, 1], [2]]
    with pytest.raises(NetworkError):
        check_partition([(1, 2)], 3)
    with pytest.raises(NetworkError):
        check_partition([(1, 2), (2, 3)], 3)


@pytest.mark.unit
def test_matrix_json_format():
    """Test the row-major [re, im] encoding."""
    m = np.array([[1 + 2j, 0], [0, -1j]])

    encoded = matrix_to_json(m)

    assert encoded == [[[1.0, 2.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, -1.0]]]
    np.testing.assert_array_equal(matrix_from_json(encoded), m)
    with pytest.raises(NetworkError):
        matrix_from_json([1, 2, 3])
