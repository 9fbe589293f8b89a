import numpy as np
import pytest
from hypothesis import given, strategies as st
from cscbalance._exceptions import ConfigurationError, ContractViolation
from cscbalance.halgebra import (
    Configuration,
    SymmetryBasis,
    as_flow_parameter,
    as_moment_vector,
    effective_weights,
    weighted_moment_sum,
)

RNG_SEED = 20240611


def test_symmetry_basis_labels():
    basis = SymmetryBasis(3)
    assert basis.dim_d == 3
    assert basis.labels == ("xi_0", "xi_1", "xi_2")
    with pytest.raises(ContractViolation):
        SymmetryBasis(0)
    with pytest.raises(ContractViolation):
        SymmetryBasis(2, ["a", "a"])
    with pytest.raises(ContractViolation):
        SymmetryBasis(2, ["a"])


def test_flow_parameter_shape():
    assert np.array_equal(as_flow_parameter(0.5, 1), [0.5])
    with pytest.raises(ContractViolation):
        as_flow_parameter([0.0, 1.0], 3)
    with pytest.raises(ContractViolation):
        as_moment_vector([np.nan], 1)


def test_weighted_moment_sum_of_vertices_vanishes():
    moments = np.eye(3) - 1.0 / 3.0
    assert np.allclose(weighted_moment_sum(moments, np.ones(3)), 0.0, atol=1e-15)
    with pytest.raises(ContractViolation):
        weighted_moment_sum(moments, np.ones(2))
    with pytest.raises(ContractViolation):
        weighted_moment_sum(np.ones(3), np.ones(3))


def test_effective_weights_use_m_minus_one():
    config = Configuration(3, [[0.1], [0.2]], [2.0, 0.5])
    assert np.allclose(effective_weights(config), [4.0, 0.25])
    config = Configuration(4, [[0.1], [0.2]], [1.5, 0.5])
    assert np.allclose(effective_weights(config), [1.5 * 1.5 * 1.5, 0.5 * 0.5 * 0.5])
    assert np.allclose(effective_weights(config), [3.375, 0.125])
    config = Configuration(2, [[0.1], [0.2]], [1.0, 1.0])
    assert np.array_equal(effective_weights(config), [1.0, 1.0])


def test_effective_weights_increase_with_each_weight():
    rng = np.random.default_rng(RNG_SEED)
    for m in (2, 3, 6):
        for _ in range(50):
            a = rng.uniform(0.1, 5.0, size=4)
            j = rng.integers(4)
            bumped = a.copy()
            bumped[j] = bumped[j] * rng.uniform(1.01, 2.0)
            c = effective_weights(Configuration(m, [[0.1], [0.2], [0.3], [0.4]], a))
            c2 = effective_weights(Configuration(m, [[0.1], [0.2], [0.3], [0.4]], bumped))
            assert c2[j] > c[j]
            assert np.array_equal(np.delete(c2, j), np.delete(c, j))


def test_weighted_moment_sum_is_linear():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        M = rng.normal(size=(5, 3))
        c = rng.uniform(0.1, 3.0, size=5)
        j = rng.integers(5)
        v = rng.normal(size=3)
        alpha, lam = rng.normal(), rng.uniform(0.1, 10.0)
        shifted = M.copy()
        shifted[j] = alpha * M[j] + v
        expected = weighted_moment_sum(M, c) + c[j] * ((alpha - 1.0) * M[j] + v)
        assert np.allclose(weighted_moment_sum(shifted, c), expected, atol=1e-12)
        assert np.allclose(weighted_moment_sum(M, lam * c), lam * weighted_moment_sum(M, c), atol=1e-12)


def test_configuration_is_frozen():
    config = Configuration(2, [[0.1], [0.2]], [1.0, 1.0])
    with pytest.raises(ValueError):
        config.points[0, 0] = 3.0
    with pytest.raises(ValueError):
        config.weights[0] = 3.0


def test_configuration_rejects_invalid_input():
    with pytest.raises(ConfigurationError):
        Configuration(1, [[0.1], [0.2]], [1.0, 1.0])
    with pytest.raises(ConfigurationError):
        Configuration(2, [[0.1], [0.2]], [1.0])
    with pytest.raises(ConfigurationError):
        Configuration(2, [[0.1], [0.2]], [1.0, 0.0])
    with pytest.raises(ConfigurationError):
        Configuration(2, [[0.1], [np.inf]], [1.0, 1.0])
    with pytest.raises(ConfigurationError):
        Configuration(2, [[0.1], [0.1]], [1.0, 1.0])
    with pytest.raises(ConfigurationError):
        Configuration(2, [[0.1], [0.2]], [1.0, 1.0], labels=["a"])


def test_labels_separate_equal_coordinates():
    config = Configuration(2, [[0.3], [0.3]], [1.0, 1.0], labels=["p1", "p2"])
    assert config.n == 2
    assert config.to_dict()["labels"] == ["p1", "p2"]


def test_with_weights_keeps_points():
    config = Configuration(2, [[0.1], [0.2]], [1.0, 1.0])
    other = config.with_weights([2.0, 3.0])
    assert np.array_equal(other.points, config.points)
    assert np.array_equal(other.weights, [2.0, 3.0])


@given(
    st.lists(st.floats(allow_nan=True, allow_infinity=True), min_size=1, max_size=5),
    st.lists(st.floats(allow_nan=True, allow_infinity=True), min_size=1, max_size=5),
)
def test_configuration_accepts_only_valid_input(points, weights):
    try:
        config = Configuration(2, np.array(points)[:, np.newaxis], weights)
    except ConfigurationError:
        return
    assert np.all(np.isfinite(config.points))
    assert np.all(config.weights > 0.0)
    assert config.weights.shape == (config.n,)
    for a in range(config.n):
        for b in range(a + 1, config.n):
            assert np.max(np.abs(config.points[a] - config.points[b])) > 1e-12


@given(st.integers(min_value=-3, max_value=1))
def test_small_dimensions_rejected(m):
    with pytest.raises(ConfigurationError):
        Configuration(m, [[0.0]], [1.0])
