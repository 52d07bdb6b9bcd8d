import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slantlab.ambient import (
    AmbientManifold,
    MetricModel,
    ProductStructure,
    flat,
    is_trace_free_structure,
    space_form_product,
)
from slantlab.errors import NotLocallyProduct, PointOutsideChart, ValidationError

MODELS = [(2, 1.0, 2, -1.0), (2, 1.0, 2, 1.0), (3, 0.5, 2, -2.0), (1, 0.0, 2, 1.0)]


def random_point(M, rng, shrink=0.5):
    x = np.empty(M.dim)
    for (sl, _), r in zip(M.metric.blocks(), M.chart_radius()):
        n = sl.stop - sl.start
        scale = 1.0 if not np.isfinite(r) else shrink * r / np.sqrt(n)
        x[sl] = rng.uniform(-scale, scale, n)
    return x


def test_structures_are_involutions():
    for s in (ProductStructure.swap(3), ProductStructure.sign(2, 3)):
        np.testing.assert_array_equal(s.matrix @ s.matrix, np.eye(s.dim))


@pytest.mark.parametrize(
    "matrix, message", [(np.eye(4), "forbidden"), (-np.eye(2), "forbidden"), ([[1, 1], [0, 1]], r"F\^2")]
)
def test_custom_structure_rejections(matrix, message):
    with pytest.raises(ValidationError, match=message):
        ProductStructure.custom(matrix)


def test_swap_on_unequal_curvatures_is_not_compatible():
    with pytest.raises(NotLocallyProduct):
        AmbientManifold(MetricModel.space_form_product(2, 1.0, 2, -1.0), ProductStructure.swap(2))


def test_non_parallel_structure_is_rejected():
    F = ProductStructure.custom(np.diag([1.0, -1.0, 1.0, -1.0]))
    with pytest.raises(NotLocallyProduct, match="nabla F"):
        AmbientManifold(MetricModel.space_form_product(2, 1.0, 2, 1.0), F)
    # the same F is parallel on flat space
    AmbientManifold(MetricModel.flat(4), F)


def test_validation_can_be_deferred():
    F = ProductStructure.custom(np.diag([1.0, -1.0, 1.0, -1.0]))
    M = AmbientManifold(MetricModel.space_form_product(2, 1.0, 2, 1.0), F, validate=False)
    with pytest.raises(NotLocallyProduct):
        M.validate()


def test_trace_free():
    assert is_trace_free_structure(flat(4, ProductStructure.swap(2)))
    assert not is_trace_free_structure(space_form_product(2, 1.0, 2, -1.0))


def test_chart_boundary():
    M = space_form_product(2, 1.0, 2, -1.0)
    assert M.contains(np.array([0.0, 0.0, 1.9, 0.0]))
    assert not M.contains(np.array([0.0, 0.0, 2.0, 0.0]))
    with pytest.raises(PointOutsideChart):
        M.metric_at(np.array([0.0, 0.0, 0.0, 2.5]))
    with pytest.raises(PointOutsideChart):
        M.metric_at(np.zeros(3))


@pytest.mark.parametrize("model", MODELS)
def test_christoffel_closed_form_matches_finite_differences(model):
    M = space_form_product(*model)
    rng = np.random.default_rng(1)
    for _ in range(3):
        x = random_point(M, rng)
        np.testing.assert_allclose(M.christoffel_at(x), M.christoffel_fd(x), atol=1e-8)


@pytest.mark.parametrize("model", MODELS)
def test_curvature_numeric_matches_closed_form(model):
    M = space_form_product(*model)
    rng = np.random.default_rng(2)
    for _ in range(3):
        x = random_point(M, rng)
        u, v, w = rng.standard_normal((3, M.dim))
        np.testing.assert_allclose(M.curvature_numeric(x, u, v, w), M.curvature_closed_form(x, u, v, w), atol=1e-5)


@pytest.mark.parametrize("model", MODELS)
def test_factor_plane_sectional_curvatures(model):
    m1, c1, m2, c2 = model
    M = space_form_product(*model)
    x = random_point(M, np.random.default_rng(3))
    e = np.eye(M.dim)
    if m1 >= 2:
        assert M.sectional_curvature(x, e[0], e[1]) == pytest.approx(c1, abs=1e-8)
    if m2 >= 2:
        assert M.sectional_curvature(x, e[m1], e[m1 + 1]) == pytest.approx(c2, abs=1e-8)
    assert M.sectional_curvature(x, e[0], e[m1]) == pytest.approx(0.0, abs=1e-12)


def test_flat_curvature_vanishes():
    M = flat(4, ProductStructure.swap(2))
    u, v, w = np.eye(4)[:3]
    np.testing.assert_array_equal(M.curvature_closed_form(np.zeros(4), u, v, w), 0.0)


vectors = st.lists(st.floats(-2, 2), min_size=4, max_size=4).map(np.array)


@given(vectors, vectors, vectors, vectors, st.sampled_from(MODELS[:2]))
def test_closed_form_curvature_symmetries(u, v, w, z, model):
    M = space_form_product(*model)
    x = np.array([0.3, -0.2, 0.1, 0.4])
    g = M.metric_at(x)
    R = lambda a, b, c: M.curvature_closed_form(x, a, b, c)  # noqa: E731
    scale = 1.0 + max(np.abs(a).max() for a in (u, v, w, z)) ** 4
    tol = 1e-12 * scale
    np.testing.assert_allclose(R(u, v, w), -R(v, u, w), atol=tol)
    np.testing.assert_allclose(R(u, v, w) + R(v, w, u) + R(w, u, v), 0.0, atol=tol)
    assert abs(R(u, v, w) @ g @ z + R(u, v, z) @ g @ w) <= tol
    # the structure is parallel, so it commutes with curvature
    np.testing.assert_allclose(R(u, v, M.F @ w), M.F @ R(u, v, w), atol=tol)
