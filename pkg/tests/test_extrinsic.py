import numpy as np
import pytest

from slantlab import extrinsic
from slantlab.ambient import ProductStructure, flat
from slantlab.errors import WrongMetricModel
from slantlab.immersion import CoordinateField, ImmersionChart
from slantlab.theorems import codazzi_convergence

from test_immersion import SPHERE, SURFACE


@pytest.mark.parametrize("chart", [SURFACE, SPHERE], ids=["surface", "sphere"])
def test_weingarten_duality(chart):
    """The shape operator from differencing the normal frame matches h, up to finite-difference error."""
    for p in chart.sample_points(3, seed=5):
        assert extrinsic.duality_residual(chart, p) <= 1e-6


def test_shape_operator_is_symmetric():
    data = extrinsic.second_fundamental_form(SURFACE, np.array([0.1, -0.3]))
    np.testing.assert_allclose(data.A, data.A.transpose(0, 2, 1), atol=1e-15)


def test_sphere_is_totally_umbilical():
    datas = [extrinsic.second_fundamental_form(SPHERE, p) for p in SPHERE.sample_points(4)]
    rep = extrinsic.umbilicity_residual(datas)
    assert rep.verdict == "TotallyUmbilical"
    assert rep.mean_curvature_norm == pytest.approx(0.5, abs=1e-12)


def test_plane_is_totally_geodesic():
    chart = ImmersionChart(flat(4, ProductStructure.swap(2)), ["u", "v"], ["u", "v", "u", "v"], [(-1, 1), (-1, 1)])
    rep = extrinsic.umbilicity_residual([extrinsic.second_fundamental_form(chart, [0.1, 0.2])])
    assert rep.verdict == "TotallyGeodesic"


def test_surface_is_not_umbilical():
    rep = extrinsic.umbilicity_residual([extrinsic.second_fundamental_form(SURFACE, [0.1, 0.2])])
    assert rep.verdict == "NotUmbilical"


def test_codazzi_on_generic_surface():
    X = [CoordinateField(i, 2) for i in range(2)]
    for p in SURFACE.sample_points(3, seed=2):
        for k in range(2):
            assert extrinsic.codazzi_residual(SURFACE, p, X[0], X[1], X[k]) <= 1e-6


def test_codazzi_needs_closed_form_curvature():
    class Custom:
        kind = "conformal"

    chart = ImmersionChart(flat(4, ProductStructure.swap(2)), ["u"], ["u", "0", "0", "0"], [(0, 1)])
    chart.ambient.metric = Custom()
    X = CoordinateField(0, 1)
    with pytest.raises(WrongMetricModel):
        extrinsic.codazzi_residual(chart, [0.5], X, X, X)


def test_codazzi_converges_at_second_order():
    out = codazzi_convergence(SURFACE, np.array([0.2, -0.1]), 0.02)
    assert 3.2 <= out["ratio"] <= 4.8


def test_mixed_totally_geodesic_product(get_analysis):
    an = get_analysis("hemi_slant_product_sphere")
    for d in an.data:
        assert extrinsic.mixed_totally_geodesic(d.sff, d.split) <= 1e-12
