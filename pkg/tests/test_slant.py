import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slantlab.catalog import slant_line_r4
from slantlab.errors import ClusterAmbiguity, NotWellDefined
from slantlab.slant import (
    SplitOperators,
    check_slant_identities,
    classify,
    distribution_split,
    rotated_frame,
    slant_spectrum,
    split_operators,
    split_residuals,
)
from slantlab.theorems import Analysis

from test_immersion import SURFACE

points = st.tuples(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9)).map(np.array)


def diag_ops(values):
    """Operators whose T is diagonal with the given entries (N, t, omega unused)."""
    T = np.diag(np.asarray(values, dtype=float))
    z = np.zeros((0, len(values)))
    return SplitOperators(T, z, z.T, np.zeros((0, 0)))


@given(points)
def test_operator_identities_on_curved_surface(p):
    geo = SURFACE.geometry(p)
    ops = split_operators(geo.frame, SURFACE.ambient)
    assert max(ops.identity_residuals().values()) <= 1e-12


@given(points, st.integers(0, 1000))
def test_spectrum_is_frame_independent(p, seed):
    geo = SURFACE.geometry(p)
    M = SURFACE.ambient
    # raw eigenvalues: clustering may legitimately refuse near-degenerate points
    a, b = (
        np.linalg.eigvalsh(o.T @ o.T)
        for o in (split_operators(f, M) for f in (geo.frame, rotated_frame(geo.frame, seed)))
    )
    np.testing.assert_allclose(a, b, atol=1e-12)


@given(points)
def test_spectrum_lies_in_unit_interval(p):
    ops = split_operators(SURFACE.geometry(p).frame, SURFACE.ambient)
    lam = np.linalg.eigvalsh(ops.T @ ops.T)
    assert lam.min() >= -1e-12 and lam.max() <= 1 + 1e-12


@pytest.mark.parametrize(
    "values, label",
    [
        ([1, 1], "Invariant"),
        ([0, 0], "AntiInvariant"),
        ([0.5, 0.5], "ProperSlant"),
        ([0, 1, 1], "SemiInvariant"),
        ([0, 0.5, 0.5], "HemiSlant"),
        ([1, 0.5, 0.5], "SemiSlant"),
        ([0.3, 0.3, 0.7, 0.7], "Generic"),
    ],
)
def test_label_table(values, label):
    c = classify([slant_spectrum(diag_ops(values))])
    assert c.label == label


def test_theta_and_dimensions():
    c = classify([slant_spectrum(diag_ops([0, 0.5, -0.5]))])
    assert c.label == "HemiSlant"
    assert c.theta == pytest.approx(math.acos(0.5), abs=1e-15)
    assert (c.p, c.q) == (1, 2)


def test_cluster_ambiguity():
    with pytest.raises(ClusterAmbiguity):
        slant_spectrum(diag_ops([0.5, math.sqrt(0.25 + 5e-6)]))
    # a clear gap and a clear coincidence are both fine
    assert len(slant_spectrum(diag_ops([0.5, math.sqrt(0.25 + 1e-3)])).clusters) == 2
    assert len(slant_spectrum(diag_ops([0.5, math.sqrt(0.25 + 1e-8)])).clusters) == 1


def test_not_well_defined():
    with pytest.raises(NotWellDefined, match="cluster structure"):
        classify([slant_spectrum(diag_ops([0, 0.5])), slant_spectrum(diag_ops([0.5, 0.5]))])
    with pytest.raises(NotWellDefined, match="slant angle"):
        classify([slant_spectrum(diag_ops([0.5])), slant_spectrum(diag_ops([0.6]))])
    with pytest.raises(NotWellDefined):
        classify([])


@given(st.floats(0.05, math.pi / 4 - 0.05))
def test_slant_line_angle(alpha):
    entry = slant_line_r4(repr(alpha), alpha, "line")
    chart = entry.load().chart
    an = Analysis(chart)
    assert an.classification.label == "ProperSlant"
    assert an.theta == pytest.approx(math.acos(math.sin(2 * alpha)), abs=1e-9)


def test_split_of_hemi_slant_example(get_analysis):
    an = get_analysis("hemi_slant_pi3")
    for d in an.data:
        assert d.split.dims() == (1, 2, 0)
        assert max(split_residuals(d.ops, d.split).values()) <= 1e-12
        assert max(check_slant_identities(d.ops, d.split, math.pi / 3).values()) <= 1e-12


def test_distribution_split_normal_complement(get_analysis):
    an = get_analysis("hemi_slant_product_sphere")
    d = an.data[0]
    split = distribution_split(d.ops, d.spectrum, an.chart.geometry(d.p).frame)
    mu = split.mu
    # mu is invariant under omega and orthogonal to the N-images
    np.testing.assert_allclose(d.ops.N.T @ mu, 0.0, atol=1e-12)
    w = d.ops.omega @ mu
    np.testing.assert_allclose(w - mu @ (mu.T @ w), 0.0, atol=1e-12)
