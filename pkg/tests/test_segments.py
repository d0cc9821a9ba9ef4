import math

import numpy as np
import pytest

from normgeom.config import SearchConfig
from normgeom.enums import PairClass
from normgeom.errors import DimensionError, PreconditionError
from normgeom.spaces.norms import euclidean, lp, norm_values
from normgeom.spaces.polygon import diamond, regular_polygon, square
from normgeom.sphere.segments import (
    flatness_growth_check,
    max_segment_length,
    rotundity_gap,
    segment_lower_bound,
    segment_orthogonality_check,
    sphere_edges,
)

FAST = SearchConfig(theta_resolution=64, phi_resolution=64, t_grid=64, threads=1)


def test_square_has_a_diameter_segment():
    report = max_segment_length(square())
    assert report.length == 2.0
    assert report.is_max
    assert np.allclose(norm_values(square(), 0.5 * (report.u + report.v)), 1.0)
    assert any(np.array_equal(report.u, v) for v in square().vertex_array)


def test_lp_routes_through_polygons():
    assert max_segment_length(lp(math.inf)).length == 2.0
    assert max_segment_length(lp(1)).length == 2.0


def test_strictly_convex_spheres_have_no_segment():
    for norm in (euclidean(), lp(3), lp(1.2)):
        report = max_segment_length(norm)
        assert report.length == 0.0
        assert not report.is_max


def test_hexagon_segment_length_is_one():
    report = max_segment_length(regular_polygon(6))
    assert abs(report.length - 1.0) < 1e-12
    assert not report.is_max
    assert len(sphere_edges(regular_polygon(6))) == 6


def test_segment_detection_needs_the_plane():
    with pytest.raises(DimensionError):
        max_segment_length(euclidean(3))


def test_segment_lower_bound():
    assert segment_lower_bound(square()) == 3.0
    assert abs(segment_lower_bound(regular_polygon(6)) - 2.0) < 1e-12
    assert segment_lower_bound(euclidean()) == 1.0


def test_segment_orthogonality():
    verdict, cert = segment_orthogonality_check(square(), [1.0, 1.0], [1.0, -1.0])
    assert verdict and cert.asserts_orthogonal
    assert segment_orthogonality_check(lp(1), [1.0, 0.0], [0.0, 1.0])[0]
    with pytest.raises(PreconditionError):
        segment_orthogonality_check(euclidean(), [1.0, 0.0], [0.0, 1.0])


def test_every_polygon_edge_satisfies_segment_orthogonality():
    for norm in (regular_polygon(6), regular_polygon(12, 0.1), diamond()):
        for edge in sphere_edges(norm):
            assert segment_orthogonality_check(norm, edge.u, edge.v)[0]
            assert segment_orthogonality_check(norm, edge.v, edge.u)[0]


def test_flatness_square_above_diameter():
    report = flatness_growth_check(square(), 2.5, trials=100, seed=1)
    assert report.hypothesis and report.conclusion
    assert not report.growth_violation
    assert report.counterexample is None
    assert report.min_growth > 1.0


def test_flatness_square_at_diameter_fails_on_the_boundary():
    report = flatness_growth_check(square(), 2.0, trials=50, seed=1)
    assert not report.hypothesis
    assert not report.conclusion
    assert not report.growth_violation
    assert abs(report.min_growth - 1.0) < 1e-8
    assert report.counterexample is not None


def test_flatness_hexagon_and_euclidean():
    hexagon = flatness_growth_check(regular_polygon(6), 1.01, trials=100, seed=2)
    assert hexagon.hypothesis and hexagon.conclusion
    circle = flatness_growth_check(euclidean(), 0.01, trials=100, seed=2)
    assert circle.hypothesis and circle.conclusion
    assert not circle.converse_candidate


def test_flatness_preconditions():
    with pytest.raises(PreconditionError):
        flatness_growth_check(square(), 0.0, trials=10)
    with pytest.raises(PreconditionError):
        flatness_growth_check(square(), 1.0, trials=0)


def test_flatness_report_serializes():
    data = flatness_growth_check(square(), 2.5, trials=10).to_dict()
    assert data["conclusion_basis"] == "sampled"
    assert data["l"] == 2.5


def test_rotundity_gap():
    flat = rotundity_gap(square(), FAST)
    assert flat.gap <= 1e-6
    assert flat.pair_class is PairClass.FLAT_PAIR
    round_ = rotundity_gap(euclidean(), FAST)
    assert abs(round_.gap - (1.0 - math.sqrt(2.0) / 2.0)) < 1e-6
    assert round_.pair_class is PairClass.STRICTLY_ROTUND_PAIRS
    assert round_.to_dict()["class"] == "strictly-rotund-pairs"
