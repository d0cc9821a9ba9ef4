import math

import numpy as np
import pytest

from normgeom.errors import DegenerateBallError, NormError
from normgeom.spaces.norms import euclidean, lp, norm_values
from normgeom.spaces.polygon import (
    active_facets,
    as_polyhedral,
    canonicalize_polytope,
    diamond,
    edge_point,
    facet_functionals,
    has_polyhedral_form,
    random_polygons,
    regular_polygon,
    square,
)


def test_square_canonical_order():
    # CCW from the smallest polar angle
    assert square().vertices == ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))


def test_symmetrization_and_redundant_points():
    # One half of the hexagon plus a midpoint on an edge and a duplicate
    half = [(1.0, 0.0), (0.5, math.sqrt(3) / 2), (-0.5, math.sqrt(3) / 2), (0.75, math.sqrt(3) / 4), (1.0, 1e-14)]
    norm = canonicalize_polytope(half)
    assert len(norm.vertices) == 6
    assert np.allclose(norm.vertex_array[0], [1.0, 0.0], atol=1e-12)


def test_interior_points_are_dropped():
    norm = canonicalize_polytope([(1.0, 1.0), (-1.0, 1.0), (0.2, 0.3)])
    assert norm.vertices == square().vertices


def test_degenerate_inputs():
    with pytest.raises(DegenerateBallError):
        canonicalize_polytope([(1.0, 0.0), (2.0, 0.0)])
    with pytest.raises(DegenerateBallError):
        canonicalize_polytope([(0.0, 0.0), (1.0, 1.0)])
    with pytest.raises(NormError):
        canonicalize_polytope([(1.0, math.inf), (0.0, 1.0)])


def test_polygon_norms_match_lp():
    rng = np.random.default_rng(11)
    points = rng.normal(size=(200, 2))
    assert np.allclose(norm_values(square(), points), norm_values(lp(math.inf), points), rtol=1e-13)
    assert np.allclose(norm_values(diamond(), points), norm_values(lp(1), points), rtol=1e-13)


def test_vertices_lie_on_unit_sphere():
    for norm in [regular_polygon(6), regular_polygon(10, 0.3)] + random_polygons(3, 5):
        assert np.allclose(norm_values(norm, norm.vertex_array), 1.0, atol=1e-12)


def test_facet_functionals_attain_one_on_their_edge():
    norm = regular_polygon(8, 0.1)
    verts = norm.vertex_array
    for f in facet_functionals(norm):
        assert math.isclose(f(verts[f.index]), 1.0, rel_tol=1e-12)
        assert math.isclose(f(verts[(f.index + 1) % len(verts)]), 1.0, rel_tol=1e-12)
    with pytest.raises(NormError):
        facet_functionals(euclidean())


def test_active_facets():
    # Top edge is facet 0, right edge is facet 3
    assert active_facets(square(), np.array([1.0, 1.0])).tolist() == [0, 3]
    assert active_facets(square(), np.array([1.0, 0.2])).tolist() == [3]


def test_regular_polygon_validation():
    assert len(regular_polygon(6).vertices) == 6
    with pytest.raises(NormError):
        regular_polygon(5)


def test_as_polyhedral():
    assert as_polyhedral(lp(math.inf)).vertices == square().vertices
    assert as_polyhedral(lp(1)).vertices == diamond().vertices
    hexagon = regular_polygon(6)
    assert as_polyhedral(hexagon) is hexagon
    assert not has_polyhedral_form(euclidean())
    assert not has_polyhedral_form(lp(math.inf, 3))
    with pytest.raises(NormError):
        as_polyhedral(lp(3))


def test_random_polygons_are_seeded():
    first = random_polygons(4, 7)
    second = random_polygons(4, 7)
    assert [p.vertices for p in first] == [p.vertices for p in second]
    assert all(len(p.vertices) >= 6 for p in first)
    assert all(len(p.vertices) % 2 == 0 for p in first)


def test_edge_point_is_on_sphere():
    norm = regular_polygon(6)
    z = edge_point(norm, 2, 0.3)
    assert math.isclose(float(norm_values(norm, z)), 1.0, rel_tol=1e-12)
