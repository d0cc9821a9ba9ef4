import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normgeom.enums import OrthoMethod
from normgeom.errors import NormError
from normgeom.orthogonality.birkhoff import (
    bracket_oracle,
    is_bj_orthogonal,
    james_orthogonal,
    james_supporting_functional,
    one_sided_derivatives,
)
from normgeom.spaces.norms import euclidean, lp, norm_values
from normgeom.spaces.polygon import as_polyhedral, regular_polygon, square

LINF = lp(math.inf)

scalars = st.one_of(
    st.floats(min_value=0.01, max_value=100.0),
    st.floats(min_value=-100.0, max_value=-0.01),
)


def test_one_sided_derivatives_examples():
    assert one_sided_derivatives(euclidean(), [1.0, 0.0], [0.0, 1.0]) == (0.0, 0.0)
    assert one_sided_derivatives(LINF, [1.0, 1.0], [1.0, -1.0]) == (-1.0, 1.0)
    assert one_sided_derivatives(lp(1), [1.0, 0.0], [0.0, 1.0]) == (-1.0, 1.0)
    d_minus, d_plus = one_sided_derivatives(square(), [1.0, 1.0], [1.0, -1.0])
    assert math.isclose(d_minus, -1.0) and math.isclose(d_plus, 1.0)


@pytest.mark.parametrize("k", [-3.0, -1.0, 0.5, 2.0])
def test_corner_of_square_is_orthogonal_to_its_diagonal(k):
    verdict, cert = is_bj_orthogonal(LINF, [1.0, 1.0], [k, -k])
    assert verdict
    assert cert.method is OrthoMethod.CLOSED_FORM_LP
    assert cert.d_minus <= cert.d_plus


def test_orthogonality_examples():
    assert is_bj_orthogonal(LINF, [1.0, 1.0], [-2.0, 0.0])[0]
    assert is_bj_orthogonal(square(), [1.0, 1.0], [-2.0, 0.0])[0]
    assert not is_bj_orthogonal(euclidean(), [1.0, 0.0], [1.0, 1.0])[0]
    assert not is_bj_orthogonal(LINF, [1.0, 1.0], [-1.0, -1.0])[0]


def test_zero_vectors():
    verdict, cert = is_bj_orthogonal(euclidean(), [1.0, 2.0], [0.0, 0.0])
    assert verdict and cert.d_minus == 0.0 and cert.d_plus == 0.0
    with pytest.raises(NormError):
        is_bj_orthogonal(euclidean(), [0.0, 0.0], [1.0, 0.0])
    with pytest.raises(NormError):
        is_bj_orthogonal(euclidean(), [0.0, 0.0], [0.0, 0.0])


def test_certificate_serializes():
    _, cert = is_bj_orthogonal(LINF, [1.0, 1.0], [-2.0, 0.0])
    assert cert.to_dict() == {"d_minus": -2.0, "d_plus": 0.0, "method": "closed-form-lp", "tol": 1e-9}


def test_quotient_ladder_brackets_exact_derivatives():
    norm = regular_polygon(6, 0.2)
    rng = np.random.default_rng(5)
    for _ in range(50):
        x = rng.normal(size=2)
        ys = rng.normal(size=(8, 2))
        exact_minus, exact_plus = bracket_oracle(norm, x)(ys)
        q_minus, q_plus = bracket_oracle(norm, x, OrthoMethod.BRACKETED_QUOTIENT)(ys)
        assert np.allclose(q_minus, exact_minus, atol=1e-6)
        assert np.allclose(q_plus, exact_plus, atol=1e-6)


def test_quotient_bracket_closes_on_smooth_points():
    # Inside the top edge of the hexagon (vertices at multiples of 60 degrees)
    ladder = bracket_oracle(regular_polygon(6), [0.0, 0.9], OrthoMethod.BRACKETED_QUOTIENT)
    q_minus, q_plus = ladder(np.array([[0.3, 0.7], [-1.0, 0.2], [0.0, 1.0]]))
    assert np.all(q_plus - q_minus < 1e-9)

    x, y = np.array([1.0, 0.0]), np.array([0.3, 0.7])
    q_minus, q_plus = bracket_oracle(euclidean(), x, OrthoMethod.BRACKETED_QUOTIENT)(y[None, :])
    exact = float(x @ y)
    assert q_plus[0] - q_minus[0] < 1e-6
    assert abs(q_minus[0] - exact) < 1e-6
    assert abs(q_plus[0] - exact) < 1e-6


def test_quotient_bracket_stays_open_at_a_kink():
    # The square corner: d_minus = min(-1, 0.5), d_plus = max(-1, 0.5)
    q_minus, q_plus = bracket_oracle(square(), [1.0, 1.0], OrthoMethod.BRACKETED_QUOTIENT)(np.array([[-1.0, 0.5]]))
    assert abs(q_minus[0] + 1.0) < 1e-9
    assert abs(q_plus[0] - 0.5) < 1e-9


def test_polyhedral_method_needs_polygon():
    with pytest.raises(NormError):
        bracket_oracle(euclidean(), [1.0, 0.0], OrthoMethod.EXACT_POLYHEDRAL)
    with pytest.raises(NormError):
        bracket_oracle(square(), [1.0, 0.0], OrthoMethod.CLOSED_FORM_LP)


def test_james_supporting_functional():
    assert np.allclose(james_supporting_functional(euclidean(), [0.6, 0.8]), [0.6, 0.8])
    assert james_supporting_functional(LINF, [1.0, 1.0]).tolist() == [1.0, 0.0]
    assert james_supporting_functional(lp(1), [1.0, 0.0]).tolist() == [1.0, 0.0]
    # Both corner facets are active; the tie goes to the right edge, as for Lp(inf)
    assert np.allclose(james_supporting_functional(square(), [1.0, 1.0]), [1.0, 0.0])


def test_max_norm_and_its_polygon_share_the_supporting_functional():
    polygon = as_polyhedral(LINF)
    rng = np.random.default_rng(6)
    corners = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]
    for x in corners + rng.normal(size=(20, 2)).tolist():
        assert np.allclose(james_supporting_functional(LINF, x), james_supporting_functional(polygon, x))
        assert np.allclose(james_supporting_functional(square(), x), james_supporting_functional(LINF, x))


def test_supporting_functional_is_norming():
    rng = np.random.default_rng(2)
    circle = np.stack([np.cos(np.linspace(0, 2 * math.pi, 720)), np.sin(np.linspace(0, 2 * math.pi, 720))], axis=1)
    for norm in (lp(3), regular_polygon(6), lp(1.3)):
        ball = circle / norm_values(norm, circle)[:, None]
        for _ in range(10):
            x = rng.normal(size=2)
            x /= norm_values(norm, x)
            f = james_supporting_functional(norm, x)
            assert math.isclose(float(f @ x), 1.0, rel_tol=1e-9)
            assert float(np.max(ball @ f)) <= 1.0 + 1e-9


def test_james_criterion_agrees_with_derivatives():
    norm = regular_polygon(6)
    rng = np.random.default_rng(9)
    for _ in range(200):
        x = norm.vertex_array[int(rng.integers(6))] if rng.random() < 0.5 else rng.normal(size=2)
        y = rng.normal(size=2)
        assert james_orthogonal(norm, x, y) == is_bj_orthogonal(norm, x, y)[0]
    with pytest.raises(NormError):
        james_orthogonal(euclidean(), [1.0, 0.0], [0.0, 1.0])


@settings(max_examples=100, deadline=None)
@given(angle=st.floats(min_value=0.0, max_value=2 * math.pi), alpha=scalars, beta=scalars)
def test_homogeneity_euclidean(angle, alpha, beta):
    x = np.array([math.cos(angle), math.sin(angle)])
    y = np.array([-x[1], x[0]])
    norm = euclidean()
    assert is_bj_orthogonal(norm, x, y)[0]
    assert is_bj_orthogonal(norm, alpha * x, beta * y)[0]
    assert is_bj_orthogonal(norm, alpha * x, beta * x)[0] == is_bj_orthogonal(norm, x, x)[0]


@settings(max_examples=100, deadline=None)
@given(k=scalars, alpha=scalars, beta=scalars)
def test_homogeneity_square_corner(k, alpha, beta):
    x = np.array([1.0, 1.0])
    y = np.array([k, -k])
    assert is_bj_orthogonal(LINF, alpha * x, beta * y)[0]
    assert not is_bj_orthogonal(LINF, alpha * x, beta * x)[0]


def test_minimality_of_orthogonal_pairs():
    norm = lp(4)
    rng = np.random.default_rng(1)
    for _ in range(100):
        x = rng.normal(size=2)
        x /= norm_values(norm, x)
        f = james_supporting_functional(norm, x)
        y = np.array([-f[1], f[0]])
        assert is_bj_orthogonal(norm, x, y)[0]
        for lam in (1e-3, -1e-3, 0.1, -0.1, 1.0, -1.0, 10.0, -10.0):
            assert float(norm_values(norm, x + lam * y)) >= 1.0 - 1e-8
