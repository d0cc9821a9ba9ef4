import math

import pytest

from normgeom.config import IPS_WINDOW_HI, IPS_WINDOW_LO, SearchConfig
from normgeom.constants.search import PairSource
from normgeom.errors import DimensionError
from normgeom.orthogonality.birkhoff import is_bj_orthogonal
from normgeom.spaces.norms import euclidean
from normgeom.spaces.polygon import diamond, regular_polygon, square
from normgeom.sphere.ips import ips_test, ips_window

SQRT2 = math.sqrt(2.0)
FAST = SearchConfig(theta_resolution=64, phi_resolution=64, t_grid=64, threads=1)


def test_window_is_open():
    lo, hi = ips_window()
    assert IPS_WINDOW_LO < lo < hi < IPS_WINDOW_HI
    assert abs(IPS_WINDOW_LO - (SQRT2 - 1.0) ** 2) < 1e-15
    assert abs(lo - IPS_WINDOW_LO) < 1e-8


def test_euclidean_passes():
    report = ips_test(euclidean(), FAST)
    assert report.passed
    assert report.witness is None
    assert abs(report.sup_found - SQRT2) < 1e-6
    assert report.to_dict()["window_boundaries"] == "excluded"


def test_square_fails_with_a_witness():
    report = ips_test(square(), FAST)
    assert not report.passed
    assert report.sup_found >= 2.0 - 1e-6
    witness = report.witness
    assert witness.value >= SQRT2 + 0.01
    lo, hi = report.lambda_window
    assert lo <= abs(witness.t) <= hi
    assert is_bj_orthogonal(square(), witness.x, witness.y)[0]
    assert report.to_dict()["witness"]["value"] == witness.value


@pytest.mark.parametrize("norm", [diamond(), regular_polygon(6)])
def test_polygons_fail(norm):
    report = ips_test(norm, FAST)
    assert not report.passed
    # A vertex x with y along an adjacent edge reaches 2 at |t| = 1
    assert report.sup_found >= 2.0 - 1e-6


def test_shared_pair_source():
    norm = regular_polygon(8)
    source = PairSource(norm, FAST)
    assert ips_test(norm, FAST, source=source).sup_found == ips_test(norm, FAST).sup_found


def test_ips_needs_the_plane():
    with pytest.raises(DimensionError):
        ips_test(euclidean(3), FAST)
