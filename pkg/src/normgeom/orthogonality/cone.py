"""
Orthogonal cones in the plane.

For x on the unit sphere, the directions y with x orthogonal to y form two antipodal
closed arcs. They separate the open region P = {d_minus > 0}, which contains x,
from the open region N = {d_plus < 0}, which contains -x. The sweep locates the
boundaries of P and N at exact sign, so both ends of an arc satisfy
d_minus <= 0 <= d_plus as computed; an arc is the closed gap between P and N and may be
a single direction (smooth norms).
"""
import math
import logging
from dataclasses import dataclass

import numpy as np

from ..config import TOLERANCES
from ..errors import ComputationError, DimensionError
from ..spaces.norms import NormDescriptor, Vector, normalize, polar_angle, sphere_points
from ..spaces.polygon import active_facets
from .birkhoff import BracketOracle, bracket_oracle

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OrthoCone:
    """
    Directions orthogonal to a base point.

    :param base: Point of the unit sphere.
    :param arcs: Closed angle intervals (lo, hi) with lo in [0, 2*pi) and hi >= lo
        (hi may exceed 2*pi when an arc wraps). lo == hi marks a single direction.
    """
    base: Vector
    arcs: tuple[tuple[float, float], ...]

    def contains(self, phi: float, slack: float = 0.0) -> bool:
        """True if angle phi lies in some arc (modulo 2*pi), widened by `slack`."""
        for lo, hi in self.arcs:
            offset = (phi - lo) % TWO_PI
            if offset <= hi - lo + slack or offset >= TWO_PI - slack:
                return True
        return False

    def to_dict(self) -> dict:
        return {"base": self.base.tolist(), "arcs": [list(arc) for arc in self.arcs]}


def _classify(oracle: BracketOracle, norm: NormDescriptor, phis: Vector, tol: float) -> Vector:
    """+1 on P, -1 on N, 0 on orthogonal directions."""
    d_minus, d_plus = oracle(sphere_points(norm, phis))
    return np.where(d_minus > tol, 1, np.where(d_plus < -tol, -1, 0))


def _bisect(
    oracle: BracketOracle, norm: NormDescriptor, inside: Vector, outside: Vector, labels: Vector, tol: float
) -> tuple[Vector, Vector]:
    """
    Shrink every bracket [inside_i, outside_i] around the boundary of the region of class labels_i.
    :return: (last angles in the regions, first angles outside them).
    """
    inside = np.asarray(inside, dtype=np.float64).copy()
    outside = np.asarray(outside, dtype=np.float64).copy()
    for _ in range(TOLERANCES.cone_bisections):
        mid = 0.5 * (inside + outside)
        hit = _classify(oracle, norm, mid, tol) == labels
        inside = np.where(hit, mid, inside)
        outside = np.where(hit, outside, mid)
    return inside, outside


def orthogonal_cone(
    norm: NormDescriptor, x, resolution: int, tol: float = TOLERANCES.ortho, oracle: BracketOracle | None = None
) -> OrthoCone:
    """
    Sweep `resolution` equispaced directions around x and return the orthogonal arcs.

    :param norm: Two-dimensional norm.
    :param x: Nonzero base point (normalized internally).
    :param resolution: Grid size (>= 16).
    :param tol: Every arc endpoint must pass the orthogonality test at this tolerance.
    :param oracle: Precomputed derivative oracle for x, if the caller has one.
    :raises DimensionError: norm is not two-dimensional.
    :raises ComputationError: no arc was found, or an endpoint fails the tolerance.
    """
    if norm.dim != 2:
        raise DimensionError(f"orthogonal_cone needs a 2D norm, got dim={norm.dim}")
    if resolution < 16:
        raise ValueError(f"resolution must be >= 16, got {resolution}")

    base = normalize(norm, x)
    oracle = oracle or bracket_oracle(norm, base)

    # Starting at the angle of x puts the first sample inside P.
    start = polar_angle(base)
    phis = start + TWO_PI * np.arange(resolution + 1) / resolution
    classes = _classify(oracle, norm, phis[:-1], 0.0)
    classes = np.append(classes, classes[0])

    # Every transition out of P or N needs one boundary search; run them together.
    cuts = np.flatnonzero(classes[:-1] != classes[1:])
    inside, outside, labels = [], [], []
    for j in cuts:
        if classes[j] != 0:
            inside.append(phis[j])
            outside.append(phis[j + 1])
            labels.append(classes[j])
        if classes[j + 1] != 0:
            inside.append(phis[j + 1])
            outside.append(phis[j])
            labels.append(classes[j + 1])
    _, edges = _bisect(oracle, norm, np.array(inside), np.array(outside), np.array(labels), 0.0)

    arcs: list[tuple[float, float]] = []
    arc_start: float | None = None
    k = 0
    for j in cuts:
        if classes[j] != 0:
            arc_start = float(edges[k])
            k += 1
        if classes[j + 1] != 0:
            arc_end = float(edges[k])
            k += 1
            if arc_start is None:
                raise ComputationError(f"Orthogonal cone sweep at {base.tolist()} lost track of an arc")
            arcs.append(_close_arc(arc_start, arc_end))
            arc_start = None

    if not arcs:
        raise ComputationError(f"No orthogonal direction found for x={base.tolist()} (tol={tol:g})")

    arcs.sort()
    _certify_endpoints(oracle, norm, base, arcs, tol)
    logger.debug(f"Orthogonal cone at {base.tolist()}: {arcs}")
    return OrthoCone(base, tuple(arcs))


def _certify_endpoints(
    oracle: BracketOracle, norm: NormDescriptor, base: Vector, arcs: list[tuple[float, float]], tol: float
) -> None:
    ends = np.array(arcs).ravel()
    d_minus, d_plus = oracle(sphere_points(norm, ends))
    slack = np.maximum(d_minus, -d_plus)
    if np.any(slack > tol):
        worst = int(np.argmax(slack))
        raise ComputationError(
            f"Orthogonal cone at {base.tolist()}: arc end phi={ends[worst]:.17g} misses orthogonality by {slack[worst]:.3g}"
        )


def _close_arc(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < TOLERANCES.arc_collapse:
        lo = hi = 0.5 * (lo + hi)
    shift = math.floor(lo / TWO_PI) * TWO_PI
    return lo - shift, hi - shift


def arc_directions(norm: NormDescriptor, cone: OrthoCone, per_arc: int) -> Vector:
    """
    Unit-sphere directions sampled from every arc, endpoints included.
    Arcs narrower than arc_sample_floor contribute their midpoint only.
    """
    phis = []
    for lo, hi in cone.arcs:
        if hi - lo < TOLERANCES.arc_sample_floor:
            phis.append(np.array([0.5 * (lo + hi)]))
        else:
            phis.append(np.linspace(lo, hi, per_arc))
    return sphere_points(norm, np.concatenate(phis))


def polyhedral_cone(norm: NormDescriptor, x, tol: float = TOLERANCES.ortho) -> OrthoCone:
    """
    Exact orthogonal cone for a polyhedral norm.

    The sign of every active facet value f(y) changes only where y is parallel to the
    edge of f, so the arcs are unions of the angular intervals between those edge
    directions. Each interval is classified at its midpoint; an edge direction that
    separates two non-orthogonal intervals is a single-direction arc.
    """
    if not norm.is_polyhedral:
        raise DimensionError(f"polyhedral_cone needs a polyhedral norm, got {norm.label()}")
    base = normalize(norm, x)
    oracle = bracket_oracle(norm, base)
    active = norm.facet_matrix[active_facets(norm, base)]

    edge_angles = np.concatenate([
        np.arctan2(active[:, 0], -active[:, 1]),
        np.arctan2(-active[:, 0], active[:, 1]),
    ])
    angles = np.unique(np.mod(edge_angles, TWO_PI))
    angles = angles[np.append(True, np.diff(angles) > TOLERANCES.arc_collapse)]
    upper = np.append(angles[1:], angles[0] + TWO_PI)
    classes = _classify(oracle, norm, 0.5 * (angles + upper), tol)

    arcs: list[tuple[float, float]] = []
    count = len(angles)
    for i in range(count):
        if classes[i] == 0:
            if i > 0 and classes[i - 1] == 0:
                arcs[-1] = (arcs[-1][0], float(upper[i]))
            else:
                arcs.append((float(angles[i]), float(upper[i])))
        elif classes[i - 1] != 0:
            arcs.append((float(angles[i]), float(angles[i])))

    if len(arcs) > 1 and classes[0] == 0 and classes[-1] == 0:
        first = arcs.pop(0)
        arcs[-1] = (arcs[-1][0], first[1] + TWO_PI)

    if not arcs:
        raise ComputationError(f"No orthogonal direction found for x={base.tolist()} (tol={tol:g})")
    arcs = sorted(_close_arc(lo, hi) for lo, hi in arcs)
    logger.debug(f"Exact orthogonal cone at {base.tolist()}: {arcs}")
    return OrthoCone(base, tuple(arcs))


def random_orthogonal_pairs(
    norm: NormDescriptor, count: int, rng: np.random.Generator, tol: float = TOLERANCES.ortho, resolution: int = 256
) -> list[tuple[Vector, Vector]]:
    """
    `count` orthogonal unit pairs in the plane: x at a uniform random angle, y at a
    uniform angle inside a randomly chosen arc of the cone of x.
    """
    pairs = []
    for _ in range(count):
        x = sphere_points(norm, [rng.uniform(0.0, TWO_PI)])[0]
        cone = polyhedral_cone(norm, x, tol) if norm.is_polyhedral else orthogonal_cone(norm, x, resolution, tol)
        lo, hi = cone.arcs[int(rng.integers(len(cone.arcs)))]
        phi = rng.uniform(lo, hi) if hi > lo else lo
        pairs.append((cone.base, sphere_points(norm, [phi])[0]))
    return pairs
