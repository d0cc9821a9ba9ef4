"""
Straight segments in the unit sphere of a plane norm.

A polygonal sphere is a union of edges, so its longest segment is its longest edge.
A strictly convex sphere (Euclidean, Lp with 1 < p < inf) contains none.
"""
import logging
from dataclasses import dataclass

import numpy as np

from ..config import TOLERANCES, SearchConfig
from ..enums import PairClass
from ..errors import ComputationError, DimensionError, NormError, PreconditionError
from ..orthogonality.birkhoff import OrthoCertificate, is_bj_orthogonal
from ..orthogonality.cone import polyhedral_cone, random_orthogonal_pairs
from ..spaces.norms import NormDescriptor, Vector, as_vector, norm_values, sphere_point
from ..spaces.polygon import as_polyhedral, has_polyhedral_form
from ..constants.search import PairSource

logger = logging.getLogger(__name__)

SPHERE_TOL = 1e-9

# Multiples of l at which flatness_growth_check evaluates ||x + lam*y||.
GROWTH_FACTORS = (1.0, 1.25, 2.0, 5.0)


@dataclass(frozen=True)
class SegmentReport:
    """
    A segment [u, v] of the unit sphere.

    :param u: First endpoint.
    :param v: Second endpoint.
    :param length: ||u - v|| in the same norm.
    :param is_max: True when the segment reaches the diameter bound 2.
    """
    u: Vector
    v: Vector
    length: float
    is_max: bool

    def to_dict(self) -> dict:
        return {
            "u": [float(c) for c in self.u],
            "v": [float(c) for c in self.v],
            "length": self.length,
            "is_max": self.is_max,
        }


def _segment(norm: NormDescriptor, u: Vector, v: Vector) -> SegmentReport:
    length = float(norm_values(norm, v - u))
    return SegmentReport(u, v, length, abs(length - 2.0) <= SPHERE_TOL)


def sphere_edges(norm: NormDescriptor) -> list[SegmentReport]:
    """
    Every edge (v_i, v_{i+1}) of a polygonal sphere, in canonical vertex order.
    :raises NormError: The sphere is not a polygon.
    """
    polygon = as_polyhedral(norm)
    verts = polygon.vertex_array
    return [_segment(polygon, verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts))]


def max_segment_length(norm: NormDescriptor) -> SegmentReport:
    """
    Longest straight segment in the unit sphere.
    Polygons report their longest edge (first in vertex order on ties); strictly convex
    norms report length 0.

    :raises DimensionError: norm is not two-dimensional.
    """
    if norm.dim != 2:
        raise DimensionError(f"Segment detection needs a 2D norm, got dim={norm.dim}")
    if has_polyhedral_form(norm):
        edges = sphere_edges(norm)
        best = edges[int(np.argmax([e.length for e in edges]))]
        logger.debug(f"Longest segment of {norm.label()}: {best.length:.12f}")
        return best
    if norm.is_smooth_lp:
        u = sphere_point(norm, 0.0)
        return SegmentReport(u, u.copy(), 0.0, False)
    raise NormError(f"No segment detection for {norm.label()}")


def segment_lower_bound(norm: NormDescriptor) -> float:
    """
    1 + s for the longest sphere segment of length s.
    For a segment [u, v], u is orthogonal to v - u and mu(u, v - u) = (1 + s)/||v|| = 1 + s,
    so this bounds mu(X) from below.
    """
    return 1.0 + max_segment_length(norm).length


def _on_sphere(norm: NormDescriptor, z: Vector) -> bool:
    return abs(float(norm_values(norm, z)) - 1.0) <= SPHERE_TOL


def segment_orthogonality_check(
    norm: NormDescriptor, u, v, tol: float = TOLERANCES.ortho
) -> tuple[bool, OrthoCertificate]:
    """
    For a segment [u, v] of the sphere, u must be orthogonal to v - u.

    The segment hypothesis is sampled at the endpoints and at t = 0.25, 0.5, 0.75.
    A False verdict on a genuine segment is logged as an error.

    :raises PreconditionError: [u, v] is not contained in the sphere.
    """
    u = as_vector(u, norm.dim)
    v = as_vector(v, norm.dim)
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        z = t * u + (1.0 - t) * v
        if not _on_sphere(norm, z):
            raise PreconditionError(
                f"[{u.tolist()}, {v.tolist()}] is not a sphere segment: "
                f"||z|| = {float(norm_values(norm, z)):.12f} at t={t}"
            )

    verdict, cert = is_bj_orthogonal(norm, u, v - u, tol)
    if not verdict:
        logger.error(f"Segment [{u.tolist()}, {v.tolist()}] violates u orthogonal to v - u: {cert.to_dict()}")
    return verdict, cert


@dataclass(frozen=True)
class FlatnessReport:
    """
    Sampled check that short sphere segments force norm growth along orthogonal lines.

    :param l: Threshold length.
    :param max_segment: Longest sphere segment.
    :param hypothesis: A = every sphere segment is shorter than l.
    :param conclusion: B = ||x + lam*y|| > 1 (by more than rounding) on every sampled orthogonal pair and |lam| >= l.
    :param samples: Orthogonal pairs evaluated.
    :param min_growth: Smallest ||x + lam*y|| seen.
    :param growth_violation: A holds but B failed (must never happen).
    :param converse_candidate: B held on all samples although A fails by a clear margin.
        Sampling cannot prove B, so this is only a candidate.
    :param counterexample: (x, y, lam, norm) of the smallest growth sample when B failed.
    """
    l: float
    max_segment: float
    hypothesis: bool
    conclusion: bool
    samples: int
    min_growth: float
    growth_violation: bool
    converse_candidate: bool
    counterexample: dict | None = None

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "max_segment": self.max_segment,
            "hypothesis": self.hypothesis,
            "conclusion": self.conclusion,
            "conclusion_basis": "sampled",
            "samples": self.samples,
            "min_growth": self.min_growth,
            "growth_violation": self.growth_violation,
            "converse_candidate": self.converse_candidate,
            "counterexample": self.counterexample,
        }


def _sampled_pairs(norm: NormDescriptor, trials: int, rng: np.random.Generator, tol: float) -> list[tuple[Vector, Vector]]:
    """
    Certified orthogonal pairs: every polygon vertex with its cone endpoints, then
    `trials` random base points with a uniform direction from a random arc.
    """
    pairs = []

    if has_polyhedral_form(norm):
        polygon = as_polyhedral(norm)
        for vertex in polygon.vertex_array:
            cone = polyhedral_cone(polygon, vertex, tol)
            for lo, hi in cone.arcs:
                pairs.extend((vertex, sphere_point(norm, phi)) for phi in ((lo, hi) if hi > lo else (lo,)))

    pairs.extend(random_orthogonal_pairs(norm, trials, rng, tol))

    return [(x, y) for x, y in pairs if is_bj_orthogonal(norm, x, y, tol)[0]]


def flatness_growth_check(
    norm: NormDescriptor, l: float, trials: int, seed: int = 0, tol: float = TOLERANCES.ortho
) -> FlatnessReport:
    """
    Compare A (all sphere segments shorter than l) with B (||x + lam*y|| > 1 for orthogonal
    unit pairs and |lam| >= l), sampling B at lam in {+-l, +-1.25l, +-2l, +-5l}.

    :param norm: Two-dimensional norm.
    :param l: Positive threshold.
    :param trials: Random orthogonal pairs (>= 1).
    :param seed: PRNG seed.
    """
    if l <= 0.0:
        raise PreconditionError(f"l must be positive, got {l}")
    if trials < 1:
        raise PreconditionError("trials must be >= 1")

    segment = max_segment_length(norm)
    hypothesis = segment.length < l

    pairs = _sampled_pairs(norm, trials, np.random.default_rng(seed), tol)
    if not pairs:
        raise ComputationError(f"No certified orthogonal pair sampled for {norm.label()}")
    lams = np.array([s * f * l for f in GROWTH_FACTORS for s in (1.0, -1.0)])
    xs = np.array([x for x, _ in pairs])
    ys = np.array([y for _, y in pairs])
    growth = norm_values(norm, xs[:, None, :] + lams[None, :, None] * ys[:, None, :])

    # Strict growth: a sample sitting exactly on the sphere counts against B.
    conclusion = bool(np.all(growth > 1.0 + SPHERE_TOL))
    i, j = np.unravel_index(int(np.argmin(growth)), growth.shape)
    counterexample = None
    if not conclusion:
        counterexample = {
            "x": xs[i].tolist(),
            "y": ys[i].tolist(),
            "lambda": float(lams[j]),
            "norm": float(growth[i, j]),
        }

    report = FlatnessReport(
        l=l,
        max_segment=segment.length,
        hypothesis=hypothesis,
        conclusion=conclusion,
        samples=len(pairs),
        min_growth=float(growth[i, j]),
        growth_violation=hypothesis and not conclusion,
        converse_candidate=conclusion and segment.length > l + 1e-6,
        counterexample=counterexample,
    )
    if report.growth_violation:
        logger.error(f"Growth violation on {norm.label()} with l={l}: {counterexample}")
    return report


@dataclass(frozen=True)
class RotundityReport:
    """
    gap = inf of 1 - ||x + y||/2 over orthogonal unit pairs, with the attaining pair.
    A zero gap means some orthogonal pair spans a flat piece of the sphere.
    """
    gap: float
    x: Vector
    y: Vector
    pair_class: PairClass

    def to_dict(self) -> dict:
        return {
            "gap": self.gap,
            "x": [float(c) for c in self.x],
            "y": [float(c) for c in self.y],
            "class": self.pair_class.value,
        }


def rotundity_gap(
    norm: NormDescriptor, config: SearchConfig, tol: float = 1e-6, source: PairSource | None = None
) -> RotundityReport:
    """
    Smallest midpoint deficit 1 - ||x + y||/2 over orthogonal unit pairs.
    :param tol: Gaps at or below this classify the space as having a flat orthogonal pair.
    """
    source = source or PairSource(norm, config)

    def objective(x: Vector, ys: Vector) -> tuple[Vector, Vector]:
        half = 0.5 * norm_values(norm, x + ys)
        return np.zeros(len(ys)), half

    best = source.maximize(objective)
    gap = 1.0 - best.value
    pair_class = PairClass.FLAT_PAIR if gap <= tol else PairClass.STRICTLY_ROTUND_PAIRS
    logger.info(f"Rotundity gap of {norm.label()}: {gap:.9f} ({pair_class.value})")
    return RotundityReport(gap, best.x, best.y, pair_class)
