"""
Symmetric convex polygons as unit balls of two-dimensional polyhedral norms.
"""
import math
import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..config import TOLERANCES
from ..enums import NormKind
from ..errors import DegenerateBallError, DimensionError, NormError
from .norms import NormDescriptor, Vector, as_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FacetFunctional:
    """
    Linear functional f(z) = a . z attaining 1 on one closed edge of the unit sphere.

    :param a: Coefficient vector (a1, a2).
    :param index: Position of the edge (v_index, v_index+1) in the canonical vertex order.
    """
    a: tuple[float, float]
    index: int

    def __call__(self, z) -> float:
        return self.a[0] * z[0] + self.a[1] * z[1]


def _cross(u: Vector, v: Vector) -> Vector:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _merge_duplicates(points: Vector, tol: float) -> Vector:
    kept: list[Vector] = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in kept):
            kept.append(p)
    return np.array(kept)


def _drop_collinear(ring: Vector, tol: float) -> Vector:
    """Remove vertices lying on the segment between their neighbours."""
    changed = True
    while changed and len(ring) > 3:
        changed = False
        prev = np.roll(ring, 1, axis=0)
        nxt = np.roll(ring, -1, axis=0)
        scale = np.linalg.norm(ring - prev, axis=1) * np.linalg.norm(nxt - ring, axis=1)
        turn = _cross(ring - prev, nxt - ring)
        flat = np.flatnonzero(turn <= tol * np.maximum(scale, 1e-300))
        if len(flat):
            ring = np.delete(ring, flat[0], axis=0)
            changed = True
    return ring


def canonicalize_polytope(raw_vertices) -> NormDescriptor:
    """
    Build the polyhedral norm whose unit ball is conv(raw U -raw).

    Vertices are the extreme points of the symmetrized hull, merged within 1e-12,
    ordered counterclockwise starting from the smallest polar angle in [0, 2*pi).

    :param raw_vertices: At least two distinct nonzero 2D points.
    :raises DegenerateBallError: All points are collinear through the origin, or the
        origin is not strictly interior.
    """
    pts = np.asarray(raw_vertices, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DimensionError(f"Polygon vertices must be 2D points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise NormError("Polygon vertices must be finite")

    scale = float(np.max(np.abs(pts))) if pts.size else 0.0
    pts = pts[np.max(np.abs(pts), axis=1) > TOLERANCES.vertex_merge]
    pts = _merge_duplicates(pts, TOLERANCES.vertex_merge) if len(pts) else pts
    if len(pts) < 2:
        raise DegenerateBallError("Need at least two distinct nonzero points")

    cloud = _merge_duplicates(np.vstack([pts, -pts]), TOLERANCES.vertex_merge)
    spread = np.abs(_cross(cloud[:, None, :], cloud[None, :, :]))
    if np.max(spread) <= TOLERANCES.collinear * scale * scale:
        raise DegenerateBallError("All points are collinear through the origin")

    try:
        hull = ConvexHull(cloud)
    except QhullError as e:
        raise DegenerateBallError(f"Convex hull failed: {e}") from e

    # 2D hull vertices come back in counterclockwise order.
    ring = _drop_collinear(cloud[hull.vertices], TOLERANCES.collinear)

    if np.any(_cross(ring, np.roll(ring, -1, axis=0)) <= TOLERANCES.collinear * scale * scale):
        raise DegenerateBallError("Origin is not strictly inside the polygon")

    angles = np.mod(np.arctan2(ring[:, 1], ring[:, 0]), 2.0 * math.pi)
    ring = np.roll(ring, -int(np.argmin(angles)), axis=0)

    vertices = tuple((float(x), float(y)) for x, y in ring)
    logger.debug(f"Canonical polygon with {len(vertices)} vertices")
    return NormDescriptor(NormKind.POLYHEDRAL, 2, vertices=vertices)


def polyhedral(vertices) -> NormDescriptor:
    """Convenience alias of canonicalize_polytope."""
    return canonicalize_polytope(vertices)


def facet_functionals(norm: NormDescriptor) -> list[FacetFunctional]:
    """
    One functional per edge (v_i, v_{i+1}) with f(v_i) = f(v_{i+1}) = 1.
    :raises NormError: norm is not polyhedral.
    """
    if not norm.is_polyhedral:
        raise NormError(f"{norm.label()} is not polyhedral")
    return [
        FacetFunctional((float(a[0]), float(a[1])), i)
        for i, a in enumerate(norm.facet_matrix)
    ]


def active_facets(norm: NormDescriptor, x: Vector) -> Vector:
    """
    Indices of the facets active at x: f(x) >= ||x|| (1 - facet_activity).
    """
    values = norm.facet_matrix @ x
    top = float(np.max(values))
    return np.flatnonzero(values >= top - TOLERANCES.facet_activity * abs(top))


def square() -> NormDescriptor:
    """Unit ball of l_inf^2."""
    return canonicalize_polytope([(1.0, 1.0), (-1.0, 1.0)])


def diamond() -> NormDescriptor:
    """Unit ball of l_1^2."""
    return canonicalize_polytope([(1.0, 0.0), (0.0, 1.0)])


def regular_polygon(sides: int, phase: float = 0.0) -> NormDescriptor:
    """
    Regular polygon with vertices on the Euclidean unit circle at angles phase + 2*pi*k/sides.
    :param sides: Even vertex count (the ball must be symmetric).
    """
    if sides < 4 or sides % 2:
        raise NormError(f"A symmetric regular polygon needs an even side count >= 4, got {sides}")
    k = np.arange(sides)
    angles = phase + 2.0 * math.pi * k / sides
    return canonicalize_polytope(np.stack([np.cos(angles), np.sin(angles)], axis=1))


def as_polyhedral(norm: NormDescriptor) -> NormDescriptor:
    """
    Equivalent polyhedral descriptor of a 2D norm whose ball is a polygon.
    Lp(inf) maps to the square, Lp(1) to the diamond; polyhedral norms are returned unchanged.
    :raises NormError: The norm's ball is not a polygon.
    """
    if norm.is_polyhedral:
        return norm
    if norm.kind is NormKind.LP and norm.dim == 2:
        if math.isinf(norm.p):
            return square()
        if norm.p == 1.0:
            return diamond()
    raise NormError(f"{norm.label()} has no polyhedral descriptor")


def has_polyhedral_form(norm: NormDescriptor) -> bool:
    try:
        as_polyhedral(norm)
    except NormError:
        return False
    return True


def random_polygon(rng: np.random.Generator, min_vertices: int = 6, max_points: int = 20) -> NormDescriptor:
    """
    Random symmetric polygon: k uniform angles with radii in [0.5, 1.5], symmetrized
    and canonicalized. Draws again until the hull has at least `min_vertices` vertices.

    :param rng: Seeded generator.
    :param min_vertices: Smallest accepted vertex count.
    :param max_points: Largest k (the polygon then has at most 2k vertices).
    """
    while True:
        k = int(rng.integers(3, max_points + 1))
        angles = rng.uniform(0.0, 2.0 * math.pi, size=k)
        radii = rng.uniform(0.5, 1.5, size=k)
        points = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1)
        try:
            norm = canonicalize_polytope(points)
        except DegenerateBallError:
            continue
        if len(norm.vertices) >= min_vertices:
            return norm


def random_polygons(count: int, seed: int) -> list[NormDescriptor]:
    """`count` random polygons from one seeded generator."""
    rng = np.random.default_rng(seed)
    return [random_polygon(rng) for _ in range(count)]


def edge_point(norm: NormDescriptor, index: int, t: float) -> Vector:
    """Point t*v_i + (1-t)*v_{i+1} of edge i."""
    verts = norm.vertex_array
    return as_vector(t * verts[index] + (1.0 - t) * verts[(index + 1) % len(verts)])
