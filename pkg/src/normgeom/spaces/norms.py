"""
Norm descriptors and norm evaluation on R^n.

A vector is a 1-D float64 numpy array. Batched helpers accept arrays of shape
(..., n) and evaluate the norm along the last axis; they skip input validation
and are meant for the sweeps.
"""
import math
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import numpy.typing as npt

from ..config import TOLERANCES
from ..enums import NormKind
from ..errors import DimensionError, NormError

logger = logging.getLogger(__name__)

Vector = npt.NDArray[np.float64]

MAX_SWEEP_DIM = 8


@dataclass(frozen=True)
class NormDescriptor:
    """
    Tagged description of a norm on R^dim.

    :param kind: Euclidean, Lp or Polyhedral.
    :param dim: Ambient dimension (>= 2; Polyhedral is always 2).
    :param p: Exponent for Lp, in [1, inf]. None otherwise.
    :param vertices: Canonical CCW vertex list of the unit ball for Polyhedral. Empty otherwise.
    """
    kind: NormKind
    dim: int
    p: float | None = None
    vertices: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if self.dim < 2:
            raise DimensionError(f"Norm dimension must be >= 2, got {self.dim}")
        if self.kind is NormKind.LP:
            if self.p is None or not (self.p >= 1.0):
                raise NormError(f"Lp exponent must lie in [1, inf], got {self.p}")
        if self.kind is NormKind.POLYHEDRAL:
            if self.dim != 2:
                raise DimensionError("Polyhedral norms are two-dimensional")
            if len(self.vertices) < 4:
                raise NormError("Polyhedral norm needs at least 4 vertices")

    @property
    def is_polyhedral(self) -> bool:
        return self.kind is NormKind.POLYHEDRAL

    @property
    def is_smooth_lp(self) -> bool:
        """True for Euclidean and Lp with 1 < p < inf (smooth, strictly convex)."""
        if self.kind is NormKind.EUCLIDEAN:
            return True
        return self.kind is NormKind.LP and 1.0 < self.p < math.inf

    @property
    def exponent(self) -> float | None:
        """The Lp exponent, with Euclidean reported as 2."""
        if self.kind is NormKind.EUCLIDEAN:
            return 2.0
        return self.p

    @cached_property
    def vertex_array(self) -> Vector:
        return np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)

    @cached_property
    def facet_matrix(self) -> Vector:
        """Rows a_i with a_i . v_i = a_i . v_{i+1} = 1, one per edge, in vertex order."""
        if not self.is_polyhedral:
            raise NormError(f"{self.label()} has no facet functionals")
        return edge_functionals(self.vertex_array)

    def label(self) -> str:
        match self.kind:
            case NormKind.EUCLIDEAN:
                return f"euclidean(dim={self.dim})"
            case NormKind.LP:
                p = "inf" if math.isinf(self.p) else f"{self.p:g}"
                return f"lp(p={p}, dim={self.dim})"
            case _:
                return f"polyhedral({len(self.vertices)} vertices)"

    def to_dict(self) -> dict:
        """JSON-ready echo of the descriptor (norm-spec schema)."""
        match self.kind:
            case NormKind.EUCLIDEAN:
                return {"type": "euclidean", "dim": self.dim}
            case NormKind.LP:
                return {"type": "lp", "p": "inf" if math.isinf(self.p) else self.p, "dim": self.dim}
            case _:
                return {"type": "polyhedral", "vertices": [list(v) for v in self.vertices]}


def euclidean(dim: int = 2) -> NormDescriptor:
    return NormDescriptor(NormKind.EUCLIDEAN, dim)


def lp(p: float, dim: int = 2) -> NormDescriptor:
    return NormDescriptor(NormKind.LP, dim, p=float(p))


def edge_functionals(vertices: Vector) -> Vector:
    """
    Solve the 2x2 system a . v_i = a . v_{i+1} = 1 for every edge of a CCW polygon.
    :param vertices: (m, 2) array, origin strictly inside.
    :return: (m, 2) array of functional coefficients.
    """
    nxt = np.roll(vertices, -1, axis=0)
    systems = np.stack([vertices, nxt], axis=1)  # (m, 2, 2)
    det = np.linalg.det(systems)
    if np.any(np.abs(det) <= TOLERANCES.collinear * np.einsum("ij,ij->i", vertices, vertices)):
        raise NormError("Polygon edge passes through the origin")
    # Column right-hand sides: numpy 2 reads a (m, 2) rhs as one matrix, not m vectors.
    return np.linalg.solve(systems, np.ones((len(vertices), 2, 1)))[..., 0]


def as_vector(coords, dim: int | None = None) -> Vector:
    """
    Coerce coordinates into a finite float64 vector.
    :param coords: Sequence of reals.
    :param dim: Expected dimension, if known.
    """
    v = np.asarray(coords, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"Expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"Vector has dimension {v.shape[0]}, norm expects {dim}")
    if not np.all(np.isfinite(v)):
        raise NormError(f"Vector has non-finite coordinates: {v.tolist()}")
    return v


def norm_values(norm: NormDescriptor, points: Vector) -> Vector:
    """
    Batched norm evaluation along the last axis, without validation.
    :param norm: Norm descriptor.
    :param points: Array of shape (..., dim).
    :return: Array of shape (...).
    """
    points = np.asarray(points, dtype=np.float64)
    match norm.kind:
        case NormKind.EUCLIDEAN:
            return np.sqrt(np.einsum("...i,...i->...", points, points))
        case NormKind.POLYHEDRAL:
            return np.max(points @ norm.facet_matrix.T, axis=-1)
        case _:
            p = norm.p
            mag = np.abs(points)
            if math.isinf(p):
                return np.max(mag, axis=-1)
            if p == 1.0:
                return np.sum(mag, axis=-1)
            # Scale by the largest coordinate to keep |x|^p in range.
            scale = np.max(mag, axis=-1, keepdims=True)
            safe = np.where(scale > 0.0, scale, 1.0)
            return np.sum((mag / safe) ** p, axis=-1) ** (1.0 / p) * safe[..., 0]


def eval_norm(norm: NormDescriptor, v) -> float:
    """
    Evaluate ||v||.
    :raises DimensionError: Dimension mismatch.
    :raises NormError: Non-finite input.
    """
    v = as_vector(v, norm.dim)
    return float(norm_values(norm, v))


def normalize(norm: NormDescriptor, v) -> Vector:
    """
    Scale v onto the unit sphere.
    :raises NormError: v is the zero vector.
    """
    v = as_vector(v, norm.dim)
    n = float(norm_values(norm, v))
    if n == 0.0:
        raise NormError("Cannot normalize the zero vector")
    return v / n


def sphere_points(norm: NormDescriptor, thetas) -> Vector:
    """Batched sphere_point for an array of angles; returns shape (len(thetas), 2)."""
    thetas = np.asarray(thetas, dtype=np.float64)
    rays = np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)
    return rays / norm_values(norm, rays)[..., None]


def sphere_point(norm: NormDescriptor, theta: float) -> Vector:
    """
    Point of the unit sphere on the ray at polar angle theta.
    :raises DimensionError: norm is not two-dimensional.
    :raises NormError: theta is not finite.
    """
    if norm.dim != 2:
        raise DimensionError(f"sphere_point needs a 2D norm, got dim={norm.dim}")
    if not math.isfinite(theta):
        raise NormError(f"Angle must be finite, got {theta}")
    return sphere_points(norm, np.array([theta]))[0]


def polar_angle(v: Vector) -> float:
    """Polar angle of a 2D vector in [0, 2*pi)."""
    return math.atan2(v[1], v[0]) % (2.0 * math.pi)


@dataclass(frozen=True)
class ValidationReport:
    """
    Outcome of sampling the norm axioms.

    :param norm: Label of the checked norm.
    :param samples: Number of sampled (x, y, alpha) triples.
    :param passed: True iff no violation was found.
    :param violations: Human-readable description of every failing sample.
    """
    norm: str
    samples: int
    passed: bool
    violations: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "norm": self.norm,
            "samples": self.samples,
            "passed": self.passed,
            "violations": list(self.violations),
        }


def validate_norm(norm: NormDescriptor, samples: int, seed: int = 0) -> ValidationReport:
    """
    Sample homogeneity, symmetry and the triangle inequality.
    :param norm: Norm to check.
    :param samples: Number of random (x, y, alpha) triples (>= 1).
    :param seed: PRNG seed.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    xs = rng.normal(size=(samples, norm.dim)) * rng.uniform(0.1, 10.0, size=(samples, 1))
    ys = rng.normal(size=(samples, norm.dim)) * rng.uniform(0.1, 10.0, size=(samples, 1))
    alphas = rng.uniform(-10.0, 10.0, size=samples)

    nx = norm_values(norm, xs)
    ny = norm_values(norm, ys)
    n_scaled = norm_values(norm, alphas[:, None] * xs)
    n_sum = norm_values(norm, xs + ys)
    n_neg = norm_values(norm, -xs)

    violations = []
    for i in range(samples):
        if abs(n_scaled[i] - abs(alphas[i]) * nx[i]) > 1e-9 * nx[i] * abs(alphas[i]):
            violations.append(f"homogeneity: x={xs[i].tolist()} alpha={alphas[i]}")
        if n_sum[i] > nx[i] + ny[i] + 1e-9:
            violations.append(f"triangle: x={xs[i].tolist()} y={ys[i].tolist()}")
        if abs(n_neg[i] - nx[i]) > 1e-12 * max(1.0, nx[i]):
            violations.append(f"symmetry: x={xs[i].tolist()}")

    if violations:
        logger.warning(f"{norm.label()}: {len(violations)} norm-axiom violations in {samples} samples")
    return ValidationReport(norm.label(), samples, not violations, tuple(violations))
