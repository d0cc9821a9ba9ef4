"""
The rectangular constant mu(X).

mu(X) is the supremum of (||x|| + ||y||) / ||x + y|| over Birkhoff-James orthogonal
pairs. Writing the pair as (t*x, y) with x, y on the unit sphere turns it into

    mu(X) = sup { (1+|t|) / ||y + t*x|| : x orthogonal to y, t real }

which is what the sweeps maximize. |t| <= 6 suffices for every norm.
"""
import math
import logging
from dataclasses import dataclass

import numpy as np

from ..config import TOLERANCES, SearchConfig
from ..errors import ComputationError, NormError
from ..spaces.norms import NormDescriptor, Vector, as_vector, norm_values
from .search import (
    RatioFamily,
    best_pair,
    best_sampled_pair,
    cone_builder,
    collect_pairs,
    half_circle_bases,
    maximize_split,
    sample_orthogonal_pairs,
)

logger = logging.getLogger(__name__)

MU_LOWER = math.sqrt(2.0)
MU_UPPER = 3.0


@dataclass(frozen=True)
class MuWitness:
    """
    A concrete orthogonal pair attaining a reported ratio.

    :param x: Point of the unit sphere.
    :param y: Point of the unit sphere with x orthogonal to y.
    :param t: Scalar of the ratio.
    :param value: (1+|t|)/||y + t*x||, or (lam + t)/||x + t*y|| when lam is set.
    :param lam: Modulus parameter for *-modulus witnesses, None for mu(X) witnesses.
    """
    x: Vector
    y: Vector
    t: float
    value: float
    lam: float | None = None

    def evaluate(self, norm: NormDescriptor) -> float:
        """Recompute the ratio from (x, y, t)."""
        if self.lam is None:
            return mu_ratio(norm, self.x, self.y, self.t)
        return star_ratio(norm, self.lam, self.x, self.y, self.t)

    def to_dict(self) -> dict:
        data = {
            "x": [float(v) for v in self.x],
            "y": [float(v) for v in self.y],
            "t": self.t,
            "value": self.value,
        }
        if self.lam is not None:
            data["lambda"] = self.lam
        return data


def mu_pair(norm: NormDescriptor, x, y) -> float:
    """
    (||x|| + ||y||) / ||x + y||. Orthogonality is not checked here.
    :raises NormError: x or y is zero.
    :raises ComputationError: x + y vanishes.
    """
    x = as_vector(x, norm.dim)
    y = as_vector(y, norm.dim)
    if not np.any(x) or not np.any(y):
        raise NormError("mu_pair needs nonzero x and y")
    total = x + y
    if float(np.max(np.abs(total))) <= TOLERANCES.zero_denominator:
        raise ComputationError(f"x + y vanishes for x={x.tolist()}, y={y.tolist()}")
    return float((norm_values(norm, x) + norm_values(norm, y)) / norm_values(norm, total))


def mu_ratio(norm: NormDescriptor, x, y, t: float) -> float:
    """
    (1+|t|) / ||y + t*x||; equals mu_pair(t*x, y) for t != 0.
    :raises ComputationError: y + t*x vanishes.
    """
    x = as_vector(x, norm.dim)
    y = as_vector(y, norm.dim)
    den = float(norm_values(norm, y + t * x))
    if den <= TOLERANCES.zero_denominator:
        raise ComputationError(f"y + t*x vanishes at t={t}")
    return (1.0 + abs(t)) / den


def star_ratio(norm: NormDescriptor, lam: float, u, v, t: float) -> float:
    """(lam + t) / ||u + t*v||, the *-modulus ratio."""
    u = as_vector(u, norm.dim)
    v = as_vector(v, norm.dim)
    den = float(norm_values(norm, u + t * v))
    if den <= TOLERANCES.zero_denominator:
        raise ComputationError(f"u + t*v vanishes at t={t}")
    return (lam + abs(t)) / den


def _mu_objective(norm: NormDescriptor, config: SearchConfig):
    def objective(x: Vector, ys: Vector) -> tuple[Vector, Vector]:
        family = RatioFamily(norm, ys, x, 1.0)
        return maximize_split(family, -config.t_max, config.t_max, config.t_grid, config.refine_tol)

    return objective


def _witness(norm: NormDescriptor, candidate) -> MuWitness:
    value = mu_ratio(norm, candidate.x, candidate.y, candidate.t)
    return MuWitness(candidate.x, candidate.y, candidate.t, value)


def mu_estimate(norm: NormDescriptor, config: SearchConfig, tol: float = TOLERANCES.ortho) -> MuWitness:
    """
    Sweep estimate of mu(X), a certified lower bound with an attaining witness.

    In the plane: theta_resolution base points, the orthogonal cone of each by angular
    sweep, phi_resolution directions per arc and best_t over [-t_max, t_max].
    In higher dimensions: mc_samples random orthogonal pairs (lower bound only).

    :param norm: Norm descriptor.
    :param config: Validated sweep configuration.
    :param tol: Orthogonality tolerance of the cone sweep.
    """
    config.validate()
    objective = _mu_objective(norm, config)

    if norm.dim != 2:
        logger.info(f"mu({norm.label()}): Monte-Carlo over {config.mc_samples} orthogonal pairs")
        pairs = sample_orthogonal_pairs(norm, config.mc_samples, np.random.default_rng(config.seed))
        witness = _witness(norm, best_sampled_pair(pairs, objective))
    else:
        bases = half_circle_bases(norm, config.theta_resolution)
        cones = cone_builder(norm, config.phi_resolution, tol, exact=False)
        pairs = collect_pairs(norm, bases, cones, config.phi_resolution, config.threads)
        witness = _witness(norm, best_pair(pairs, objective, config.threads))

    logger.info(f"mu({norm.label()}) >= {witness.value:.9f} at t={witness.t:.6f}")
    return witness


def mu_polyhedral_exact(norm: NormDescriptor, config: SearchConfig, tol: float = TOLERANCES.ortho) -> MuWitness:
    """
    mu(X) for a polyhedral norm, searching only over extreme points x of the unit ball.

    Every vertex gets its exact facet cone; y ranges over the whole cone (the companion
    of an extreme point need not be extreme) and t over [-t_max, t_max] with envelope
    breakpoints as candidates.

    :raises NormError: norm is not polyhedral.
    """
    if not norm.is_polyhedral:
        raise NormError(f"mu_polyhedral_exact needs a polyhedral norm, got {norm.label()}")
    config.validate()

    cones = cone_builder(norm, config.phi_resolution, tol, exact=True)
    pairs = collect_pairs(norm, norm.vertex_array, cones, config.phi_resolution, config.threads)
    witness = _witness(norm, best_pair(pairs, _mu_objective(norm, config), config.threads))

    if witness.value > MU_UPPER + 1e-9:
        logger.warning(f"mu({norm.label()}) = {witness.value:.12f} exceeds the upper bound 3")
    logger.info(f"mu({norm.label()}) = {witness.value:.12f} over {len(pairs)} vertices")
    return witness
