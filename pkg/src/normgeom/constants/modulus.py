"""
Rectangular modulus mu_X(lam) and *-modulus mu*_X(lam).

    mu*_X(lam) = sup { (lam + t) / ||u + t*v|| : t > 0, u, v on the sphere, u orthogonal to v }
    mu_X(lam)  = max { mu*_X(lam), lam * mu*_X(1/lam) }

mu_X(1) is the rectangular constant.
"""
import math
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from ..config import SearchConfig
from ..enums import ModulusBranch
from ..errors import ComputationError, NormError, PreconditionError
from ..spaces.norms import NormDescriptor, Vector
from .rectangular import MuWitness, star_ratio
from .search import PairSource, RatioFamily, maximize_on_interval

logger = logging.getLogger(__name__)

# Smallest upper end of the t-search for the *-modulus.
STAR_T_FLOOR = 6.0


@dataclass(frozen=True)
class ModulusPoint:
    """
    One point of the modulus curve.

    :param lam: Modulus parameter (> 0).
    :param star_value: mu*_X(lam).
    :param witness: *-modulus witness of the winning term (its lam is lam or 1/lam).
    :param value: mu_X(lam); None when only the *-modulus was computed.
    :param reciprocal_value: lam * mu*_X(1/lam); None when only the *-modulus was computed.
    :param branch: Which term attained mu_X(lam).
    """
    lam: float
    star_value: float
    witness: MuWitness
    value: float | None = None
    reciprocal_value: float | None = None
    branch: ModulusBranch | None = None

    @property
    def lower_bound(self) -> float:
        return math.sqrt(1.0 + self.lam * self.lam)

    @property
    def upper_bound(self) -> float:
        return max(self.lam + 2.0, 1.0 + 2.0 * self.lam)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "star_value": self.star_value,
            "value": self.value,
            "reciprocal_value": self.reciprocal_value,
            "branch": self.branch.value if self.branch else None,
            "witness": self.witness.to_dict(),
        }


@dataclass
class ModulusCurve:
    """Modulus points in input order, plus the parameters that failed."""
    points: list[ModulusPoint] = field(default_factory=list)
    failures: list[tuple[float, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def to_dict(self) -> dict:
        return {
            "points": [p.to_dict() for p in self.points],
            "failures": [{"lambda": lam, "error": msg} for lam, msg in self.failures],
        }


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam) or lam <= 0.0:
        raise PreconditionError(f"lambda must be a positive real, got {lam}")
    return lam


def star_t_max(lam: float) -> float:
    """Upper end of the t-search: max(6, 2 + 1/lam) covers the region where the sup can exceed 1 + lam."""
    return max(STAR_T_FLOOR, 2.0 + 1.0 / lam)


def _star_objective(norm: NormDescriptor, lam: float, config: SearchConfig):
    t_hi = star_t_max(lam)

    def objective(u: Vector, vs: Vector) -> tuple[Vector, Vector]:
        family = RatioFamily(norm, u, vs, lam)
        return maximize_on_interval(family, 0.0, t_hi, config.t_grid, config.refine_tol)

    return objective


def _star_point(source: PairSource, lam: float) -> ModulusPoint:
    norm = source.norm
    best = source.maximize(_star_objective(norm, lam, source.config))
    value = star_ratio(norm, lam, best.x, best.y, best.t)
    witness = MuWitness(best.x, best.y, best.t, value, lam=lam)
    return ModulusPoint(lam, value, witness)


def modulus_star(
    norm: NormDescriptor, lam: float, config: SearchConfig, source: PairSource | None = None
) -> ModulusPoint:
    """
    mu*_X(lam) with its witness; `value` is left unset.

    :param norm: Norm descriptor.
    :param lam: Positive modulus parameter.
    :param config: Sweep configuration.
    :param source: Precomputed orthogonal pairs for this norm, if any.
    :raises PreconditionError: lam <= 0.
    """
    lam = _check_lambda(lam)
    source = source or PairSource(norm, config)
    point = _star_point(source, lam)
    logger.debug(f"mu*({norm.label()}, {lam:g}) = {point.star_value:.9f}")
    return point


def modulus(
    norm: NormDescriptor, lam: float, config: SearchConfig, source: PairSource | None = None
) -> ModulusPoint:
    """
    mu_X(lam) = max(mu*_X(lam), lam * mu*_X(1/lam)), keeping the winning witness.
    :raises PreconditionError: lam <= 0.
    """
    lam = _check_lambda(lam)
    source = source or PairSource(norm, config)
    direct = _star_point(source, lam)
    reciprocal = direct if lam == 1.0 else _star_point(source, 1.0 / lam)
    reciprocal_value = lam * reciprocal.star_value

    if reciprocal_value > direct.star_value:
        value, branch, witness = reciprocal_value, ModulusBranch.RECIPROCAL, reciprocal.witness
    else:
        value, branch, witness = direct.star_value, ModulusBranch.DIRECT, direct.witness

    point = ModulusPoint(lam, direct.star_value, witness, value, reciprocal_value, branch)
    logger.info(f"mu_X({lam:g}) = {value:.9f} ({branch.value}) for {norm.label()}")
    return point


def modulus_curve(norm: NormDescriptor, lambdas: Iterable[float], config: SearchConfig) -> ModulusCurve:
    """
    Tabulate mu_X over `lambdas`. Invalid or failing parameters are recorded, not raised.
    """
    curve = ModulusCurve()
    lambdas = list(lambdas)
    if not lambdas:
        return curve

    source = PairSource(norm, config)
    for lam in lambdas:
        try:
            curve.points.append(modulus(norm, lam, config, source))
        except (PreconditionError, ComputationError, NormError) as e:
            logger.warning(f"Modulus at lambda={lam} failed: {e}")
            curve.failures.append((float(lam), str(e)))
    return curve


def modulus_direct(norm: NormDescriptor, lam: float, config: SearchConfig, source: PairSource | None = None) -> float:
    """
    mu_X(lam) from its two-term definition

        sup over t > 0 and orthogonal unit pairs of max{ (lam^2 + t)/||lam*u + t*v||, (1 + lam^2*t)/||u + lam*t*v|| }

    Used to cross-check the max identity behind modulus().
    """
    lam = _check_lambda(lam)
    source = source or PairSource(norm, config)
    t_hi = lam * star_t_max(lam)

    # First term: (lam^2 + t)/||lam*u + t*v|| = lam * (lam + s)/||u + s*v|| with s = t/lam.
    def first(u: Vector, vs: Vector) -> tuple[Vector, Vector]:
        family = RatioFamily(norm, lam * np.atleast_2d(u), vs, lam * lam)
        return maximize_on_interval(family, 0.0, t_hi, source.config.t_grid, source.config.refine_tol)

    # Second term: (1 + lam^2*t)/||u + lam*t*v||, searched in s = lam*t.
    def second(u: Vector, vs: Vector) -> tuple[Vector, Vector]:
        s_hi = star_t_max(1.0 / lam)
        family = RatioFamily(norm, u, vs, 1.0 / lam)
        s, values = maximize_on_interval(family, 0.0, s_hi, source.config.t_grid, source.config.refine_tol)
        return s, lam * values

    return max(source.maximize(first).value, source.maximize(second).value)
