"""
Inner-product-space test.

A plane norm is Euclidean iff (1+|t|)/||y + t*x|| <= sqrt(2) for every orthogonal unit
pair and every |t| in the open window (3 - 2*sqrt(2), sqrt(2) + 1). The window is
searched shrunk by ips_window_shrink at both ends; its boundary values are excluded.
"""
import logging
from dataclasses import dataclass

import numpy as np

from ..config import IPS_WINDOW_HI, IPS_WINDOW_LO, SQRT2, TOLERANCES, SearchConfig
from ..errors import DimensionError
from ..constants.rectangular import MuWitness, mu_ratio
from ..constants.search import PairSource, RatioFamily, maximize_on_interval
from ..spaces.norms import NormDescriptor, Vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IpsReport:
    """
    :param passed: sup_found <= sqrt(2) + ips_pass_margin.
    :param sup_found: Largest ratio found with |t| inside the window.
    :param witness: Attaining pair when the test failed.
    :param lambda_window: Searched |t| range (open window shrunk at both ends).
    """
    passed: bool
    sup_found: float
    witness: MuWitness | None
    lambda_window: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "sup_found": self.sup_found,
            "witness": self.witness.to_dict() if self.witness else None,
            "lambda_window": list(self.lambda_window),
            "window_boundaries": "excluded",
        }


def ips_window() -> tuple[float, float]:
    shrink = TOLERANCES.ips_window_shrink
    return IPS_WINDOW_LO + shrink, IPS_WINDOW_HI - shrink


def ips_test(
    norm: NormDescriptor, config: SearchConfig, tol: float = TOLERANCES.ortho, source: PairSource | None = None
) -> IpsReport:
    """
    Search the largest (1+|t|)/||y + t*x|| over orthogonal unit pairs with |t| in the window.
    :raises DimensionError: norm is not two-dimensional.
    """
    if norm.dim != 2:
        raise DimensionError(f"ips_test needs a 2D norm, got dim={norm.dim}")
    source = source or PairSource(norm, config, tol)
    lo, hi = ips_window()

    def objective(x: Vector, ys: Vector) -> tuple[Vector, Vector]:
        family = RatioFamily(norm, ys, x, 1.0)
        t_neg, v_neg = maximize_on_interval(family, -hi, -lo, config.t_grid, config.refine_tol)
        t_pos, v_pos = maximize_on_interval(family, lo, hi, config.t_grid, config.refine_tol)
        better = v_pos > v_neg
        return np.where(better, t_pos, t_neg), np.where(better, v_pos, v_neg)

    best = source.maximize(objective)
    sup_found = mu_ratio(norm, best.x, best.y, best.t)
    passed = sup_found <= SQRT2 + TOLERANCES.ips_pass_margin
    witness = None if passed else MuWitness(best.x, best.y, best.t, sup_found)

    logger.info(
        f"IPS test on {norm.label()}: sup={sup_found:.9f} -> {'passed' if passed else 'failed'}"
    )
    return IpsReport(passed, sup_found, witness, (lo, hi))
