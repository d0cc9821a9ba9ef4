"""
One-dimensional maximization of norm ratios.

Both the rectangular constant and the *-modulus maximize a ratio of the form

    R(t) = (offset + |t|) / ||base + t * step||

over an interval of t, for many (base, step) rows at once. The search runs a uniform
grid, then golden-section refinement around the best grid point. The ratio is not
known to be unimodal across the kink at t = 0, so each sign half-line is searched
separately. For polyhedral norms the denominator is the upper envelope of the lines
f(base) + t f(step); R is monotone between envelope breakpoints, so the breakpoints
are evaluated as extra candidates and the polyhedral maximum is exact to rounding.

The pair sweeps below feed these searches with orthogonal (x, y) samples and reduce
the per-pair maxima in input order, so threaded runs return the same witness.
"""
import math
import logging
import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..config import TOLERANCES, SearchConfig
from ..errors import ComputationError
from ..orthogonality.birkhoff import james_supporting_functional
from ..orthogonality.cone import OrthoCone, arc_directions, orthogonal_cone, polyhedral_cone
from ..spaces.norms import NormDescriptor, Vector, as_vector, norm_values, sphere_points
from ..spaces.polygon import as_polyhedral, has_polyhedral_form
from ..utils import LogThrottler, ordered_map

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0      # 1/phi
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0   # 1/phi^2


@dataclass(frozen=True)
class RatioFamily:
    """
    A block of ratio functions R_i(t) = (offset + |t|) / ||base_i + t * step_i||.

    :param norm: Norm used in the denominator.
    :param base: (m, n) array (or (n,), broadcast over rows).
    :param step: (m, n) array (or (n,)).
    :param offset: Constant added to |t| in the numerator (1 for mu, lambda for mu*).
    """
    norm: NormDescriptor
    base: Vector
    step: Vector
    offset: float = 1.0

    @property
    def rows(self) -> int:
        return max(np.atleast_2d(self.base).shape[0], np.atleast_2d(self.step).shape[0])

    def _block(self) -> tuple[Vector, Vector]:
        base = np.atleast_2d(self.base)
        step = np.atleast_2d(self.step)
        m = self.rows
        return np.broadcast_to(base, (m, base.shape[1])), np.broadcast_to(step, (m, step.shape[1]))

    def at(self, t: Vector) -> Vector:
        """Per-row evaluation: t has shape (m,), result has shape (m,)."""
        base, step = self._block()
        den = norm_values(self.norm, base + t[:, None] * step)
        return _safe_ratio(self.offset + np.abs(t), den)

    def on_grid(self, ts: Vector) -> Vector:
        """Shared grid: ts has shape (k,), result has shape (m, k)."""
        base, step = self._block()
        den = norm_values(self.norm, base[:, None, :] + ts[None, :, None] * step[:, None, :])
        return _safe_ratio(self.offset + np.abs(ts)[None, :], den)

    def breakpoints(self, lo: float, hi: float) -> Vector | None:
        """
        Envelope breakpoints of ||base + t*step|| inside [lo, hi] for polyhedral norms, as
        an (m, k) array padded with NaN. None for other norms. The envelope can only switch
        between adjacent facets, where base + t*step crosses the ray of a vertex.
        """
        facets = envelope_facets(self.norm)
        if facets is None:
            return None
        base, step = self._block()
        a = base @ facets.T   # (m, k)
        b = step @ facets.T
        with np.errstate(divide="ignore", invalid="ignore"):
            ts = (a - np.roll(a, -1, axis=1)) / (np.roll(b, -1, axis=1) - b)
        ts[~np.isfinite(ts) | (ts < lo) | (ts > hi)] = np.nan
        return ts


@lru_cache(maxsize=32)
def envelope_facets(norm: NormDescriptor) -> Vector | None:
    """Facet matrix of the norm's polygon (polyhedral, Lp(1) and Lp(inf) in 2D), else None."""
    if not has_polyhedral_form(norm):
        return None
    return as_polyhedral(norm).facet_matrix


def _safe_ratio(num: Vector, den: Vector) -> Vector:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0.0, num / den, -np.inf)


def golden_section_max(family: RatioFamily, a: Vector, b: Vector, tol: float) -> tuple[Vector, Vector]:
    """
    Row-wise golden-section search for the maximum of `family` on [a_i, b_i].
    :return: (argmax estimates, values) with final bracket widths below `tol`.
    """
    a = a.astype(np.float64).copy()
    b = b.astype(np.float64).copy()
    dist = b - a
    widest = float(np.max(dist)) if dist.size else 0.0
    if widest <= tol:
        t = 0.5 * (a + b)
        return t, family.at(t)

    n = int(np.ceil(np.log(tol / widest) / np.log(INV_PHI)))
    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = family.at(c)
    yd = family.at(d)

    for _ in range(n - 1):
        keep_left = yc > yd
        dist = INV_PHI * dist
        b = np.where(keep_left, d, b)
        a = np.where(keep_left, a, c)
        new_d = np.where(keep_left, c, a + INV_PHI * dist)
        new_c = np.where(keep_left, a + INV_PHI_SQ * dist, d)
        fresh = family.at(np.where(keep_left, new_c, new_d))
        yc, yd = np.where(keep_left, fresh, yd), np.where(keep_left, yc, fresh)
        c, d = new_c, new_d

    t = np.where(yc > yd, 0.5 * (a + d), 0.5 * (c + b))
    return t, family.at(t)


def maximize_on_interval(
    family: RatioFamily, lo: float, hi: float, grid: int, refine_tol: float
) -> tuple[Vector, Vector]:
    """
    Grid search on [lo, hi] followed by golden-section refinement over the best grid
    cell and its two neighbours; polyhedral breakpoints are added as candidates.
    Ties resolve to the smallest t.
    :return: (t*, value) per row.
    """
    m = family.rows
    if hi <= lo:
        t = np.full(m, float(lo))
        return t, family.at(t)

    ts = np.linspace(lo, hi, grid)
    values = family.on_grid(ts)
    idx = np.argmax(values, axis=1)
    best_t = ts[idx]
    best_v = values[np.arange(m), idx]

    left = ts[np.maximum(idx - 1, 0)]
    right = ts[np.minimum(idx + 1, grid - 1)]
    t_ref, v_ref = golden_section_max(family, left, right, refine_tol)
    better = v_ref > best_v
    best_t = np.where(better, t_ref, best_t)
    best_v = np.where(better, v_ref, best_v)

    kinks = family.breakpoints(lo, hi)
    if kinks is not None and kinks.size:
        base, step = family._block()
        filled = np.where(np.isnan(kinks), lo, kinks)
        den = norm_values(family.norm, base[:, None, :] + filled[:, :, None] * step[:, None, :])
        kv = _safe_ratio(family.offset + np.abs(filled), den)
        kv[np.isnan(kinks)] = -np.inf
        k_idx = np.argmax(kv, axis=1)
        k_best = kv[np.arange(m), k_idx]
        better = k_best > best_v
        best_t = np.where(better, filled[np.arange(m), k_idx], best_t)
        best_v = np.where(better, k_best, best_v)

    return best_t, best_v


def maximize_split(
    family: RatioFamily, lo: float, hi: float, grid: int, refine_tol: float
) -> tuple[Vector, Vector]:
    """
    maximize_on_interval run separately on [lo, 0] and [0, hi] (whichever are nonempty).
    The negative half wins ties, matching the smallest-t tie-break.
    """
    halves = []
    if lo < 0.0:
        halves.append((lo, min(0.0, hi)))
    if hi > 0.0:
        halves.append((max(0.0, lo), hi))
    if not halves:
        halves.append((lo, hi))

    best_t = best_v = None
    for h_lo, h_hi in halves:
        t, v = maximize_on_interval(family, h_lo, h_hi, grid, refine_tol)
        if best_v is None:
            best_t, best_v = t, v
        else:
            better = v > best_v
            best_t = np.where(better, t, best_t)
            best_v = np.where(better, v, best_v)
    return best_t, best_v


def argmax_first(values: Vector) -> int:
    """Index of the first maximal value (deterministic tie-break)."""
    return int(np.argmax(values))


def best_t(
    norm: NormDescriptor, x, y, t_lo: float, t_hi: float, refine_tol: float, grid: int = 512
) -> tuple[float, float]:
    """
    Maximize (1+|t|)/||y + t x|| over [t_lo, t_hi].

    :param norm: Norm descriptor.
    :param x: Unit vector, certified orthogonal to y by the caller.
    :param y: Unit vector.
    :param t_lo: Lower end of the t-range.
    :param t_hi: Upper end (t_lo == t_hi evaluates the single point).
    :param refine_tol: Final golden-section bracket width.
    :param grid: Grid points per sign half-line.
    :return: (t*, value).
    """
    x = as_vector(x, norm.dim)
    y = as_vector(y, norm.dim)
    if t_hi < t_lo:
        raise ValueError(f"Empty t-range [{t_lo}, {t_hi}]")
    family = RatioFamily(norm, y[None, :], x[None, :], 1.0)
    t, v = maximize_split(family, t_lo, t_hi, grid, refine_tol)
    return float(t[0]), float(v[0])


@dataclass(frozen=True)
class PairCandidate:
    """Best (x, y, t) found by a sweep together with its objective value."""
    value: float
    x: Vector
    y: Vector
    t: float


# (x, ys) -> (t per row, objective per row) for one base point and a block of directions.
PairObjective = Callable[[Vector, Vector], tuple[Vector, Vector]]


def half_circle_bases(norm: NormDescriptor, resolution: int, extra: Vector | None = None) -> Vector:
    """
    Base points on the upper half of the unit sphere at angles pi*k/resolution.
    (x, y) and (-x, -y) give identical ratios, so the lower half adds nothing.
    `extra` points (e.g. polygon vertices) are appended after the grid.
    """
    bases = sphere_points(norm, math.pi * np.arange(resolution) / resolution)
    if extra is not None and len(extra):
        bases = np.vstack([bases, extra])
    return bases


def cone_builder(norm: NormDescriptor, resolution: int, tol: float, exact: bool) -> Callable[[Vector], OrthoCone]:
    """Exact facet cones for polyhedral norms when `exact`, the angular sweep otherwise."""
    if exact and norm.is_polyhedral:
        return lambda x: polyhedral_cone(norm, x, tol)
    return lambda x: orthogonal_cone(norm, x, resolution, tol)


def collect_pairs(
    norm: NormDescriptor,
    bases: Vector,
    build_cone: Callable[[Vector], OrthoCone],
    per_arc: int,
    threads: int | None = None,
) -> list[tuple[Vector, Vector]]:
    """
    Orthogonal direction samples for every base point, in base order.
    :return: List of (x, ys) with ys an (m, 2) block of unit directions orthogonal to x.
    """
    throttle = LogThrottler(5.0)
    done = itertools.count(1)
    total = len(bases)

    def directions(x: Vector) -> tuple[Vector, Vector]:
        cone = build_cone(x)
        count = next(done)
        if throttle.should_log():
            logger.info(f"Orthogonal cones: {count}/{total}")
        return cone.base, arc_directions(norm, cone, per_arc)

    return ordered_map(directions, bases, threads)


def best_pair(
    pairs: Sequence[tuple[Vector, Vector]], objective: PairObjective, threads: int | None = None
) -> PairCandidate:
    """
    Maximize `objective` over all sampled pairs.
    Ties keep the earliest base point, then the earliest direction, then the smallest t.
    """
    if not pairs:
        raise ComputationError("No orthogonal pairs to search")

    def best_for(pair: tuple[Vector, Vector]) -> PairCandidate:
        x, ys = pair
        ts, values = objective(x, ys)
        j = argmax_first(values)
        return PairCandidate(float(values[j]), x, ys[j], float(ts[j]))

    best = None
    for candidate in ordered_map(best_for, pairs, threads):
        if best is None or candidate.value > best.value:
            best = candidate
    if not math.isfinite(best.value):
        raise ComputationError(f"Sweep produced a non-finite maximum {best.value}")
    return best


def sample_orthogonal_pairs(
    norm: NormDescriptor, count: int, rng: np.random.Generator, block: int = 256
) -> list[tuple[Vector, Vector]]:
    """
    Random orthogonal unit pairs in any dimension, as (xs, ys) blocks of at most `block` rows.

    x is a random direction on the sphere and y is a random direction projected onto the
    kernel of a supporting functional of x, which makes x orthogonal to y.
    """
    pairs = []
    remaining = count
    while remaining > 0:
        m = min(block, remaining)
        xs = rng.normal(size=(m, norm.dim))
        xs /= norm_values(norm, xs)[:, None]
        fs = np.array([james_supporting_functional(norm, x) for x in xs])
        ys = rng.normal(size=(m, norm.dim))
        ys -= (np.einsum("ij,ij->i", fs, ys) / np.einsum("ij,ij->i", fs, fs))[:, None] * fs
        sizes = norm_values(norm, ys)
        keep = sizes > TOLERANCES.zero_denominator
        pairs.append((xs[keep], ys[keep] / sizes[keep, None]))
        remaining -= int(np.count_nonzero(keep))
    return pairs


def best_sampled_pair(
    pairs: Sequence[tuple[Vector, Vector]], objective: Callable[[Vector, Vector], tuple[Vector, Vector]]
) -> PairCandidate:
    """Like best_pair, but each block holds one base point per row."""
    best = None
    for xs, ys in pairs:
        ts, values = objective(xs, ys)
        j = argmax_first(values)
        if best is None or values[j] > best.value:
            best = PairCandidate(float(values[j]), xs[j], ys[j], float(ts[j]))
    if best is None:
        raise ComputationError("No orthogonal pairs to search")
    return best


class PairSource:
    """
    Orthogonal pairs of one norm, built lazily and shared between searches.

    In the plane: the half-circle grid plus the vertices of a polygonal ball, with
    exact facet cones where available. Elsewhere: seeded Monte-Carlo blocks.
    Orthogonal cones depend only on the base point, so a modulus curve over many
    lambdas builds them once.
    """

    def __init__(self, norm: NormDescriptor, config: SearchConfig, tol: float = TOLERANCES.ortho):
        config.validate()
        self.norm = norm
        self.config = config
        self.tol = tol
        self._pairs: list[tuple[Vector, Vector]] | None = None

    @property
    def sampled(self) -> bool:
        """True when pairs are random blocks (dimension >= 3)."""
        return self.norm.dim != 2

    @property
    def pairs(self) -> list[tuple[Vector, Vector]]:
        if self._pairs is None:
            self._pairs = self._build()
        return self._pairs

    def _build(self) -> list[tuple[Vector, Vector]]:
        norm, config = self.norm, self.config
        if self.sampled:
            return sample_orthogonal_pairs(norm, config.mc_samples, np.random.default_rng(config.seed))
        # Extreme points of polygonal balls join the grid.
        extra = as_polyhedral(norm).vertex_array if has_polyhedral_form(norm) else None
        bases = half_circle_bases(norm, config.theta_resolution, extra)
        cones = cone_builder(norm, config.phi_resolution, self.tol, exact=True)
        return collect_pairs(norm, bases, cones, config.phi_resolution, config.threads)

    def maximize(self, objective):
        if self.sampled:
            return best_sampled_pair(self.pairs, objective)
        return best_pair(self.pairs, objective, self.config.threads)
