import json
import types
import logging
from dataclasses import dataclass, asdict, field, replace
from pathlib import Path
from typing import Any, Union, get_args, get_origin

from .errors import SpecParseError

logger = logging.getLogger(__name__)

TOOL_VERSION = "0.1.0"

# Inner-product-space window endpoints: 3 - 2*sqrt(2) = (sqrt(2) - 1)^2 and sqrt(2) + 1
SQRT2 = 2.0 ** 0.5
IPS_WINDOW_LO = 3.0 - 2.0 * SQRT2
IPS_WINDOW_HI = SQRT2 + 1.0


@dataclass(frozen=True)
class Tolerances:
    """
    Numerical tolerances shared by every module.

    :param ortho: Derivative-bracket tolerance for Birkhoff-James orthogonality.
        * UOM: Norm units per unit of lambda
        * Impact: Larger = more pairs certified orthogonal near kinks.
    :param facet_activity: Relative tolerance for a facet to count as active at x.
        * UOM: Ratio
        * Impact: A facet is active iff f(x) >= ||x|| * (1 - facet_activity).
    :param vertex_merge: Distance below which polygon vertices are merged.
        * UOM: Coordinate units
    :param collinear: Relative cross-product threshold for dropping non-extreme vertices.
        * UOM: Ratio
    :param quotient_k_min: First exponent of the difference-quotient ladder h = 2^-k.
    :param quotient_k_max: Last exponent of the ladder.
        * Impact: Beyond ~40 the quotients are dominated by cancellation.
    :param quotient_width: Ladder stops once the bracket is narrower than this.
    :param cone_bisections: Bisection steps when refining an orthogonal-cone boundary.
    :param arc_collapse: Arcs narrower than this are reported as a single direction.
        * UOM: Radians
    :param arc_sample_floor: Arcs narrower than this are sampled at their midpoint only.
        * UOM: Radians
    :param ips_pass_margin: Slack above sqrt(2) still counted as passing the IPS test.
    :param ips_window_shrink: Amount the open IPS window is shrunk at each end.
    :param zero_denominator: Below this a sum x + y is treated as zero.
    """
    ortho: float = 1e-9
    facet_activity: float = 1e-12
    vertex_merge: float = 1e-12
    collinear: float = 1e-12
    quotient_k_min: int = 10
    quotient_k_max: int = 40
    quotient_width: float = 1e-9
    cone_bisections: int = 60
    arc_collapse: float = 1e-12
    arc_sample_floor: float = 1e-6
    ips_pass_margin: float = 1e-6
    ips_window_shrink: float = 1e-9
    zero_denominator: float = 1e-14


TOLERANCES = Tolerances()


@dataclass(frozen=True)
class SearchConfig:
    """
    Sweep parameters for the rectangular constant and modulus searches.

    :param theta_resolution: Base angular grid for the point x on the unit sphere.
        * UOM: Count
        * Limits: >= 16.
        * Impact: Higher = finer sweep, linear cost.
    :param phi_resolution: Grid for orthogonal directions (per arc) and for the cone sweep.
        * UOM: Count
        * Limits: >= 16.
    :param t_max: Half-width of the truncated t-domain.
        * UOM: Dimensionless
        * Limits: >= 3.
        * Impact: 6 is safe for every norm, since (1+|t|)/(|t|-1) < sqrt(2) once |t| > 5.83.
    :param t_grid: Grid points per sign half-line before golden-section refinement.
        * UOM: Count
        * Limits: >= 16.
    :param refine_tol: Final bracket width of the golden-section refinement.
        * UOM: Dimensionless
        * Limits: (0, 1e-3].
    :param mc_samples: Orthogonal pairs drawn when dimension >= 3.
        * UOM: Count
    :param seed: Seed of the Monte-Carlo sampler.
    :param threads: Worker threads for sweeps (None = machine parallelism).
    """
    theta_resolution: int = 4096
    phi_resolution: int = 512
    t_max: float = 6.0
    t_grid: int = 512
    refine_tol: float = 1e-6
    mc_samples: int = 20000
    seed: int = 0
    threads: int | None = None

    def validate(self) -> "SearchConfig":
        """Raise ValueError if any field is out of range; return self for chaining."""
        for name in ("theta_resolution", "phi_resolution", "t_grid"):
            if getattr(self, name) < 16:
                raise ValueError(f"SearchConfig.{name} must be >= 16, got {getattr(self, name)}")
        if self.t_max < 3.0:
            raise ValueError(f"SearchConfig.t_max must be >= 3, got {self.t_max}")
        if not 0.0 < self.refine_tol <= 1e-3:
            raise ValueError(f"SearchConfig.refine_tol must lie in (0, 1e-3], got {self.refine_tol}")
        if self.mc_samples < 1:
            raise ValueError("SearchConfig.mc_samples must be >= 1")
        if self.threads is not None and self.threads < 1:
            raise ValueError("SearchConfig.threads must be >= 1")
        return self


@dataclass(frozen=True)
class VerifyConfig:
    """
    Parameters of the verification suite.

    :param trials: Random trials per property suite.
        * UOM: Count
    :param polygons: Number of random polygons generated when none is given.
    :param seed: PRNG seed for polygons and property trials.
    :param lambdas: Modulus parameters checked against the bounds.
    :param flatness_trials: Orthogonal pairs sampled per flatness/growth check.
    :param sandwich_tol: Slack on the modulus bounds.
    :param criterion_tol: Tolerance of the "mu = 3 iff segment of length 2" comparisons.
    :param oracle_tol: Allowed gap between exact polyhedral and sweep estimates.
    :param polygon_theta_resolution: Base grid of the modulus and IPS sweeps on polygons.
        * UOM: Count
        * Impact: Polygon vertices are always added to the grid, so a coarse grid stays exact.
    """
    trials: int = 1000
    polygons: int = 20
    seed: int = 7
    lambdas: tuple[float, ...] = (0.5, 1.0, 2.0)
    flatness_trials: int = 200
    sandwich_tol: float = 1e-6
    criterion_tol: float = 1e-6
    oracle_tol: float = 2e-3
    polygon_theta_resolution: int = 256


def _type_name(annotation) -> str:
    return getattr(annotation, "__name__", None) or str(annotation)


def _coerce_field(annotation, value):
    """
    Check a JSON value against a config field annotation.
    Integers are accepted for float fields; bools are rejected everywhere.
    :raises TypeError: value does not fit the annotation.
    """
    origin = get_origin(annotation)
    if origin in (Union, types.UnionType):
        options = get_args(annotation)
        if value is None and type(None) in options:
            return None
        (inner,) = [a for a in options if a is not type(None)]
        return _coerce_field(inner, value)
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise TypeError(value)
        return tuple(_coerce_field(get_args(annotation)[0], v) for v in value)
    if isinstance(value, bool):
        raise TypeError(value)
    if annotation is float and isinstance(value, (int, float)):
        return float(value)
    if annotation is int and isinstance(value, int):
        return value
    raise TypeError(value)


@dataclass
class RunConfig:
    """
    Master configuration: search and verification settings, loadable from JSON.

    :param search: Sweep configuration.
    :param verify: Verification suite configuration.
    :param tol: Orthogonality tolerance used by the ortho command.
    """
    search: SearchConfig = field(default_factory=SearchConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    tol: float = TOLERANCES.ortho

    @staticmethod
    def _filter_keys(dataclass_type, data: dict[str, Any]) -> dict[str, Any]:
        """
        Helper to filter dictionary keys based on dataclass annotations.
        Kept values must match the annotated type; a mismatch raises SpecParseError.
        """
        kept = {}
        for key, value in data.items():
            annotation = dataclass_type.__annotations__.get(key)
            if annotation is None:
                continue
            try:
                kept[key] = _coerce_field(annotation, value)
            except TypeError:
                raise SpecParseError(
                    f"Config field {dataclass_type.__name__}.{key} must be {_type_name(annotation)}, got {value!r}"
                ) from None
        return kept

    @classmethod
    def load(cls, path: Path | None) -> "RunConfig":
        """
        Load configuration from a JSON file, falling back to defaults.
        Unknown keys are ignored; a malformed file raises SpecParseError.
        """
        if path is None:
            return cls()

        try:
            data = json.loads(Path(path).read_text())
        except (json.JSONDecodeError, OSError) as e:
            raise SpecParseError(f"Error loading config {path}: {e}") from e
        if not isinstance(data, dict):
            raise SpecParseError(f"Config {path} must hold a JSON object")

        sections = {}
        for name in ("search", "verify"):
            section = data.pop(name, {})
            if not isinstance(section, dict):
                raise SpecParseError(f"Config section \"{name}\" must be a JSON object, got {section!r}")
            sections[name] = section
        search = SearchConfig(**cls._filter_keys(SearchConfig, sections["search"]))
        verify = VerifyConfig(**cls._filter_keys(VerifyConfig, sections["verify"]))

        root = cls._filter_keys(RunConfig, data)
        config = cls(search=search, verify=verify, **root)

        logger.info(
            f"Loaded Config: theta={search.theta_resolution} phi={search.phi_resolution} "
            f"t_max={search.t_max:.2f} refine_tol={search.refine_tol:.1e} tol={config.tol:.1e}"
        )
        return config

    def with_overrides(self, **search_overrides) -> "RunConfig":
        """Return a copy whose SearchConfig fields are replaced by the non-None overrides."""
        overrides = {k: v for k, v in search_overrides.items() if v is not None}
        if not overrides:
            return self
        return replace(self, search=replace(self.search, **overrides))

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
