"""
Property suites run by `normgeom verify`.

Every check_* method appends one Finding per (invariant, norm). A finding fails with
the first counterexample in its detail; the run fails iff any finding does.
"""
import math
import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np

from .config import IPS_WINDOW_HI, IPS_WINDOW_LO, SQRT2, RunConfig
from .constants.modulus import modulus, modulus_direct
from .constants.rectangular import MU_LOWER, MU_UPPER, MuWitness, mu_estimate, mu_pair, mu_polyhedral_exact, mu_ratio
from .constants.search import PairSource, sample_orthogonal_pairs
from .enums import NormKind, OrthoMethod
from .errors import ComputationError, NormError, PreconditionError
from .orthogonality.birkhoff import is_bj_orthogonal, james_orthogonal, one_sided_derivatives
from .orthogonality.cone import polyhedral_cone, random_orthogonal_pairs
from .spaces.norms import NormDescriptor, Vector, norm_values, validate_norm
from .spaces.polygon import as_polyhedral, diamond, edge_point, has_polyhedral_form, random_polygons, regular_polygon, square
from .sphere.ips import ips_test
from .sphere.segments import flatness_growth_check, max_segment_length, segment_orthogonality_check, sphere_edges
from .utils import get_captured_logs

logger = logging.getLogger(__name__)

Pair = tuple[Vector, Vector]


@dataclass(frozen=True)
class Finding:
    """Outcome of one invariant on one norm."""
    invariant: str
    norm: str
    passed: bool
    checked: int
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "invariant": self.invariant,
            "norm": self.norm,
            "passed": self.passed,
            "checked": self.checked,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.findings)

    def failures(self) -> list[Finding]:
        return [f for f in self.findings if not f.passed]

    def by_invariant(self) -> dict[str, dict]:
        summary: dict[str, dict] = {}
        for f in self.findings:
            entry = summary.setdefault(f.invariant, {"status": "consistent", "checked": 0, "norms": 0, "failures": []})
            entry["checked"] += f.checked
            entry["norms"] += 1
            if not f.passed:
                entry["status"] = "violated"
                entry["failures"].append(f"{f.norm}: {f.detail}")
        return summary

    def to_dict(self) -> dict:
        data = {
            "passed": self.passed,
            "invariants": self.by_invariant(),
            "findings": [f.to_dict() for f in self.findings],
        }
        if not self.passed:
            data["log_tail"] = get_captured_logs()
        return data


def default_norm_set(count: int, seed: int) -> list[NormDescriptor]:
    """`count` seeded random polygons plus the square, the diamond and the regular hexagon."""
    return random_polygons(count, seed) + [square(), diamond(), regular_polygon(6)]


class Verifier:
    """
    Runs every property suite against a list of norms.

    :param config: Search settings for the sweeps and VerifyConfig for trial counts,
        seeds and tolerances.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.search = config.search
        self.verify = config.verify
        self.tol = config.tol
        self.report = VerificationReport()

    def _record(self, invariant: str, norm: NormDescriptor, checked: int, failure: str | None) -> None:
        finding = Finding(invariant, norm.label(), failure is None, checked, failure or "")
        if failure:
            logger.error(f"[{invariant}] {norm.label()}: {failure}")
        else:
            logger.debug(f"[{invariant}] {norm.label()}: consistent over {checked}")
        self.report.findings.append(finding)

    def _run_cases(
        self, invariant: str, norm: NormDescriptor, cases: list, check: Callable[[object], str | None]
    ) -> None:
        """Apply `check` to every case; the first non-None message fails the finding."""
        failure = None
        for case in cases:
            try:
                failure = check(case)
            except (NormError, ComputationError, PreconditionError) as e:
                failure = f"{type(e).__name__}: {e}"
            if failure:
                break
        self._record(invariant, norm, len(cases), failure)

    def _pairs(self, norm: NormDescriptor, count: int, rng: np.random.Generator) -> list[Pair]:
        if norm.dim == 2:
            return random_orthogonal_pairs(norm, count, rng, self.tol)
        blocks = sample_orthogonal_pairs(norm, count, rng)
        return [(x, y) for xs, ys in blocks for x, y in zip(xs, ys)]

    # Orthogonality properties

    def check_norm_axioms(self, norm: NormDescriptor) -> None:
        result = validate_norm(norm, self.verify.trials, self.verify.seed)
        self._record("norm-axioms", norm, result.samples, result.violations[0] if result.violations else None)

    def check_bj_homogeneity(self, norm: NormDescriptor, pairs: list[Pair], rng: np.random.Generator) -> None:
        scales = rng.uniform(0.1, 10.0, size=(len(pairs), 2)) * rng.choice([-1.0, 1.0], size=(len(pairs), 2))

        def check(i: int) -> str | None:
            x, y = pairs[i]
            a, b = scales[i]
            verdict, cert = is_bj_orthogonal(norm, a * x, b * y, self.tol)
            if not verdict:
                return f"x={x.tolist()} y={y.tolist()} a={a:g} b={b:g}: {cert.to_dict()}"
            return None

        self._run_cases("bj-homogeneity", norm, list(range(len(pairs))), check)

    def check_inner_product(self, norm: NormDescriptor, rng: np.random.Generator) -> None:
        """Euclidean orthogonality agrees with x . y = 0."""
        xs = rng.normal(size=(self.verify.trials, norm.dim))
        ys = rng.normal(size=(self.verify.trials, norm.dim))
        # Half of the samples are projected to be exactly perpendicular.
        half = self.verify.trials // 2
        head_x, head_y = xs[:half], ys[:half]
        head_y -= (np.einsum("ij,ij->i", head_x, head_y) / np.einsum("ij,ij->i", head_x, head_x))[:, None] * head_x
        # Unit y: the verdict scales with ||y||, the criterion below with ||x|| ||y||.
        ys /= np.linalg.norm(ys, axis=1)[:, None]

        def check(i: int) -> str | None:
            x, y = xs[i], ys[i]
            expected = abs(float(x @ y)) <= self.tol * float(np.linalg.norm(x)) * float(np.linalg.norm(y))
            verdict, _ = is_bj_orthogonal(norm, x, y, self.tol)
            if verdict != expected:
                return f"x={x.tolist()} y={y.tolist()}: verdict {verdict}, x.y = {float(x @ y):.3e}"
            return None

        self._run_cases("euclidean-inner-product", norm, list(range(self.verify.trials)), check)

    def check_monotonicity(self, norm: NormDescriptor, pairs: list[Pair], rng: np.random.Generator) -> None:
        """For x orthogonal to y, ||x + lam*y|| grows with |lam| on each side of 0."""
        lams = np.sort(rng.uniform(0.0, 5.0, size=(len(pairs), 2)), axis=1)

        def check(i: int) -> str | None:
            x, y = pairs[i]
            small, large = lams[i]
            for sign in (1.0, -1.0):
                near = float(norm_values(norm, x + sign * small * y))
                far = float(norm_values(norm, x + sign * large * y))
                if far < near - 1e-9 * (1.0 + large):
                    return f"x={x.tolist()} y={y.tolist()}: ||x+{sign * large:g}y||={far} < ||x+{sign * small:g}y||={near}"
            return None

        self._run_cases("orthogonal-monotonicity", norm, list(range(len(pairs))), check)

    def check_derivative_agreement(self, norm: NormDescriptor, rng: np.random.Generator) -> None:
        """
        Difference-quotient ladder vs the exact derivative formulas. On polygon balls the
        exact pair must also sit inside the quotient bracket, and a third of the bases are
        vertices (kinks) and another third edge points.
        """
        trials = self.verify.trials
        xs = rng.normal(size=(trials, norm.dim))
        ys = rng.normal(size=(trials, norm.dim))
        polygonal = norm.dim == 2 and has_polyhedral_form(norm)
        if polygonal:
            polygon = as_polyhedral(norm)
            count = len(polygon.vertices)
            third = trials // 3
            xs[:third] = polygon.vertex_array[rng.integers(count, size=third)]
            edges = rng.integers(count, size=third)
            t = rng.uniform(0.05, 0.95, size=(third, 1))
            verts = polygon.vertex_array
            xs[third:2 * third] = t * verts[edges] + (1.0 - t) * verts[(edges + 1) % count]

        def check(i: int) -> str | None:
            exact = one_sided_derivatives(norm, xs[i], ys[i])
            ladder = one_sided_derivatives(norm, xs[i], ys[i], OrthoMethod.BRACKETED_QUOTIENT)
            where = f"x={xs[i].tolist()} y={ys[i].tolist()}"
            if max(abs(exact[0] - ladder[0]), abs(exact[1] - ladder[1])) > self.verify.criterion_tol:
                return f"{where}: exact {exact} vs quotient {ladder}"
            if polygonal and not (ladder[0] <= exact[0] + self.tol and exact[1] <= ladder[1] + self.tol):
                return f"{where}: exact {exact} outside the quotient bracket {ladder}"
            return None

        self._run_cases("derivative-agreement", norm, list(range(trials)), check)

    def check_james_agreement(self, norm: NormDescriptor, pairs: list[Pair], rng: np.random.Generator) -> None:
        """Facet criterion vs derivative criterion, on certified and on random pairs."""
        polygon = as_polyhedral(norm)
        randoms = [(rng.normal(size=2), rng.normal(size=2)) for _ in range(len(pairs))]

        def check(pair: Pair) -> str | None:
            x, y = pair
            facet = james_orthogonal(polygon, x, y, self.tol)
            derivative = is_bj_orthogonal(polygon, x, y, self.tol)[0]
            if facet != derivative:
                return f"x={x.tolist()} y={y.tolist()}: facet criterion {facet}, derivatives {derivative}"
            return None

        self._run_cases("james-criterion", norm, pairs + randoms, check)

    def check_segment_orthogonality(self, norm: NormDescriptor) -> None:
        """u is orthogonal to v - u along every sphere edge, in both orientations."""
        polygon = as_polyhedral(norm)
        cases = [(e.u, e.v) for e in sphere_edges(polygon)] + [(e.v, e.u) for e in sphere_edges(polygon)]

        def check(case: Pair) -> str | None:
            u, v = case
            verdict, cert = segment_orthogonality_check(polygon, u, v, self.tol)
            return None if verdict else f"u={u.tolist()} v={v.tolist()}: {cert.to_dict()}"

        self._run_cases("segment-orthogonality", norm, cases, check)

    def check_edge_inheritance(self, norm: NormDescriptor, rng: np.random.Generator) -> None:
        """x inside an edge [x1, x2] and x orthogonal to y imply x1 and x2 orthogonal to y."""
        polygon = as_polyhedral(norm)
        count = len(polygon.vertices)
        picks = [(int(rng.integers(count)), float(rng.uniform(0.05, 0.95))) for _ in range(self.verify.trials)]

        def check(case: tuple[int, float]) -> str | None:
            index, t = case
            x = edge_point(polygon, index, t)
            cone = polyhedral_cone(polygon, x, self.tol)
            lo, hi = cone.arcs[int(rng.integers(len(cone.arcs)))]
            phi = rng.uniform(lo, hi) if hi > lo else lo
            y = np.array([math.cos(phi), math.sin(phi)])
            for end in (polygon.vertex_array[index], polygon.vertex_array[(index + 1) % count]):
                if not is_bj_orthogonal(polygon, end, y, self.tol)[0]:
                    return f"x={x.tolist()} y={y.tolist()}: endpoint {end.tolist()} not orthogonal to y"
            return None

        self._run_cases("edge-inheritance", norm, picks, check)

    # Rectangular constant

    def mu_witness(self, norm: NormDescriptor) -> tuple[NormDescriptor, MuWitness]:
        """Exact polyhedral witness when the ball is a polygon, sweep witness otherwise."""
        if has_polyhedral_form(norm):
            polygon = as_polyhedral(norm)
            return polygon, mu_polyhedral_exact(polygon, self.search, self.tol)
        return norm, mu_estimate(norm, self.search, self.tol)

    def check_mu_bounds(self, norm: NormDescriptor, space: NormDescriptor, witness: MuWitness) -> None:
        failure = None
        lower = MU_LOWER - 1e-9
        if norm.dim != 2:
            # Monte-Carlo values are lower estimates; only the upper bound is binding.
            lower = -math.inf
        if not lower <= witness.value <= MU_UPPER + 1e-9:
            failure = f"mu = {witness.value:.12f} outside [sqrt(2), 3]"
        self._record("mu-bounds", norm, 1, failure)

        failure = None
        recomputed = witness.evaluate(space)
        if abs(recomputed - witness.value) > 1e-12:
            failure = f"witness re-evaluates to {recomputed!r}, reported {witness.value!r}"
        elif not is_bj_orthogonal(space, witness.x, witness.y, self.tol)[0]:
            failure = f"witness pair {witness.x.tolist()}, {witness.y.tolist()} is not orthogonal"
        self._record("witness-consistency", norm, 1, failure)

    def check_oracle_equivalence(self, norm: NormDescriptor, exact: MuWitness) -> float:
        estimate = mu_estimate(norm, self.search, self.tol)
        failure = None
        if abs(exact.value - estimate.value) > self.verify.oracle_tol:
            failure = f"exact {exact.value:.9f} vs sweep {estimate.value:.9f}"
        elif estimate.value > exact.value + 1e-9:
            failure = f"sweep {estimate.value:.12f} exceeds exact {exact.value:.12f}"
        self._record("oracle-equivalence", norm, 1, failure)
        return estimate.value

    def check_sup_form(self, norm: NormDescriptor, pairs: list[Pair], rng: np.random.Generator) -> None:
        """mu_pair(t*x, y) equals mu_ratio(x, y, t) for t != 0."""
        ts = rng.uniform(0.05, 6.0, size=len(pairs)) * rng.choice([-1.0, 1.0], size=len(pairs))

        def check(i: int) -> str | None:
            x, y = pairs[i]
            a = mu_pair(norm, ts[i] * x, y)
            b = mu_ratio(norm, x, y, float(ts[i]))
            return None if abs(a - b) <= 1e-12 else f"t={ts[i]:g}: mu_pair {a!r} vs mu_ratio {b!r}"

        self._run_cases("sup-form", norm, list(range(len(pairs))), check)

    def check_truncation(self, norm: NormDescriptor, pairs: list[Pair], mu_value: float) -> None:
        """Large |t| can never beat max(2, mu): the t-domain cut at t_max loses nothing."""
        ceiling = max(2.0, mu_value)

        def check(pair: Pair) -> str | None:
            x, y = pair
            for t in (6.5, 10.0, 100.0, -6.5, -10.0, -100.0):
                r = mu_ratio(norm, x, y, t)
                if not r < ceiling:
                    return f"x={x.tolist()} y={y.tolist()} t={t:g}: ratio {r:.9f} >= {ceiling:.9f}"
            return None

        self._run_cases("truncation", norm, pairs, check)

    # Modulus

    def pair_source(self, norm: NormDescriptor) -> PairSource:
        search = self.search
        if has_polyhedral_form(norm):
            search = replace(search, theta_resolution=self.verify.polygon_theta_resolution)
        return PairSource(norm, search, self.tol)

    def check_modulus(self, norm: NormDescriptor, source: PairSource) -> dict[float, float]:
        """Bound sandwich and two-term definition for every lambda; returns mu* per lambda."""
        stars = {}
        failures = []
        for lam in self.verify.lambdas:
            try:
                point = modulus(norm, lam, source.config, source)
                direct = modulus_direct(norm, lam, source.config, source)
            except (ComputationError, PreconditionError, NormError) as e:
                failures.append(f"lambda={lam}: {type(e).__name__}: {e}")
                continue
            stars[lam] = point.star_value
            lower = point.lower_bound - self.verify.sandwich_tol
            if source.sampled:
                lower = -math.inf
            if not lower <= point.value <= point.upper_bound + self.verify.sandwich_tol:
                failures.append(
                    f"lambda={lam}: mu_X = {point.value:.9f} outside [{point.lower_bound:.9f}, {point.upper_bound:.9f}]"
                )
            if abs(direct - point.value) > self.verify.sandwich_tol:
                failures.append(f"lambda={lam}: max identity {point.value:.12f} vs definition {direct:.12f}")
        self._record("modulus-sandwich", norm, len(self.verify.lambdas), failures[0] if failures else None)
        return stars

    # Sphere geometry

    def check_segment_criteria(self, norm: NormDescriptor, mu_value: float, stars: dict[float, float]) -> float:
        segment = max_segment_length(norm).length
        tol = self.verify.criterion_tol
        flat = abs(segment - 2.0) <= tol

        failure = None
        if (abs(mu_value - 3.0) <= tol) != flat:
            failure = f"mu = {mu_value:.12f} but longest segment = {segment:.12f}"
        self._record("segment-criterion", norm, 1, failure)

        failure = None
        for lam, star in stars.items():
            if (abs(star - (lam + 2.0)) <= tol) != flat:
                failure = f"mu*({lam:g}) = {star:.12f} but longest segment = {segment:.12f}"
                break
        self._record("modulus-criterion", norm, len(stars), failure)

        failure = None
        if mu_value < 1.0 + segment - 1e-9:
            failure = f"mu = {mu_value:.12f} below 1 + segment = {1.0 + segment:.12f}"
        self._record("segment-lower-bound", norm, 1, failure)
        return segment

    def check_ips(self, norm: NormDescriptor, source: PairSource, mu_value: float) -> None:
        report = ips_test(norm, source.config, self.tol, source)
        failure = None
        euclidean = norm.kind is NormKind.EUCLIDEAN or (norm.kind is NormKind.LP and norm.p == 2.0)
        if euclidean and not report.passed:
            failure = f"Euclidean space failed with sup {report.sup_found:.12f}"
        elif has_polyhedral_form(norm) and mu_value > SQRT2 + 0.01 and report.passed:
            failure = f"mu = {mu_value:.9f} > sqrt(2) but the test passed (sup {report.sup_found:.12f})"
        self._record("ips-consistency", norm, 1, failure)

    def check_flatness(self, norm: NormDescriptor, segment: float) -> None:
        """With every segment shorter than l, no orthogonal sample may fail to grow."""
        l = max(segment + 0.01, 1.0)
        report = flatness_growth_check(norm, l, self.verify.flatness_trials, self.verify.seed, self.tol)
        failure = None
        if report.growth_violation:
            failure = f"l={l:g}: {report.counterexample}"
        self._record("flatness-growth", norm, report.samples, failure)

    def check_window_constants(self) -> None:
        failure = None
        if abs(IPS_WINDOW_LO - (SQRT2 - 1.0) ** 2) > 4 * np.finfo(float).eps:
            failure = f"3 - 2*sqrt(2) = {IPS_WINDOW_LO!r} differs from (sqrt(2) - 1)^2"
        elif abs(IPS_WINDOW_HI * (SQRT2 - 1.0) - 1.0) > 4 * np.finfo(float).eps:
            failure = f"(sqrt(2) + 1)(sqrt(2) - 1) = {IPS_WINDOW_HI * (SQRT2 - 1.0)!r}"
        self.report.findings.append(Finding("window-constants", "-", failure is None, 1, failure or ""))

    # Driver

    def verify_norm(self, norm: NormDescriptor, index: int = 0) -> None:
        logger.info(f"Verifying {norm.label()}")
        rng = np.random.default_rng([self.verify.seed, index])
        pairs = self._pairs(norm, self.verify.trials, rng)
        short_pairs = pairs[:200]

        self.check_norm_axioms(norm)
        self.check_bj_homogeneity(norm, pairs, rng)
        self.check_monotonicity(norm, pairs, rng)
        self.check_derivative_agreement(norm, rng)
        if norm.kind is NormKind.EUCLIDEAN:
            self.check_inner_product(norm, rng)

        polygonal = norm.dim == 2 and has_polyhedral_form(norm)
        if polygonal:
            self.check_james_agreement(norm, short_pairs, rng)
            self.check_segment_orthogonality(norm)
            self.check_edge_inheritance(norm, rng)

        try:
            space, witness = self.mu_witness(norm)
        except (ComputationError, NormError) as e:
            self._record("mu-bounds", norm, 1, f"{type(e).__name__}: {e}")
            return
        self.check_mu_bounds(norm, space, witness)
        self.check_sup_form(norm, short_pairs, rng)
        self.check_truncation(norm, short_pairs, witness.value)
        if polygonal:
            self.check_oracle_equivalence(norm, witness)

        source = self.pair_source(norm)
        stars = self.check_modulus(norm, source)

        if norm.dim == 2:
            segment = self.check_segment_criteria(norm, witness.value, stars)
            self.check_ips(norm, source, witness.value)
            self.check_flatness(norm, segment)

    def run(self, norms: list[NormDescriptor]) -> VerificationReport:
        self.check_window_constants()
        for index, norm in enumerate(norms):
            self.verify_norm(norm, index)
        failed = len(self.report.failures())
        logger.info(f"Verification finished: {len(self.report.findings)} findings, {failed} violations")
        return self.report
