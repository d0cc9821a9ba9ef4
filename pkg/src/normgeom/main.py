import sys
import time
import logging
import argparse
import traceback
from dataclasses import replace
from pathlib import Path

from .config import TOOL_VERSION, RunConfig
from .constants.modulus import modulus_curve
from .constants.rectangular import mu_estimate, mu_polyhedral_exact
from .errors import ComputationError, NormError, PreconditionError, SpecParseError
from .orthogonality.birkhoff import is_bj_orthogonal
from .report import RunReport, write_curve_csv
from .spaces.norms import NormDescriptor, as_vector
from .spaces.polygon import as_polyhedral, has_polyhedral_form
from .spaces.spec_file import load_norm_spec
from .sphere.ips import ips_test
from .sphere.segments import max_segment_length, rotundity_gap, segment_lower_bound
from .utils import get_captured_logs, setup_logging
from .verification import Verifier, default_norm_set

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_COMPUTATION = 3
EXIT_VIOLATION = 4

COMMANDS = ("mu", "modulus", "ortho", "segments", "ips", "verify")


def _float_list(text: str) -> list[float]:
    """Comma separated reals; an empty string gives an empty list."""
    text = text.strip()
    if not text:
        return []
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normgeom", description="Geometric constants of real normed spaces")
    parser.add_argument("command", choices=COMMANDS, help="Computation to run")
    parser.add_argument("--norm", type=Path, default=None, help="Norm-spec JSON file")
    parser.add_argument("--config", type=Path, default=None, help="JSON configuration file")
    parser.add_argument("--out", type=Path, default=None, help="Report path (default: stdout)")
    parser.add_argument("--csv", type=Path, default=None, help="Modulus curve CSV path")
    parser.add_argument("--lambda-grid", type=_float_list, default=None, help="Modulus parameters, e.g. 0.5,1,2")
    parser.add_argument("--x", type=_float_list, default=None, help="First vector for ortho, e.g. 1,1")
    parser.add_argument("--y", type=_float_list, default=None, help="Second vector for ortho")
    # Search overrides; None keeps the value from --config (or the default).
    parser.add_argument("--theta-res", type=int, default=None, help="Base angular grid (default 4096)")
    parser.add_argument("--phi-res", type=int, default=None, help="Orthogonal direction grid (default 512)")
    parser.add_argument("--t-max", type=float, default=None, help="Half-width of the t-domain (default 6)")
    parser.add_argument("--refine-tol", type=float, default=None, help="Golden-section tolerance (default 1e-6)")
    parser.add_argument("--tol", type=float, default=None, help="Orthogonality tolerance (default 1e-9)")
    parser.add_argument("--threads", type=int, default=None, help="Sweep worker threads (default: all cores)")
    parser.add_argument("--seed", type=int, default=None, help="PRNG seed")
    parser.add_argument("--random-polygons", type=int, default=None, help="Random polygons checked by verify")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.load(args.config)
    config = config.with_overrides(
        theta_resolution=args.theta_res,
        phi_resolution=args.phi_res,
        t_max=args.t_max,
        refine_tol=args.refine_tol,
        threads=args.threads,
        seed=args.seed,
    )
    if args.tol is not None:
        config = replace(config, tol=args.tol)
    if args.seed is not None or args.random_polygons is not None:
        verify = config.verify
        if args.seed is not None:
            verify = replace(verify, seed=args.seed)
        if args.random_polygons is not None:
            verify = replace(verify, polygons=args.random_polygons)
        config = replace(config, verify=verify)
    config.search.validate()
    return config


def _require_norm(args: argparse.Namespace) -> NormDescriptor:
    if args.norm is None:
        raise SpecParseError(f"'{args.command}' needs --norm")
    return load_norm_spec(args.norm)


# Commands. Each returns (norm echo, result, exit code).

def cmd_mu(args: argparse.Namespace, config: RunConfig):
    norm = _require_norm(args)
    if has_polyhedral_form(norm):
        witness = mu_polyhedral_exact(as_polyhedral(norm), config.search, config.tol)
        method = "exact-polyhedral"
    else:
        witness = mu_estimate(norm, config.search, config.tol)
        method = "sweep" if norm.dim == 2 else "monte-carlo"
    result = {"value": witness.value, "method": method, "witness": witness.to_dict()}
    return norm.to_dict(), result, EXIT_OK


def cmd_modulus(args: argparse.Namespace, config: RunConfig):
    norm = _require_norm(args)
    lambdas = args.lambda_grid if args.lambda_grid is not None else list(config.verify.lambdas)
    space = as_polyhedral(norm) if has_polyhedral_form(norm) else norm
    curve = modulus_curve(space, lambdas, config.search)
    if args.csv is not None:
        write_curve_csv(curve, args.csv)
    code = EXIT_COMPUTATION if curve.failures else EXIT_OK
    return norm.to_dict(), curve.to_dict(), code


def cmd_ortho(args: argparse.Namespace, config: RunConfig):
    norm = _require_norm(args)
    if args.x is None or args.y is None:
        raise SpecParseError("'ortho' needs --x and --y")
    x = as_vector(args.x, norm.dim)
    y = as_vector(args.y, norm.dim)
    verdict, cert = is_bj_orthogonal(norm, x, y, config.tol)
    result = {"x": x.tolist(), "y": y.tolist(), "orthogonal": verdict, "certificate": cert.to_dict()}
    return norm.to_dict(), result, EXIT_OK


def cmd_segments(args: argparse.Namespace, config: RunConfig):
    norm = _require_norm(args)
    segment = max_segment_length(norm)
    gap = rotundity_gap(norm, config.search)
    result = {
        "segment": segment.to_dict(),
        "mu_lower_bound": segment_lower_bound(norm),
        "rotundity": gap.to_dict(),
    }
    return norm.to_dict(), result, EXIT_OK


def cmd_ips(args: argparse.Namespace, config: RunConfig):
    norm = _require_norm(args)
    space = as_polyhedral(norm) if has_polyhedral_form(norm) else norm
    report = ips_test(space, config.search, config.tol)
    return norm.to_dict(), report.to_dict(), EXIT_OK


def cmd_verify(args: argparse.Namespace, config: RunConfig):
    if args.norm is not None:
        norms = [load_norm_spec(args.norm)]
    else:
        norms = default_norm_set(config.verify.polygons, config.verify.seed)
    report = Verifier(config).run(norms)
    code = EXIT_OK if report.passed else EXIT_VIOLATION
    return [n.to_dict() for n in norms], report.to_dict(), code


HANDLERS = {
    "mu": cmd_mu,
    "modulus": cmd_modulus,
    "ortho": cmd_ortho,
    "segments": cmd_segments,
    "ips": cmd_ips,
    "verify": cmd_verify,
}


def run(argv: list[str] | None = None) -> int:
    """
    Parse `argv`, run one command and write its report.
    :return: Exit code (0 success, 2 parse error, 3 computation error, 4 invariant violation).
    """
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    setup_logging(level)

    try:
        config = resolve_config(args)
        started = time.perf_counter()
        norm, result, code = HANDLERS[args.command](args, config)
        elapsed = time.perf_counter() - started
    except SpecParseError as e:
        logger.error(f"Parse error: {e}")
        return EXIT_PARSE
    except (NormError, PreconditionError, ComputationError, ValueError) as e:
        # NormError and PreconditionError subclass ValueError; config.validate raises plain ValueError.
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_COMPUTATION

    report = RunReport(args.command, norm, config.to_dict(), result, elapsed, TOOL_VERSION)
    report.write(args.out)
    if code == EXIT_VIOLATION:
        logger.error("Invariant violations found; see the report's invariants section")
    return code


def main() -> None:
    """Entry point for the normgeom command."""
    try:
        code = run()
    except Exception:
        # Unexpected failure: dump traceback and recent logs before giving up.
        print("\n!!! CRASH DETECTED !!!", file=sys.stderr)
        print(traceback.format_exc(), file=sys.stderr)
        print("Recent logs:\n" + get_captured_logs(), file=sys.stderr)
        raise
    sys.exit(code)


if __name__ == "__main__":
    main()
