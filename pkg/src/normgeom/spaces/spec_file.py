"""
Norm-spec JSON files.

    {"type": "euclidean", "dim": 2}
    {"type": "lp", "p": 1.5, "dim": 2}        ("p" also accepts the string "inf")
    {"type": "polyhedral", "vertices": [[1, 1], [-1, 1]]}

Polyhedral vertices are symmetrized and canonicalized on load.
"""
import json
import math
import logging
from pathlib import Path
from typing import Any

from ..errors import NormError, SpecParseError
from .norms import MAX_SWEEP_DIM, NormDescriptor, euclidean, lp
from .polygon import canonicalize_polytope

logger = logging.getLogger(__name__)


def _parse_dim(data: dict[str, Any]) -> int:
    dim = data.get("dim", 2)
    if isinstance(dim, bool) or not isinstance(dim, int):
        raise SpecParseError(f"'dim' must be an integer, got {dim!r}")
    if not 2 <= dim <= MAX_SWEEP_DIM:
        raise SpecParseError(f"'dim' must lie in [2, {MAX_SWEEP_DIM}], got {dim}")
    return dim


def _parse_p(raw: Any) -> float:
    if isinstance(raw, str):
        if raw.strip().lower() in ("inf", "infinity"):
            return math.inf
        raise SpecParseError(f"'p' must be a number or \"inf\", got {raw!r}")
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise SpecParseError(f"'p' must be a number or \"inf\", got {raw!r}")
    return float(raw)


def parse_norm_spec(data: Any) -> NormDescriptor:
    """
    Build a norm descriptor from decoded norm-spec JSON.
    :raises SpecParseError: Unknown type, missing or malformed fields.
    """
    if not isinstance(data, dict):
        raise SpecParseError("Norm spec must be a JSON object")
    kind = data.get("type")
    try:
        match kind:
            case "euclidean":
                return euclidean(_parse_dim(data))
            case "lp":
                if "p" not in data:
                    raise SpecParseError("lp spec needs a 'p' field")
                return lp(_parse_p(data["p"]), _parse_dim(data))
            case "polyhedral":
                vertices = data.get("vertices")
                if not isinstance(vertices, list) or not all(
                    isinstance(v, list) and len(v) == 2 for v in vertices
                ):
                    raise SpecParseError("'vertices' must be a list of [x, y] pairs")
                return canonicalize_polytope(vertices)
            case _:
                raise SpecParseError(f"Unknown norm type {kind!r}")
    except NormError as e:
        raise SpecParseError(f"Invalid norm spec: {e}") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, SpecParseError):
            raise
        raise SpecParseError(f"Invalid norm spec: {e}") from e


def load_norm_spec(path: Path) -> NormDescriptor:
    """
    Read and parse a norm-spec file.
    :raises SpecParseError: Unreadable file, invalid JSON or invalid spec.
    """
    try:
        data = json.loads(Path(path).read_text())
    except (json.JSONDecodeError, OSError) as e:
        raise SpecParseError(f"Error loading norm spec {path}: {e}") from e
    norm = parse_norm_spec(data)
    logger.info(f"Loaded norm spec {path}: {norm.label()}")
    return norm
