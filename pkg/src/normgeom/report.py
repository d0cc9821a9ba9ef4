"""
JSON run reports and CSV modulus curves.
"""
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .config import TOOL_VERSION
from .constants.modulus import ModulusCurve

logger = logging.getLogger(__name__)

CURVE_COLUMNS = (
    "lambda",
    "star_value",
    "value",
    "witness_x1",
    "witness_x2",
    "witness_y1",
    "witness_y2",
    "witness_t",
)


@dataclass(frozen=True)
class RunReport:
    """
    Everything needed to reproduce one CLI run.

    :param command: Subcommand name.
    :param norm: Echoed norm descriptor (or a list of them for verify).
    :param config: Echoed configuration.
    :param result: Serialized result object.
    :param elapsed_s: Wall time in seconds.
    :param tool_version: normgeom version.
    """
    command: str
    norm: Any
    config: dict
    result: Any
    elapsed_s: float
    tool_version: str = TOOL_VERSION

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "norm": self.norm,
            "config": self.config,
            "result": self.result,
            "elapsed_s": self.elapsed_s,
            "tool_version": self.tool_version,
        }

    def to_json(self) -> str:
        # json writes floats with repr, which round-trips exactly.
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        return cls(**data)

    def write(self, out: Path | None = None) -> None:
        """Write the report to `out`, or to stdout when no path is given."""
        text = self.to_json() + "\n"
        if out is None:
            sys.stdout.write(text)
            return
        Path(out).write_text(text)
        logger.info(f"Report written to {out}")


def _fmt(value: float | None) -> str:
    return "" if value is None else format(value, ".17g")


def curve_rows(curve: ModulusCurve) -> list[list[str]]:
    rows = []
    for point in curve:
        w = point.witness
        rows.append([
            _fmt(point.lam),
            _fmt(point.star_value),
            _fmt(point.value),
            _fmt(float(w.x[0])),
            _fmt(float(w.x[1])),
            _fmt(float(w.y[0])),
            _fmt(float(w.y[1])),
            _fmt(w.t),
        ])
    return rows


def curve_csv(curve: ModulusCurve) -> str:
    """CSV text: header row, then one row per point with 17 significant digits."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    writer.writerows(curve_rows(curve))
    return buffer.getvalue()


def write_curve_csv(curve: ModulusCurve, path: Path) -> None:
    Path(path).write_text(curve_csv(curve))
    logger.info(f"Curve with {len(curve)} rows written to {path}")
