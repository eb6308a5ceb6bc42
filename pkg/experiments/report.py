"""Schema-versioned reports and their JSON / CSV emission.

CSV columns per report kind:

    convergence, bell-pair, moe   quantity, flavor, n, trial, observed, limit, abs_err,
                                  within_tolerance, status, seed
    moment-check                  r, flavor, n, trials, mean, stderr, oracle, abs_err, within
    shape-check                   k, q, levels, value, two_level_value, two_level, asserted, passed
    limits, moe-gap               k, p, form, single_bound, pair_bound, violated, margin,
                                  lower_scaled, upper_scaled, minimal_k
    mopn-estimate                 k, n, p, flavor, kind, value, limit, abs_err, converged, seed
    nc-verify                     check, passed, detail
"""

import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import BaseModel, Field

from config import SCHEMA_VERSION, TOOL_VERSION

logger = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "quantity", "flavor", "n", "trial", "observed", "limit", "abs_err", "within_tolerance", "status", "seed",
]
VERDICT_COLUMNS = [
    "k", "p", "form", "single_bound", "pair_bound", "violated", "margin", "lower_scaled", "upper_scaled", "minimal_k",
]
ROW_COLUMNS = {
    "convergence": RECORD_COLUMNS,
    "bell-pair": RECORD_COLUMNS,
    "moe": RECORD_COLUMNS,
    "moment-check": ["r", "flavor", "n", "trials", "mean", "stderr", "oracle", "abs_err", "within"],
    "shape-check": ["k", "q", "levels", "value", "two_level_value", "two_level", "asserted", "passed"],
    "limits": VERDICT_COLUMNS,
    "moe-gap": VERDICT_COLUMNS,
    "mopn-estimate": ["k", "n", "p", "flavor", "kind", "value", "limit", "abs_err", "converged", "seed"],
    "nc-verify": ["check", "passed", "detail"],
}

ENGINEERING_CHOICES = {
    "tolerance_model": "max(c1 * n^-1/2, c2 * n^-2/3); finite-n rates are not known, so bands are chosen, not derived",
    "moe_minimizer": "heuristic: p=1.05 surrogate ascent plus entropy polish, global minimality not certified",
    "mopn_estimator": "alternating dual ascent with restarts, a lower estimate of the true maximum",
}


class Report(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: str
    metadata: dict[str, Any] = Field(default_factory=dict)
    plan: dict[str, Any] | None = None
    seeds: dict[str, Any] = Field(default_factory=dict)
    summary: dict[str, Any] = Field(default_factory=dict)
    rows: list[dict[str, Any]] = Field(default_factory=list)

    @property
    def columns(self) -> list[str]:
        if self.kind in ROW_COLUMNS:
            return ROW_COLUMNS[self.kind]
        return list(self.rows[0]) if self.rows else []

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns)


def build_report(kind: str, rows=(), summary=None, plan=None, seeds=None, engineering: bool = False) -> Report:
    """Report with a fresh timestamp; rows may be dicts or objects with to_dict()."""
    metadata = {
        "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "tool_version": TOOL_VERSION,
    }
    if engineering:
        metadata["engineering_choices"] = dict(ENGINEERING_CHOICES)
    return Report(
        kind=kind,
        metadata=metadata,
        plan=plan,
        seeds=seeds or {},
        summary=summary or {},
        rows=[row.to_dict() if hasattr(row, "to_dict") else dict(row) for row in rows],
    )


def _open(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def emit(report: Report, fmt: str = "json", path=None):
    """Write the report as JSON or CSV to path ('-' or None means stdout)."""
    fmt = fmt.lower()
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown report format {fmt!r}")
    handle, owned = _open(path)
    try:
        if fmt == "json":
            handle.write(report.model_dump_json(indent=2))
            handle.write("\n")
        else:
            report.frame().to_csv(handle, index=False)
    finally:
        if owned:
            handle.close()
    if owned:
        logger.info(f"Wrote {report.kind} report ({len(report.rows)} rows, {fmt}) to {path}")


def read_report(path) -> Report:
    return Report.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
