"""Per-trial metric rows and their aggregation."""

import csv
import logging
import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from src.metrics.geometry import angular_errors, reprojection, reprojection_residuals
from src.metrics.intrinsics import delta_fg, delta_s, delta_uv
from src.scene import Observations, Scene

if TYPE_CHECKING:
    from src.recovery import CalibrationResult

logger = logging.getLogger(__name__)

METRIC_NAMES = ("delta_fg", "delta_uv", "delta_s", "re", "re_gt", "eps_r", "eps_c")
CSV_COLUMNS = ("seed", "sigma", "solver") + METRIC_NAMES + ("status",)
STATUS_OK = "ok"


@dataclass(frozen=True)
class MetricReport:
    delta_fg: float
    delta_uv: float
    delta_s: float
    re: float
    re_gt: float
    eps_r: float
    eps_c: float
    skipped: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self, seed: int, sigma: float, solver: str, status: str = STATUS_OK) -> dict:
        row = {"seed": seed, "sigma": sigma, "solver": solver, "status": status}
        row.update({name: getattr(self, name) for name in METRIC_NAMES})
        return row


def failure_row(seed: int, sigma: float, solver: str, status: str) -> dict:
    row = {"seed": seed, "sigma": sigma, "solver": solver, "status": status}
    row.update({name: math.nan for name in METRIC_NAMES})
    return row


def evaluate(est: "CalibrationResult", obs: Observations, gt_scene: Scene) -> MetricReport:
    """Every metric of one estimate against its ground-truth scene."""
    gt = gt_scene.intrinsics
    eps_r, eps_c = angular_errors(est, gt_scene)
    _, valid = reprojection_residuals(est, obs)
    return MetricReport(
        delta_fg=delta_fg(est.intrinsics, gt),
        delta_uv=delta_uv(est.intrinsics, gt),
        delta_s=delta_s(est.intrinsics, gt),
        re=reprojection(est, obs),
        re_gt=reprojection(est, obs, gt_scene),
        eps_r=eps_r,
        eps_c=eps_c,
        skipped=int(np.sum(~valid)),
    )


def _float(value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        return math.nan


def summarize(rows: list[dict]) -> list[dict]:
    """Mean, median and quartiles of every metric per (solver, sigma), plus failure rate."""
    groups: dict[tuple[str, float], list[dict]] = defaultdict(list)
    for row in rows:
        groups[(str(row["solver"]), _float(row["sigma"]))].append(row)

    summary = []
    for (solver, sigma), members in sorted(groups.items()):
        ok = [r for r in members if r.get("status") == STATUS_OK]
        out = {
            "solver": solver,
            "sigma": sigma,
            "trials": len(members),
            "failure_rate": 1.0 - len(ok) / len(members),
        }
        for name in METRIC_NAMES:
            values = np.array([_float(r[name]) for r in ok])
            values = values[np.isfinite(values)]
            if values.size:
                q1, median, q3 = np.percentile(values, [25, 50, 75])
                mean = float(np.mean(values))
            else:
                q1 = median = q3 = mean = math.nan
            out.update(
                {
                    f"{name}_mean": mean,
                    f"{name}_median": float(median),
                    f"{name}_q1": float(q1),
                    f"{name}_q3": float(q3),
                }
            )
        summary.append(out)
    logger.info(f"Summarized {len(rows)} trials into {len(summary)} groups")
    return summary


def summary_columns() -> list[str]:
    columns = ["solver", "sigma", "trials", "failure_rate"]
    for name in METRIC_NAMES:
        columns += [f"{name}_mean", f"{name}_median", f"{name}_q1", f"{name}_q3"]
    return columns


def write_rows(path: Path, rows: list[dict], columns) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(columns))
        writer.writeheader()
        writer.writerows(rows)
    return path


def read_rows(path: Path) -> list[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
