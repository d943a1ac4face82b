from .intrinsics import delta_fg, delta_s, delta_uv
from .geometry import (
    angular_errors,
    project_points,
    reprojection,
    reprojection_residuals,
    rotation_angle,
    triangulate,
)
from .report import (
    CSV_COLUMNS,
    METRIC_NAMES,
    STATUS_OK,
    MetricReport,
    evaluate,
    failure_row,
    read_rows,
    summarize,
    summary_columns,
    write_rows,
)

__all__ = [
    "delta_fg",
    "delta_s",
    "delta_uv",
    "angular_errors",
    "project_points",
    "reprojection",
    "reprojection_residuals",
    "rotation_angle",
    "triangulate",
    "CSV_COLUMNS",
    "METRIC_NAMES",
    "STATUS_OK",
    "MetricReport",
    "evaluate",
    "failure_row",
    "read_rows",
    "summarize",
    "summary_columns",
    "write_rows",
]
