"""Python bindings for the selective tile processing simulator."""

from ._core import (
    Box,
    Report,
    ReportError,
    Scenario,
    ScenarioError,
    cli,
    compare,
    generate_scenario,
    iou,
    load_report,
    load_scenario,
    match,
    run,
    scenario_from_text,
    tile_grid,
)

__all__ = [
    "Box",
    "Report",
    "ReportError",
    "Scenario",
    "ScenarioError",
    "cli",
    "compare",
    "generate_scenario",
    "iou",
    "load_report",
    "load_scenario",
    "match",
    "run",
    "scenario_from_text",
    "tile_grid",
]
