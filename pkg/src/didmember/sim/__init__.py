"""Scenario runner, cost model and host benchmarks."""
from .bench import bench_primitives
from .cost import TABLE_I, CostModel, Phase, accel_factor, emit_tables, estimate_time
from .scenario import (
    Event,
    EventKind,
    PhaseReport,
    ScenarioConfig,
    four_phase_script,
    parse_script,
    run_scenario,
    verify_counts,
)

__all__ = [
    "TABLE_I", "CostModel", "Event", "EventKind", "Phase", "PhaseReport", "ScenarioConfig",
    "accel_factor", "bench_primitives", "emit_tables", "estimate_time", "four_phase_script",
    "parse_script", "run_scenario", "verify_counts",
]
