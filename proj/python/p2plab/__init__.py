"""Simulation lab for piece-level p2p sharing protocols."""

from ._core import (
    bt_simulate,
    check_conditions,
    closed_form_case,
    closed_form_drift,
    drift,
    drift_scan,
    find_constants,
    gs_generator_k2,
    potential,
    run_cli,
    simulate,
)

__all__ = [
    "bt_simulate",
    "check_conditions",
    "closed_form_case",
    "closed_form_drift",
    "drift",
    "drift_scan",
    "find_constants",
    "gs_generator_k2",
    "potential",
    "run_cli",
    "simulate",
]
