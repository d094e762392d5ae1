"""Resonant control pulses for prescribed two-level population paths."""
from ._accel import BACKEND
from .analysis import (
    final_population_error, period_crosscheck, phase_constancy, pulse_metrics, tracking_error,
)
from .domain import (
    AU_TIME_FS, ControlSpec, QuantumState, SimConfig, SystemParams, Trajectory, population,
    relative_phase,
)
from .dynamics import DriveField, norm_drift, propagate, rabi_oracle, rhs_exact, rhs_rwa
from .synthesis import (
    ControlEvaluator, Pulse, control_function, envelope, initial_state, sample_pulse, sigmoid,
    synthesize_field_closed, synthesize_field_generic,
)

__all__ = [
    "AU_TIME_FS", "BACKEND", "ControlEvaluator", "ControlSpec", "DriveField", "Pulse",
    "QuantumState", "SimConfig", "SystemParams", "Trajectory", "control_function", "envelope",
    "final_population_error", "initial_state", "norm_drift", "period_crosscheck",
    "phase_constancy", "population", "propagate", "pulse_metrics", "rabi_oracle",
    "relative_phase", "rhs_exact", "rhs_rwa", "sample_pulse", "sigmoid",
    "synthesize_field_closed", "synthesize_field_generic", "tracking_error",
]
__version__ = "0.1.0"
