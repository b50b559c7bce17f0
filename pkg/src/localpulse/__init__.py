"""Trajectory-constrained local waveform controls for N-level pure-state transitions."""

from .errors import IntegrationError, InvalidInputError, UnsupportedScheduleError
from .operators import OperatorKind, build, expm_oracle, expm_y, expm_z
from .performance import (
    PerformanceParams,
    PerformanceReport,
    closed_form_jt,
    closed_form_jte,
    measured_jte,
    optimal_amplitude,
    table1,
    w_value,
)
from .scheduler import Schedule, TransitionSpec, c_constants, synthesize, transition_spec, transition_time
from .simulator import (
    ControlField,
    Trajectory,
    bloch_coordinates,
    propagate_exact,
    propagate_numeric,
    schedule_to_field,
    simulate_schedule,
)
from .states import GeometricState, PureState, fidelity, to_amplitudes, to_geometric
from .waveforms import Pulse, WaveformFamily, area, energy, evaluate

__all__ = [
    "ControlField",
    "GeometricState",
    "IntegrationError",
    "InvalidInputError",
    "OperatorKind",
    "PerformanceParams",
    "PerformanceReport",
    "Pulse",
    "PureState",
    "Schedule",
    "Trajectory",
    "TransitionSpec",
    "UnsupportedScheduleError",
    "WaveformFamily",
    "area",
    "bloch_coordinates",
    "build",
    "c_constants",
    "closed_form_jt",
    "closed_form_jte",
    "energy",
    "evaluate",
    "expm_oracle",
    "expm_y",
    "expm_z",
    "fidelity",
    "measured_jte",
    "optimal_amplitude",
    "propagate_exact",
    "propagate_numeric",
    "schedule_to_field",
    "simulate_schedule",
    "synthesize",
    "table1",
    "to_amplitudes",
    "to_geometric",
    "transition_spec",
    "transition_time",
    "w_value",
]
