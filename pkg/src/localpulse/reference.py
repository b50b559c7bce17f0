"""The qubit worked example and its one-rotation alternative, as fixed inputs.

Transition ``|0> -> (|0> + i|1>)/sqrt(2)`` with ``lam = 2`` and ``L = 1``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidInputError
from .performance import PerformanceParams
from .scheduler import Schedule
from .simulator import ControlField
from .states import PureState
from .waveforms import Pulse, WaveformFamily

QUBIT_LAMBDA = 2.0
QUBIT_BOUND = 1.0

# half period of sin(4 sqrt(2) t / pi)
ONE_ROTATION_TIME = math.sqrt(2.0) * math.pi**2 / 8.0
ONE_ROTATION_PERIOD = 2.0 * ONE_ROTATION_TIME


def qubit_initial() -> PureState:
    return PureState.basis(2, 0)


def qubit_target() -> PureState:
    return PureState(np.array([1.0, 1j]) / math.sqrt(2.0))


def qubit_params() -> PerformanceParams:
    return PerformanceParams(QUBIT_LAMBDA, QUBIT_BOUND)


def one_rotation_frequency() -> float:
    return 4.0 * math.sqrt(2.0) / math.pi


def one_rotation_schedule() -> Schedule:
    """Both channels driven by the same sine lobe over one half period.

    The two pulses overlap, so only the numeric propagator accepts this
    schedule.
    """
    fam = WaveformFamily("ls")
    pulses = (
        Pulse("y", 0, 1, 1.0, 0.0, ONE_ROTATION_TIME, fam),
        Pulse("z", 0, 1, 1.0, 0.0, ONE_ROTATION_TIME, fam),
    )
    return Schedule(2, fam, pulses, (0.0, ONE_ROTATION_TIME))


def one_rotation_field(half_periods: int = 1) -> ControlField:
    """``u_y = u_z = sin(4 sqrt(2) t / pi)`` on ``[0, half_periods * T/2)``.

    Every multiple of the half period is a breakpoint, so the integrator
    lands exactly on the instants where the target state recurs.
    """
    if half_periods < 1:
        raise InvalidInputError(f"half_periods must be >= 1, got {half_periods!r}")
    omega = one_rotation_frequency()
    stop = half_periods * ONE_ROTATION_TIME

    def u(t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= 0.0) & (t < stop), np.sin(omega * t), 0.0)

    breaks = tuple(j * ONE_ROTATION_TIME for j in range(1, half_periods + 1))
    return ControlField(2, {("y", 0): u, ("z", 0): u}, breaks)


def recurrence_times(count: int) -> list[float]:
    """Instants ``T/2 + k T`` (k = 0 .. count-1) where the periodic drive hits the target."""
    return [ONE_ROTATION_TIME + k * ONE_ROTATION_PERIOD for k in range(count)]
