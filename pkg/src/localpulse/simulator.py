"""Propagation of ``i d/dt psi = sum_k [u_{y,k}(t) y_{N,k} + u_{z,k}(t) z_{N,k}] psi``.

Two independent routes:

* :func:`propagate_exact` multiplies closed-form single-channel propagators,
  using only each pulse's signed area;
* :func:`propagate_numeric` integrates the equation with fixed-step classical
  RK4 from the sampled control values and nothing else.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import IntegrationError, InvalidInputError, UnsupportedScheduleError
from .operators import build, expm_y, expm_z
from .scheduler import Schedule
from .states import PureState
from .waveforms import area, evaluate

log = logging.getLogger(__name__)

NORM_DRIFT_TOL = 1e-9

ChannelKey = tuple[str, int]


@dataclass(frozen=True)
class ControlField:
    """Scalar control functions per channel ``("y", k)`` / ``("z", k)``.

    Each function must accept a numpy array of times. ``breakpoints`` lists
    times where the field or its derivatives may jump; the integrator never
    steps across them.
    """

    dim: int
    channels: Mapping[ChannelKey, Callable[[np.ndarray], np.ndarray]] = field(default_factory=dict)
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        for axis, k in self.channels:
            if axis not in ("y", "z") or not 0 <= k <= self.dim - 2:
                raise InvalidInputError(f"invalid channel {(axis, k)!r} for dim {self.dim}")
        object.__setattr__(self, "breakpoints", tuple(sorted(set(float(b) for b in self.breakpoints))))

    def channel_keys(self) -> list[ChannelKey]:
        """All ``2(N-1)`` channels in the order y0, z0, y1, z1, ..."""
        return [(axis, k) for k in range(self.dim - 1) for axis in ("y", "z")]

    def sample(self, t) -> np.ndarray:
        """Control values at times ``t``, shape ``(len(t), 2(N-1))``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((t.size, 2 * (self.dim - 1)))
        for col, key in enumerate(self.channel_keys()):
            fn = self.channels.get(key)
            if fn is not None:
                out[:, col] = np.broadcast_to(fn(t), t.shape)
        return out

    def generators(self) -> np.ndarray:
        return np.stack([build(axis, self.dim, k) for axis, k in self.channel_keys()])


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    fidelities: np.ndarray | None = None
    renormalizations: int = 0
    max_norm_drift: float = 0.0

    @property
    def final(self) -> PureState:
        return PureState.from_vector(self.states[-1])

    @property
    def final_vector(self) -> np.ndarray:
        return self.states[-1]

    def nearest_indices(self, sample_times) -> np.ndarray:
        """Indices of the grid points closest to each requested time (deduplicated)."""
        sample_times = np.asarray(sample_times, dtype=float)
        idx = np.clip(np.searchsorted(self.times, sample_times), 1, self.times.size - 1)
        left = self.times[idx - 1]
        right = self.times[idx]
        idx = np.where(np.abs(sample_times - left) <= np.abs(right - sample_times), idx - 1, idx)
        if self.times.size == 1:
            idx = np.zeros_like(idx)
        return np.unique(idx)


def exact_unitary(schedule: Schedule) -> np.ndarray:
    """Product of the closed-form pulse propagators in time order."""
    if not schedule.is_sequential(tol=1e-12 * max(1.0, abs(schedule.t_f))):
        raise UnsupportedScheduleError(
            "schedule has overlapping pulses; use propagate_numeric on schedule_to_field(schedule)"
        )
    u = np.eye(schedule.dim, dtype=complex)
    for pulse in sorted(schedule.pulses, key=lambda p: p.t0):
        delta_f = pulse.sign * area(pulse)
        step = expm_y if pulse.channel == "y" else expm_z
        u = step(delta_f, schedule.dim, pulse.index) @ u
    return u


def propagate_exact(schedule: Schedule, initial: PureState) -> PureState:
    """Apply each pulse as ``exp(-i * signed_area * H)``; no time stepping."""
    if initial.dim != schedule.dim:
        raise InvalidInputError(f"state dim {initial.dim} does not match schedule dim {schedule.dim}")
    psi = exact_unitary(schedule) @ initial.amplitudes
    return PureState.from_vector(psi)


def _rk4_step_matrices(m1, m2, m3, h):
    """One classical RK4 step for ``psi' = M(t) psi`` written as a matrix per step."""
    eye = np.eye(m1.shape[-1], dtype=complex)
    k1 = m1
    k2 = m2 @ (eye + 0.5 * h * k1)
    k3 = m2 @ (eye + 0.5 * h * k2)
    k4 = m3 @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def propagate_numeric(
    field: ControlField,
    initial: PureState,
    t_end: float,
    step: float,
    target: PureState | None = None,
    min_steps_per_segment: int = 1,
) -> Trajectory:
    """Fixed-step RK4 integration from ``t = 0`` to ``t_end``.

    The step is shrunk per segment so that every breakpoint of ``field`` is a
    grid point and each segment gets at least ``min_steps_per_segment`` steps.
    Stage evaluations at a segment's right end use the left limit of the
    field. The state is recorded at every grid point. If its norm drifts by
    more than 1e-9 it is renormalized at the end of the segment and the event
    is counted in ``Trajectory.renormalizations``.
    """
    if initial.dim != field.dim:
        raise InvalidInputError(f"state dim {initial.dim} does not match field dim {field.dim}")
    if not (math.isfinite(step) and step > 0.0):
        raise InvalidInputError(f"step must be positive, got {step!r}")
    if not (math.isfinite(t_end) and t_end >= 0.0):
        raise InvalidInputError(f"t_end must be nonnegative, got {t_end!r}")

    knots = [0.0] + [b for b in field.breakpoints if 0.0 < b < t_end]
    if t_end > 0.0:
        knots.append(t_end)
    gens = field.generators()
    n_dim = initial.dim
    gens_flat = (-1j * gens).reshape(gens.shape[0], n_dim * n_dim)
    psi = np.array(initial.amplitudes, dtype=complex)

    times = [np.zeros(1)]
    states = [psi[None, :].copy()]
    renorms = 0
    max_drift = 0.0
    for a, b in zip(knots, knots[1:]):
        n = max(1, min_steps_per_segment, math.ceil((b - a) / step - 1e-9))
        h = (b - a) / n
        starts = a + h * np.arange(n)
        ends = np.append(starts[1:], b)
        stage_t = np.concatenate([starts, starts + 0.5 * h, ends])
        stage_t[-1] = np.nextafter(b, a)
        u = field.sample(stage_t)
        if not np.all(np.isfinite(u)):
            bad = stage_t[~np.all(np.isfinite(u), axis=1)][0]
            raise IntegrationError(f"non-finite control value at t = {bad!r}")
        m = (u.astype(complex) @ gens_flat).reshape(-1, n_dim, n_dim)
        steps = _rk4_step_matrices(m[:n], m[n : 2 * n], m[2 * n :], h)

        seg = np.empty((n, psi.size), dtype=complex)
        for i in range(n):
            psi = steps[i] @ psi
            seg[i] = psi
        drift = float(np.max(np.abs(np.linalg.norm(seg, axis=1) - 1.0)))
        max_drift = max(max_drift, drift)
        if drift > NORM_DRIFT_TOL:
            renorms += 1
            log.warning("RK4 norm drift %.3g on [%g, %g]; renormalizing", drift, a, b)
            psi = psi / np.linalg.norm(psi)
            seg[-1] = psi
        times.append(ends)
        states.append(seg)

    times_arr = np.concatenate(times)
    states_arr = np.concatenate(states)
    fids = None
    if target is not None:
        fids = np.abs(states_arr.conj() @ target.amplitudes) ** 2 / np.sum(np.abs(states_arr) ** 2, axis=1)
    return Trajectory(times_arr, states_arr, fids, renorms, max_drift)


def schedule_to_field(schedule: Schedule) -> ControlField:
    """Sum the schedule's pulses per channel."""
    by_channel: dict[ChannelKey, list] = {}
    breaks = set(schedule.boundaries)
    for p in schedule.pulses:
        by_channel.setdefault((p.channel, p.index), []).append(p)
        breaks.update((p.t0, p.t1))
        if p.family.name == "ln":
            breaks.add(p.midpoint)

    def channel_fn(pulses):
        def fn(t):
            t = np.asarray(t, dtype=float)
            total = np.zeros_like(t)
            for p in pulses:
                total = total + evaluate(p, t)
            return total

        return fn

    channels = {key: channel_fn(ps) for key, ps in by_channel.items()}
    return ControlField(schedule.dim, channels, tuple(breaks))


def simulate_schedule(schedule: Schedule, initial: PureState, steps_per_pulse: int = 2000, target=None) -> Trajectory:
    """Numeric propagation of a schedule over ``[0, t_f]``.

    Each pulse is integrated with ``steps_per_pulse`` equal steps (pulses of the
    polynomial family are split at their midpoint kink, so they get twice that).
    """
    if steps_per_pulse < 1:
        raise InvalidInputError(f"steps_per_pulse must be >= 1, got {steps_per_pulse!r}")
    longest = max((p.duration for p in schedule.pulses), default=1.0)
    return propagate_numeric(
        schedule_to_field(schedule),
        initial,
        schedule.boundaries[-1],
        longest / steps_per_pulse,
        target=target,
        min_steps_per_segment=steps_per_pulse,
    )


def bloch_coordinates(state: PureState) -> tuple[float, float, float]:
    amps = state.amplitudes if isinstance(state, PureState) else np.asarray(state, dtype=complex)
    if amps.size != 2:
        raise InvalidInputError(f"Bloch coordinates need a 2-level state, got dim {amps.size}")
    c0, c1 = amps
    cross = np.conj(c0) * c1
    return (
        float(2.0 * cross.real),
        float(2.0 * cross.imag),
        float(abs(c0) ** 2 - abs(c1) ** 2),
    )


def batch_propagate(schedules: Sequence[Schedule], initials: Sequence[PureState], max_workers=None):
    """Exact propagation of independent (schedule, state) pairs, possibly in threads."""
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(propagate_exact, schedules, initials))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(path, traj: Trajectory, indices=None) -> None:
    """Columns: t, re/im per amplitude, fidelity (if known), Bloch x/y/z for qubits."""
    idx = np.arange(traj.times.size) if indices is None else np.asarray(indices)
    dim = traj.states.shape[1]
    header = ["t"]
    for n in range(dim):
        header += [f"re_c{n}", f"im_c{n}"]
    if traj.fidelities is not None:
        header.append("fidelity")
    if dim == 2:
        header += ["bloch_x", "bloch_y", "bloch_z"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in idx:
            psi = traj.states[i]
            row = [_fmt(traj.times[i])]
            for z in psi:
                row += [_fmt(z.real), _fmt(z.imag)]
            if traj.fidelities is not None:
                row.append(_fmt(traj.fidelities[i]))
            if dim == 2:
                row += [_fmt(v) for v in bloch_coordinates(psi / np.linalg.norm(psi))]
            writer.writerow(row)


def write_controls_csv(path, field: ControlField, times) -> None:
    """Columns: t, u_y0, u_z0, ..., u_y{N-2}, u_z{N-2}."""
    times = np.asarray(times, dtype=float)
    values = field.sample(times)
    header = ["t"] + [f"u_{axis}{k}" for axis, k in field.channel_keys()]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for t, row in zip(times, values):
            writer.writerow([_fmt(t)] + [_fmt(v) for v in row])


def pulse_sample_times(schedule: Schedule, per_pulse: int = 512) -> np.ndarray:
    """``per_pulse`` evenly spaced instants in each pulse, plus the end time."""
    if not schedule.pulses:
        return np.array([schedule.boundaries[0]])
    pts = [np.linspace(p.t0, p.t1, per_pulse, endpoint=False) for p in schedule.pulses]
    pts.append(np.array([schedule.boundaries[-1]]))
    return np.unique(np.concatenate(pts))
