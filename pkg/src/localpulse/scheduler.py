"""Three-stage pulse schedules between arbitrary pure states.

Stage 1 zeroes the initial phases with Z pulses, stage 2 reshapes the polar
angles with Y pulses, stage 3 installs the target phases with Z pulses. Every
pulse rotates exactly one geometric angle, so a transition needs at most
``4N - 5`` pulses; pulses with nothing to rotate are left out.

Sign conventions follow the propagators in :mod:`localpulse.operators`:

* a Z pulse on channel ``k`` with signed area ``a`` advances ``phi_{k+1}`` by
  ``2a``;
* a Y pulse on channel ``k`` with signed area ``a`` advances ``theta_{k+1}`` by
  ``2a`` when levels ``k+2 ...`` are empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .states import TWO_PI, GeometricState, PureState, to_geometric
from .waveforms import Pulse, WaveformFamily, duration_for


@dataclass(frozen=True)
class TransitionSpec:
    """What to steer where, with which waveform family and peak amplitude(s).

    ``amplitudes`` is either one positive float shared by every pulse or a
    sequence of ``4N - 5`` values, one per pulse slot in schedule order
    (slots whose rotation is zero are still counted).
    """

    initial: GeometricState
    target: GeometricState
    family: WaveformFamily
    amplitudes: float | Sequence[float] = 1.0

    def __post_init__(self):
        if not isinstance(self.initial, GeometricState):
            object.__setattr__(self, "initial", to_geometric(self.initial))
        if not isinstance(self.target, GeometricState):
            object.__setattr__(self, "target", to_geometric(self.target))
        if self.initial.dim != self.target.dim:
            raise InvalidInputError(
                f"initial and target dims differ ({self.initial.dim} vs {self.target.dim})"
            )
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        if amps.size not in (1, slot_count(self.dim)):
            raise InvalidInputError(
                f"need 1 or {slot_count(self.dim)} amplitudes, got {amps.size}"
            )
        if not np.all(np.isfinite(amps)) or np.any(amps <= 0.0):
            raise InvalidInputError("amplitudes must be positive and finite")

    @property
    def dim(self) -> int:
        return self.initial.dim

    def amplitude(self, slot: int) -> float:
        amps = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        return float(amps[0] if amps.size == 1 else amps[slot])


@dataclass(frozen=True)
class Schedule:
    """Pulses in time order with the boundary times between them.

    For synthesized schedules pulse ``j`` occupies ``[boundaries[j], boundaries[j+1])``.
    Hand-built schedules may contain overlapping pulses; only the numeric
    propagator accepts those.
    """

    dim: int
    family: WaveformFamily
    pulses: tuple[Pulse, ...] = ()
    boundaries: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        object.__setattr__(self, "boundaries", tuple(float(b) for b in self.boundaries))
        if len(self.boundaries) < 1:
            raise InvalidInputError("a schedule needs at least one boundary time")
        if any(b1 < b0 for b0, b1 in zip(self.boundaries, self.boundaries[1:])):
            raise InvalidInputError("boundary times must be nondecreasing")
        for p in self.pulses:
            if p.index > self.dim - 2:
                raise InvalidInputError(f"pulse index {p.index} too large for dim {self.dim}")

    @property
    def t_f(self) -> float:
        return transition_time(self)

    def is_sequential(self, tol: float = 0.0) -> bool:
        """True when no two pulses overlap in time."""
        ordered = sorted(self.pulses, key=lambda p: p.t0)
        return all(b.t0 >= a.t1 - tol for a, b in zip(ordered, ordered[1:]))

    def to_json(self) -> dict:
        out = {"dim": self.dim, "family": self.family.name}
        if self.family.order is not None:
            out["order"] = self.family.order
        out["pulses"] = [p.to_json() for p in self.pulses]
        out["boundaries"] = list(self.boundaries)
        out["t_f"] = self.t_f
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Schedule":
        try:
            return cls(
                dim=int(obj["dim"]),
                family=WaveformFamily(obj["family"], obj.get("order")),
                pulses=tuple(Pulse.from_json(p) for p in obj["pulses"]),
                boundaries=tuple(obj["boundaries"]),
            )
        except KeyError as exc:
            raise InvalidInputError(f"schedule is missing field {exc.args[0]!r}") from None


def slot_count(dim: int) -> int:
    return 4 * dim - 5


def _arc(phi: float) -> float:
    return min(phi, TWO_PI - phi)


def rotation_plan(initial: GeometricState, target: GeometricState) -> list[tuple[str, int, int, float]]:
    """The ``4N - 5`` rotations as ``(channel, index, sign, distance)`` in time order.

    ``distance`` is the geometric angle the pulse must sweep (twice its area).
    """
    if initial.dim != target.dim:
        raise InvalidInputError(f"dimension mismatch: {initial.dim} vs {target.dim}")
    n = initial.dim
    th0, th1 = initial.theta, target.theta
    ph0, ph1 = initial.phi, target.phi
    plan = []
    # stage 1: phi_j -> 0 on channel z_{j-1}, shorter arc, ties go the positive way
    for j in range(1, n):
        phi = float(ph0[j - 1])
        sign = -1 if phi < math.pi else 1
        plan.append(("z", j - 1, sign, _arc(phi)))
    # stage 2a: theta_m -> 0 for m = N-1 down to 2, channel y_{m-1}
    for m in range(n - 1, 1, -1):
        plan.append(("y", m - 1, -1, float(th0[m - 1])))
    # stage 2b: theta_1 -> theta_1^s
    diff = float(th1[0] - th0[0])
    plan.append(("y", 0, 1 if diff >= 0.0 else -1, abs(diff)))
    # stage 2c: theta_m: 0 -> theta_m^s for m = 2 .. N-1
    for m in range(2, n):
        plan.append(("y", m - 1, 1, float(th1[m - 1])))
    # stage 3: phi_j: 0 -> phi_j^s
    for j in range(1, n):
        phi = float(ph1[j - 1])
        sign = 1 if phi <= math.pi else -1
        plan.append(("z", j - 1, sign, _arc(phi)))
    return plan


def synthesize(spec: TransitionSpec) -> Schedule:
    """Build the pulse schedule for ``spec``, starting at ``t = 0``."""
    pulses = []
    boundaries = [0.0]
    for slot, (channel, index, sign, distance) in enumerate(rotation_plan(spec.initial, spec.target)):
        if distance <= 0.0:
            continue
        amp = spec.amplitude(slot)
        t0 = boundaries[-1]
        t1 = t0 + duration_for(spec.family, distance, amp)
        if not t1 > t0:
            # rotation below float resolution at this time offset
            continue
        pulses.append(Pulse(channel, index, sign, amp, t0, t1, spec.family))
        boundaries.append(t1)
    return Schedule(spec.dim, spec.family, tuple(pulses), tuple(boundaries))


def c_constants(initial: GeometricState, target: GeometricState) -> tuple[float, float]:
    """Total polar-angle distance ``C1`` and phase distance ``C2`` of a transition."""
    if initial.dim != target.dim:
        raise InvalidInputError(f"dimension mismatch: {initial.dim} vs {target.dim}")
    th0, th1 = initial.theta, target.theta
    c1 = float(np.sum(th0[1:] + th1[1:]) + abs(th0[0] - th1[0]))
    c2 = float(sum(_arc(float(p)) for p in initial.phi) + sum(_arc(float(p)) for p in target.phi))
    return c1, c2


def transition_time(schedule: Schedule) -> float:
    return schedule.boundaries[-1] - schedule.boundaries[0]


def transition_spec(
    initial: PureState | GeometricState,
    target: PureState | GeometricState,
    family: WaveformFamily,
    amplitudes: float | Sequence[float] = 1.0,
) -> TransitionSpec:
    """Convenience constructor accepting amplitude vectors or angles."""
    return TransitionSpec(
        initial if isinstance(initial, GeometricState) else to_geometric(initial),
        target if isinstance(target, GeometricState) else to_geometric(target),
        family,
        amplitudes,
    )
