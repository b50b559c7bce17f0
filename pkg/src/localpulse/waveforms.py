"""Local control waveforms: bang-bang, local sine and local n-order polynomial.

Each waveform lives on one interval ``[t0, t1)`` and is zero elsewhere. With
``dt = t1 - t0`` and peak amplitude ``A``:

=========  ===========================  ===========================
family     area (integral of u)         energy (integral of u**2)
=========  ===========================  ===========================
bb         A dt                         A**2 dt
ls         2 A dt / pi                  A**2 dt / 2
ln(n)      A dt n / (n + 1)             A**2 dt 2n**2 / ((2n+1)(n+1))
=========  ===========================  ===========================

A pulse that must rotate a geometric angle by ``delta`` needs area
``delta / 2``; :func:`duration_for` inverts the area formula for that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInputError

FAMILY_NAMES = {"bb": "BB", "ls": "LS", "ln": "LN"}


@dataclass(frozen=True)
class WaveformFamily:
    """Waveform shape; ``order`` is set only for the polynomial family."""

    name: str
    order: int | None = None

    def __post_init__(self):
        name = str(self.name).lower()
        if name not in FAMILY_NAMES:
            raise InvalidInputError(f"family must be one of {sorted(FAMILY_NAMES)}, got {self.name!r}")
        object.__setattr__(self, "name", name)
        if name == "ln":
            if self.order is None or int(self.order) != self.order or self.order < 1:
                raise InvalidInputError(f"ln family needs an integer order >= 1, got {self.order!r}")
            object.__setattr__(self, "order", int(self.order))
        elif self.order is not None:
            raise InvalidInputError(f"order is only meaningful for the ln family, got {self.order!r}")

    @classmethod
    def bang_bang(cls) -> "WaveformFamily":
        return cls("bb")

    @classmethod
    def local_sine(cls) -> "WaveformFamily":
        return cls("ls")

    @classmethod
    def local_poly(cls, order: int) -> "WaveformFamily":
        return cls("ln", order)

    @property
    def label(self) -> str:
        if self.name == "ln":
            return f"LN(n={self.order})"
        return FAMILY_NAMES[self.name]

    # unit-amplitude area and energy per unit duration
    @property
    def area_factor(self) -> float:
        if self.name == "bb":
            return 1.0
        if self.name == "ls":
            return 2.0 / math.pi
        n = self.order
        return n / (n + 1.0)

    @property
    def energy_factor(self) -> float:
        if self.name == "bb":
            return 1.0
        if self.name == "ls":
            return 0.5
        n = self.order
        return 2.0 * n * n / ((2.0 * n + 1.0) * (n + 1.0))


@dataclass(frozen=True)
class Pulse:
    """One waveform on one control channel.

    ``channel`` is ``"y"`` or ``"z"`` and ``index`` selects the level pair
    ``(index, index + 1)``. ``sign`` multiplies the (positive) waveform.
    """

    channel: str
    index: int
    sign: int
    amplitude: float
    t0: float
    t1: float
    family: WaveformFamily

    def __post_init__(self):
        if self.channel not in ("y", "z"):
            raise InvalidInputError(f"channel must be 'y' or 'z', got {self.channel!r}")
        if int(self.index) != self.index or self.index < 0:
            raise InvalidInputError(f"index must be a nonnegative integer, got {self.index!r}")
        if self.sign not in (1, -1):
            raise InvalidInputError(f"sign must be +1 or -1, got {self.sign!r}")
        if not (math.isfinite(self.amplitude) and self.amplitude > 0.0):
            raise InvalidInputError(f"amplitude must be positive, got {self.amplitude!r}")
        if not (math.isfinite(self.t0) and math.isfinite(self.t1) and self.t0 < self.t1):
            raise InvalidInputError(f"need t0 < t1, got [{self.t0!r}, {self.t1!r})")
        object.__setattr__(self, "index", int(self.index))
        object.__setattr__(self, "sign", int(self.sign))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "t1", float(self.t1))

    @property
    def duration(self) -> float:
        return self.t1 - self.t0

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t0 + self.t1)

    def to_json(self) -> dict:
        out = {
            "channel": self.channel,
            "index": self.index,
            "sign": self.sign,
            "amplitude": self.amplitude,
            "t0": self.t0,
            "t1": self.t1,
            "family": self.family.name,
        }
        if self.family.order is not None:
            out["order"] = self.family.order
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Pulse":
        try:
            return cls(
                channel=obj["channel"],
                index=obj["index"],
                sign=obj["sign"],
                amplitude=float(obj["amplitude"]),
                t0=float(obj["t0"]),
                t1=float(obj["t1"]),
                family=WaveformFamily(obj["family"], obj.get("order")),
            )
        except KeyError as exc:
            raise InvalidInputError(f"pulse is missing field {exc.args[0]!r}") from None


def evaluate(pulse: Pulse, t):
    """Signed control value of ``pulse`` at time(s) ``t``; zero off ``[t0, t1)``."""
    if np.ndim(t) == 0:
        return _evaluate_scalar(pulse, float(t))
    t_arr = np.asarray(t, dtype=float)
    inside = (t_arr >= pulse.t0) & (t_arr < pulse.t1)
    dt = pulse.duration
    a = pulse.amplitude
    fam = pulse.family
    if fam.name == "bb":
        shape = np.full_like(t_arr, a)
    elif fam.name == "ls":
        shape = a * np.sin(math.pi * (t_arr - pulse.t0) / dt)
    else:
        # bracket is (t1 + t0 - 2t)/dt on the first half, (2t - t1 - t0)/dt on
        # the second; both are |2t - t0 - t1| / dt in [0, 1]
        bracket = np.abs(2.0 * t_arr - (pulse.t0 + pulse.t1)) / dt
        shape = a - a * bracket**fam.order
    return np.where(inside, pulse.sign * shape, 0.0)


def _evaluate_scalar(pulse: Pulse, t: float) -> float:
    if not pulse.t0 <= t < pulse.t1:
        return 0.0
    a = pulse.amplitude
    name = pulse.family.name
    if name == "bb":
        value = a
    elif name == "ls":
        value = a * math.sin(math.pi * (t - pulse.t0) / pulse.duration)
    else:
        bracket = abs(2.0 * t - (pulse.t0 + pulse.t1)) / pulse.duration
        value = a - a * bracket**pulse.family.order
    return pulse.sign * value


def area(pulse: Pulse) -> float:
    """Unsigned time integral of the waveform."""
    return pulse.family.area_factor * pulse.amplitude * pulse.duration


def energy(pulse: Pulse) -> float:
    """Time integral of the squared waveform."""
    return pulse.family.energy_factor * pulse.amplitude**2 * pulse.duration


def duration_for(family: WaveformFamily, distance: float, amplitude: float) -> float:
    """Duration that gives area ``distance / 2`` at the given peak amplitude.

    ls: ``distance * pi / (4A)``; ln(n): ``distance (n+1) / (2nA)``;
    bb: ``distance / (2A)``.
    """
    if not amplitude > 0.0:
        raise InvalidInputError(f"amplitude must be positive, got {amplitude!r}")
    if family.name == "bb":
        return distance / (2.0 * amplitude)
    if family.name == "ls":
        return distance * math.pi / (4.0 * amplitude)
    n = family.order
    return distance * (n + 1) / (2.0 * n * amplitude)


def adaptive_simpson(
    fn: Callable[[float], float], a: float, b: float, tol: float = 1e-10, max_depth: int = 60
) -> float:
    """Adaptive Simpson quadrature of a scalar function on ``[a, b]``.

    Used as an independent check on the closed-form integrals; split the
    interval at known kinks before calling.
    """
    if b <= a:
        return 0.0

    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(lo, hi, fa, fm, fb, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = fn(lm), fn(rm)
        left = simpson(fa, flm, fm, lo, mid)
        right = simpson(fm, frm, fb, mid, hi)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        return recurse(lo, mid, fa, flm, fm, left, eps / 2.0, depth - 1) + recurse(
            mid, hi, fm, frm, fb, right, eps / 2.0, depth - 1
        )

    fa, fb, fm = fn(a), fn(b), fn(0.5 * (a + b))
    whole = simpson(fa, fm, fb, a, b)
    return recurse(a, b, fa, fm, fb, whole, tol, max_depth)


def closed_interval_shape(pulse: Pulse) -> Callable[[float], float]:
    """The waveform as a function on the closed interval ``[t0, t1]``.

    :func:`evaluate` is zero at ``t1`` by the half-open convention, which
    would corrupt the endpoint sample of a quadrature rule for the
    bang-bang family.
    """
    def fn(t: float) -> float:
        return evaluate(pulse, min(t, math.nextafter(pulse.t1, pulse.t0)))

    return fn
