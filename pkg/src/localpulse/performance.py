"""Time and time-energy performance of constrained local waveform schedules.

For a schedule whose pulses all share peak amplitude ``x``, both indices are
linear in the total rotation distance ``C1 + C2``::

    J_te = t_f + (1/lam) * integral of sum_i u_i(t)**2 dt = (C1 + C2) * w(x)

with a per-radian cost ``w`` that depends only on the waveform family.
``w`` is strictly convex in ``x > 0``, so the best amplitude under a bound
``L`` is ``min(L, x_opt)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .errors import InvalidInputError
from .scheduler import Schedule, transition_time
from .waveforms import Pulse, WaveformFamily, energy


@dataclass(frozen=True)
class PerformanceParams:
    """Energy weight ``lam`` (power units) and optional amplitude bound."""

    lam: float
    bound: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise InvalidInputError(f"lambda must be positive, got {self.lam!r}")
        if self.bound is not None and not (self.bound > 0.0):
            raise InvalidInputError(f"bound must be positive, got {self.bound!r}")

    @property
    def unbounded(self) -> "PerformanceParams":
        return PerformanceParams(self.lam, None)


@dataclass(frozen=True)
class PerformanceReport:
    family: WaveformFamily
    c1: float
    c2: float
    optimal_amplitude: float
    j_t: float
    j_te: float
    t_star: float
    optimal_amplitude_unbounded: float
    j_te_unbounded: float

    def to_json(self) -> dict:
        out = asdict(self)
        out["family"] = self.family.name
        if self.family.order is not None:
            out["order"] = self.family.order
        out["label"] = self.family.label
        return out


def w_value(family: WaveformFamily, x: float, lam: float) -> float:
    """Per-radian time-energy cost of a family at peak amplitude ``x``."""
    if not x > 0.0:
        raise InvalidInputError(f"amplitude must be positive, got {x!r}")
    if not lam > 0.0:
        raise InvalidInputError(f"lambda must be positive, got {lam!r}")
    if family.name == "bb":
        return 0.5 * (1.0 / x + x / lam)
    if family.name == "ls":
        return math.pi / 4.0 * (1.0 / x + x / (2.0 * lam))
    n = family.order
    return (n + 1.0) / (2.0 * n * x) + n * x / ((2.0 * n + 1.0) * lam)


def unconstrained_amplitude(family: WaveformFamily, lam: float) -> float:
    """Stationary point of :func:`w_value`."""
    if family.name == "bb":
        return math.sqrt(lam)
    if family.name == "ls":
        return math.sqrt(2.0 * lam)
    n = family.order
    return math.sqrt((2.0 * n + 1.0) * (2.0 * n + 2.0) * lam) / (2.0 * n)


def optimal_amplitude(family: WaveformFamily, params: PerformanceParams) -> float:
    x = unconstrained_amplitude(family, params.lam)
    return x if params.bound is None else min(params.bound, x)


def closed_form_jte(family: WaveformFamily, c1: float, c2: float, params: PerformanceParams) -> float:
    _check_distances(c1, c2)
    total = c1 + c2
    if total == 0.0:
        return 0.0
    return total * w_value(family, optimal_amplitude(family, params), params.lam)


def closed_form_jt(family: WaveformFamily, c1: float, c2: float, bound: float | None) -> float:
    """Minimum transition time with every amplitude at the bound.

    An unbounded amplitude makes the transition instantaneous.
    """
    _check_distances(c1, c2)
    if bound is None:
        return 0.0
    if not bound > 0.0:
        raise InvalidInputError(f"bound must be positive, got {bound!r}")
    t_star = (c1 + c2) / bound
    return time_factor(family) * t_star


def time_factor(family: WaveformFamily) -> float:
    """Duration per unit ``t_*`` at full amplitude: 1/2, (n+1)/(2n) or pi/4."""
    if family.name == "bb":
        return 0.5
    if family.name == "ls":
        return math.pi / 4.0
    n = family.order
    return (n + 1.0) / (2.0 * n)


def measured_jte(schedule: Schedule | Sequence[Pulse], lam: float) -> float:
    """``t_f + energy / lam`` of a concrete schedule.

    A bare pulse sequence is treated as starting at ``t = 0`` and ending at
    its latest pulse end.
    """
    if not lam > 0.0:
        raise InvalidInputError(f"lambda must be positive, got {lam!r}")
    if isinstance(schedule, Schedule):
        t_f = transition_time(schedule)
        pulses = schedule.pulses
    else:
        pulses = tuple(schedule)
        t_f = max((p.t1 for p in pulses), default=0.0)
    return t_f + sum(energy(p) for p in pulses) / lam


def report(family: WaveformFamily, c1: float, c2: float, params: PerformanceParams) -> PerformanceReport:
    free = params.unbounded
    t_star = 0.0 if params.bound is None else (c1 + c2) / params.bound
    return PerformanceReport(
        family=family,
        c1=c1,
        c2=c2,
        optimal_amplitude=optimal_amplitude(family, params),
        j_t=closed_form_jt(family, c1, c2, params.bound),
        j_te=closed_form_jte(family, c1, c2, params),
        t_star=t_star,
        optimal_amplitude_unbounded=optimal_amplitude(family, free),
        j_te_unbounded=closed_form_jte(family, c1, c2, free),
    )


def table1(c1: float, c2: float, params: PerformanceParams, orders: Iterable[int] = (1, 2, 5, 10)) -> list[PerformanceReport]:
    """Rows BB, LN(n) for each order, LS."""
    families = [WaveformFamily("bb")]
    families += [WaveformFamily("ln", n) for n in orders]
    families.append(WaveformFamily("ls"))
    return [report(f, c1, c2, params) for f in families]


def format_table(rows: Sequence[PerformanceReport]) -> str:
    """Aligned text rendering: one row per family, columns J_t and both J_te variants."""
    header = ("Case", "J_t", "J_te(bounded)", "J_te(unbounded)")
    body = [
        (r.family.label, f"{r.j_t:.12g}", f"{r.j_te:.12g}", f"{r.j_te_unbounded:.12g}")
        for r in rows
    ]
    widths = [max(len(line[i]) for line in [header, *body]) for i in range(4)]
    lines = []
    for line in [header, *body]:
        cells = [line[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(line[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _check_distances(c1: float, c2: float) -> None:
    if c1 < 0.0 or c2 < 0.0:
        raise InvalidInputError(f"C1 and C2 must be nonnegative, got {c1!r}, {c2!r}")
