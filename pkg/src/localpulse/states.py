"""Pure states of an N-level system and their geometric angle parametrization.

A pure state ``c`` (unit vector in C^N) is described, up to a global phase, by
polar angles ``theta[0..N-2]`` in [0, pi] and phases ``phi[0..N-2]`` in
[0, 2 pi)::

    c_0     = cos(theta_1 / 2)
    c_k     = exp(i phi_k) sin(theta_1/2) ... sin(theta_k/2) cos(theta_{k+1}/2)
    c_{N-1} = exp(i phi_{N-1}) sin(theta_1/2) ... sin(theta_{N-1}/2)

Angles are stored zero-based, so ``theta[j]`` is theta_{j+1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .errors import InvalidInputError

TWO_PI = 2.0 * math.pi
NORM_TOL = 1e-12
ZERO_AMPLITUDE = 1e-12


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if amps.size < 2:
            raise InvalidInputError(f"a state needs at least 2 levels, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise InvalidInputError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInputError(f"amplitudes must have unit norm, got norm {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def from_vector(cls, vector) -> "PureState":
        """Normalize an arbitrary nonzero vector into a state."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if not np.isfinite(norm) or norm < ZERO_AMPLITUDE:
            raise InvalidInputError("cannot normalize a zero-norm vector")
        return cls(v / norm)

    @classmethod
    def basis(cls, dim: int, level: int) -> "PureState":
        if not 0 <= level < dim:
            raise InvalidInputError(f"level {level} outside [0, {dim - 1}]")
        v = np.zeros(dim, dtype=complex)
        v[level] = 1.0
        return cls(v)

    def __repr__(self):
        return f"PureState({np.array2string(self.amplitudes, precision=6)})"


@dataclass(frozen=True, eq=False)
class GeometricState:
    """Polar angles ``theta`` and phases ``phi`` (both length ``dim - 1``)."""

    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float).reshape(-1).copy()
        phi = np.asarray(self.phi, dtype=float).reshape(-1).copy()
        if theta.size < 1:
            raise InvalidInputError("theta must have at least one entry")
        if theta.size != phi.size:
            raise InvalidInputError(
                f"theta and phi lengths differ ({theta.size} vs {phi.size})"
            )
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(phi))):
            raise InvalidInputError("angles must be finite")
        if np.any(theta < 0.0) or np.any(theta > math.pi):
            raise InvalidInputError("theta entries must lie in [0, pi]")
        if np.any(phi < 0.0) or np.any(phi >= TWO_PI):
            raise InvalidInputError("phi entries must lie in [0, 2 pi)")
        theta.setflags(write=False)
        phi.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def dim(self) -> int:
        return self.theta.size + 1

    def __repr__(self):
        return f"GeometricState(theta={self.theta.tolist()}, phi={self.phi.tolist()})"


def to_amplitudes(geo: GeometricState, dim: int | None = None) -> PureState:
    """Evaluate the angle parametrization into an amplitude vector."""
    if dim is not None and dim != geo.dim:
        raise InvalidInputError(f"expected dim {dim}, angles describe dim {geo.dim}")
    n = geo.dim
    half = 0.5 * geo.theta
    sines = np.sin(half)
    cosines = np.cos(half)
    amps = np.empty(n, dtype=complex)
    prefix = 1.0
    for k in range(n - 1):
        amps[k] = prefix * cosines[k]
        prefix *= sines[k]
    amps[n - 1] = prefix
    amps[1:] *= np.exp(1j * geo.phi)
    # rounding can leave the norm a few ulps off
    return PureState(amps / np.linalg.norm(amps))


def _wrap_phase(angle: float) -> float:
    phase = math.fmod(angle, TWO_PI)
    if phase < 0.0:
        phase += TWO_PI
    if phase >= TWO_PI:
        phase = 0.0
    return phase


def to_geometric(state: PureState | Any) -> GeometricState:
    """Recover the angles of a state, discarding its global phase.

    The global phase is fixed by making the first nonzero amplitude real and
    positive. Angles that do not affect the state (a phase on a vanishing
    amplitude, a polar angle with no remaining amplitude mass) are set to 0.
    """
    if not isinstance(state, PureState):
        state = PureState.from_vector(state)
    c = state.amplitudes
    mags = np.abs(c)
    nonzero = np.flatnonzero(mags >= ZERO_AMPLITUDE)
    if nonzero.size == 0:
        raise InvalidInputError("zero-norm state")
    ref = nonzero[0]
    c = c * (np.conj(c[ref]) / mags[ref])
    c[ref] = mags[ref]

    n = c.size
    # tail[k] = sqrt(sum_{j >= k} |c_j|^2)
    tail = np.sqrt(np.cumsum((mags**2)[::-1])[::-1])
    theta = np.zeros(n - 1)
    phi = np.zeros(n - 1)
    for k in range(n - 1):
        if tail[k] >= ZERO_AMPLITUDE:
            theta[k] = 2.0 * math.atan2(tail[k + 1], mags[k])
        if mags[k + 1] >= ZERO_AMPLITUDE:
            phi[k] = _wrap_phase(float(np.angle(c[k + 1])))
    np.clip(theta, 0.0, math.pi, out=theta)
    return GeometricState(theta, phi)


def fidelity(a: PureState, b: PureState) -> float:
    """Return ``|<a|b>|^2``."""
    va = a.amplitudes if isinstance(a, PureState) else np.asarray(a, dtype=complex)
    vb = b.amplitudes if isinstance(b, PureState) else np.asarray(b, dtype=complex)
    if va.shape != vb.shape:
        raise InvalidInputError(f"dimension mismatch: {va.size} vs {vb.size}")
    return float(min(1.0, abs(np.vdot(va, vb)) ** 2))


def random_state(rng: np.random.Generator, dim: int) -> PureState:
    """Draw a Haar-random pure state."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState.from_vector(v)


def random_geometric(rng: np.random.Generator, dim: int) -> GeometricState:
    """Draw angles uniformly over their ranges (not Haar-distributed)."""
    return GeometricState(
        rng.uniform(0.0, math.pi, dim - 1), rng.uniform(0.0, TWO_PI, dim - 1)
    )


def state_to_json(state: PureState) -> dict:
    return {"amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes]}


def geometric_to_json(geo: GeometricState) -> dict:
    return {"theta": [float(x) for x in geo.theta], "phi": [float(x) for x in geo.phi]}


def state_from_json(obj: Mapping[str, Any]) -> PureState:
    """Parse either ``{"amplitudes": [[re, im], ...]}`` or ``{"theta", "phi"}``.

    Angles are radians. An explicit ``"units"`` key other than ``"rad"`` is
    rejected rather than converted.
    """
    if not isinstance(obj, Mapping):
        raise InvalidInputError("a state must be a JSON object")
    extra = set(obj) - {"amplitudes", "theta", "phi", "units"}
    if extra:
        raise InvalidInputError(f"unknown state keys: {sorted(extra)}")
    units = obj.get("units", "rad")
    if units not in ("rad", "radians"):
        raise InvalidInputError(f"angles must be given in radians, got units={units!r}")
    if "amplitudes" in obj:
        if "theta" in obj or "phi" in obj:
            raise InvalidInputError("give either amplitudes or theta/phi, not both")
        try:
            pairs = np.asarray(obj["amplitudes"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed amplitudes: {exc}") from None
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise InvalidInputError("amplitudes must be a list of [re, im] pairs")
        return PureState(pairs[:, 0] + 1j * pairs[:, 1])
    if "theta" in obj and "phi" in obj:
        return to_amplitudes(GeometricState(obj["theta"], obj["phi"]))
    raise InvalidInputError("a state needs 'amplitudes' or both 'theta' and 'phi'")
