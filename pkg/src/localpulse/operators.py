"""Generalized Pauli operators on adjacent level pairs and their exponentials.

For levels ``k`` and ``k+1`` of an N-level system::

    x_{N,k} = |k><k+1| + |k+1><k|
    y_{N,k} = i (|k+1><k| - |k><k+1|)
    z_{N,k} = I_N - 2 |k+1><k+1|
    I_{N,k} = |k><k| + |k+1><k+1|

For N = 2 these are sigma_x, sigma_y, sigma_z and the identity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

KINDS = ("x", "y", "z", "i")


@dataclass(frozen=True)
class OperatorKind:
    kind: str
    dim: int
    index: int

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in KINDS:
            raise InvalidInputError(f"operator kind must be one of {KINDS}, got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        _check_index(self.dim, self.index)


def _check_index(dim: int, index: int) -> None:
    if int(dim) != dim or dim < 2:
        raise InvalidInputError(f"dim must be an integer >= 2, got {dim!r}")
    if int(index) != index or not 0 <= index <= dim - 2:
        raise InvalidInputError(f"index must lie in [0, {dim - 2}], got {index!r}")


def build(op: OperatorKind | str, dim: int | None = None, index: int | None = None) -> np.ndarray:
    """Return the dense matrix of a generalized Pauli operator.

    Accepts either an :class:`OperatorKind` or ``build("y", dim, index)``.
    """
    if not isinstance(op, OperatorKind):
        op = OperatorKind(op, dim, index)
    n, k = op.dim, op.index
    m = np.zeros((n, n), dtype=complex)
    if op.kind == "x":
        m[k, k + 1] = m[k + 1, k] = 1.0
    elif op.kind == "y":
        m[k + 1, k] = 1j
        m[k, k + 1] = -1j
    elif op.kind == "z":
        m[np.diag_indices(n)] = 1.0
        m[k + 1, k + 1] = -1.0
    else:
        m[k, k] = m[k + 1, k + 1] = 1.0
    return m


def expm_z(delta_f: float, dim: int, index: int) -> np.ndarray:
    """Closed form of ``exp(-i delta_f z_{N,k})``.

    Every level picks up ``exp(-i delta_f)`` except level ``k+1``, which picks
    up ``exp(+i delta_f)``.
    """
    _check_index(dim, index)
    diag = np.full(dim, cmath.exp(-1j * delta_f))
    diag[index + 1] *= cmath.exp(2j * delta_f)
    return np.diag(diag)


def expm_y(delta_f: float, dim: int, index: int) -> np.ndarray:
    """Closed form of ``exp(-i delta_f y_{N,k})``: a real rotation of levels k, k+1."""
    _check_index(dim, index)
    c, s = math.cos(delta_f), math.sin(delta_f)
    u = np.eye(dim, dtype=complex)
    k = index
    u[k, k] = u[k + 1, k + 1] = c
    # -i y_{N,k} = |k+1><k| - |k><k+1|
    u[k + 1, k] = s
    u[k, k + 1] = -s
    return u


def expm_oracle(m: np.ndarray, tol: float = 1e-16) -> np.ndarray:
    """General matrix exponential by scaling and squaring a truncated Taylor series.

    Deliberately shares nothing with the closed forms above so it can check them.
    The series stops once a term's max-norm drops below ``tol`` times the
    partial sum's.
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix entries must be finite")
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    squarings = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    a = a / 2.0**squarings

    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for j in range(1, 200):
        term = term @ a / j
        result = result + term
        if np.max(np.abs(term)) < tol * max(1.0, np.max(np.abs(result))):
            break
    for _ in range(squarings):
        result = result @ result
    return result
