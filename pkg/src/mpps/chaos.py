"""Coupled chaotic maps and the quantizers that turn their orbits into keystreams.

Two one-dimensional maps drive every keystream of the cipher:

* CLS (coupled logistic-sine)::

      x -> mu*x*(1-x) + (4-mu)/4 * sin(pi*x)   (mod 1)

* CLT (coupled logistic-tent)::

      x -> mu*x*(1-x) + (4-mu)/2 * x       (mod 1)   if x < 0.5
      x -> mu*x*(1-x) + (4-mu)/2 * (1-x)   (mod 1)   otherwise

All arithmetic is IEEE double precision with the evaluation order written
above (logistic term, coupling term, sum, then reduction into [0, 1)).
Orbits are produced with a scalar loop over :func:`math.sin` rather than
numpy ufuncs so the bits do not depend on which SIMD kernels numpy picked.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "MapKind",
    "SubKey",
    "iterate_cls",
    "iterate_clt",
    "iterate",
    "generate_orbit",
    "sort_index",
    "quantize_mod",
    "quantize_orbit",
    "binarize",
    "parity",
    "binarize_orbit",
    "DEFAULT_TRANSIENT",
]

#: Transient length used throughout the reference worked example.
DEFAULT_TRANSIENT = 500

_SCALE = 1e14


class MapKind(enum.Enum):
    CLS = "cls"
    CLT = "clt"


@dataclass(frozen=True)
class SubKey:
    """One (initial value, control parameter, transient length) triple."""

    y0: float
    mu: float
    transient: int = DEFAULT_TRANSIENT

    def __post_init__(self):
        _check_state(self.y0)
        _check_mu(self.mu)
        if int(self.transient) != self.transient or self.transient < 0:
            raise ParameterError(f"transient must be a non-negative integer, got {self.transient!r}")


def _check_state(x):
    if not (0.0 <= x <= 1.0):
        raise ParameterError(f"state {x!r} outside [0, 1]")


def _check_mu(mu):
    if not (0.0 <= mu <= 4.0):
        raise ParameterError(f"control parameter {mu!r} outside [0, 4]")


def _cls(x, mu):
    # the state 1 is the state 0 on the circle; sin(pi * 1.0) is not exactly 0 in doubles
    if x == 1.0:
        x = 0.0
    return (mu * x * (1 - x) + 0.25 * (4 - mu) * math.sin(math.pi * x)) % 1.0


def _clt(x, mu):
    if x < 0.5:
        return (mu * x * (1 - x) + 0.5 * (4 - mu) * x) % 1.0
    return (mu * x * (1 - x) + 0.5 * (4 - mu) * (1 - x)) % 1.0


_MAPS = {MapKind.CLS: _cls, MapKind.CLT: _clt}


def iterate_cls(x: float, mu: float) -> float:
    """One step of the coupled logistic-sine map."""
    _check_state(x)
    _check_mu(mu)
    return _cls(x, mu)


def iterate_clt(x: float, mu: float) -> float:
    """One step of the coupled logistic-tent map."""
    _check_state(x)
    _check_mu(mu)
    return _clt(x, mu)


def iterate(kind: MapKind, x: float, mu: float) -> float:
    return iterate_cls(x, mu) if MapKind(kind) is MapKind.CLS else iterate_clt(x, mu)


def generate_orbit(kind: MapKind, key: SubKey, count: int) -> np.ndarray:
    """Return ``count`` consecutive states after the transient.

    The initial value counts as state 0, so the first returned state is the
    one reached after exactly ``key.transient`` iterations.  With
    ``transient=0`` the (mod-1 reduced) initial value itself is returned
    first.
    """
    if count <= 0:
        raise ParameterError(f"count must be positive, got {count}")
    f = _MAPS[MapKind(kind)]
    mu = key.mu
    x = key.y0 % 1.0
    for _ in range(key.transient):
        x = f(x, mu)
    out = np.empty(count, dtype=np.float64)
    out[0] = x
    for i in range(1, count):
        x = f(x, mu)
        out[i] = x
    return out


def sort_index(orbit) -> np.ndarray:
    """1-based ascending sort index: ``orbit[S[0]-1]`` is the smallest state.

    Ties keep their original order.
    """
    orbit = np.asarray(orbit, dtype=np.float64)
    if orbit.size == 0:
        raise ParameterError("cannot sort an empty orbit")
    return np.argsort(orbit, kind="stable").astype(np.int64) + 1


def quantize_mod(x: float, m: int) -> int:
    """``floor(x * 1e14) mod m``."""
    if not (0.0 <= x < 1.0):
        raise ParameterError(f"state {x!r} outside [0, 1)")
    return math.floor(x * _SCALE) % m


def quantize_orbit(orbit, m: int) -> np.ndarray:
    """Vectorised :func:`quantize_mod`; products stay below 2**53 so the floor is exact."""
    orbit = np.asarray(orbit, dtype=np.float64)
    if orbit.size and (orbit.min() < 0.0 or orbit.max() >= 1.0):
        raise ParameterError("orbit states must lie in [0, 1)")
    return np.floor(orbit * _SCALE).astype(np.int64) % m


def binarize(x: float) -> int:
    """Threshold quantizer: 0 on [0, 0.5], 1 on (0.5, 1)."""
    return 0 if x <= 0.5 else 1


def parity(x: float) -> int:
    """Parity quantizer ``floor(x * 1e14) mod 2``."""
    return quantize_mod(x, 2)


def binarize_orbit(orbit, method: str = "parity") -> np.ndarray:
    """Turn an orbit into a bit array with either ``"parity"`` or ``"threshold"``.

    ``"parity"`` is what reproduces the reference complement sequence for
    the worked-example key; ``"threshold"`` is the textbook 0.5 cut.
    """
    orbit = np.asarray(orbit, dtype=np.float64)
    if method == "parity":
        return quantize_orbit(orbit, 2).astype(np.uint8)
    if method == "threshold":
        return (orbit > 0.5).astype(np.uint8)
    raise ParameterError(f"unknown binarization method {method!r}")
