"""Chain-of-integrators dynamics with bounded scalar control.

The system is dx/dt = A x + b u with A the d-by-d upper-shift matrix,
b = e_d, and |u| <= mu.  Everything here is closed form: the state
transition matrix is the truncated exponential series of a nilpotent
matrix, the impulse response e^(sA) b has entries s^k / k!, and its
running integral (the unit step response) has entries t^(k+1) / (k+1)!.

Scalars are generic over two backends: pass int/Fraction arguments to
stay in exact rational arithmetic (object-dtype arrays of Fractions),
pass floats for the double-precision path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .errors import ControlBoundViolation, DimensionMismatch
from ._util import is_exact_scalar


@dataclass(frozen=True)
class IntegratorSystem:
    """An integrator chain of dimension d with control bound mu > 0."""

    d: int
    mu: float | int | Fraction

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.d!r}")
        if not self.mu > 0:
            raise ValueError(f"control bound must be positive, got {self.mu!r}")


def state_transition(sys: IntegratorSystem, t) -> np.ndarray:
    """exp(tA): upper triangular, ones on the diagonal, t^(j-i)/(j-i)! above.

    Exact (Fraction entries) when t is an int or Fraction; valid for t < 0
    as well, where the same entries give the inverse flow.
    """
    d = sys.d
    if is_exact_scalar(t):
        tq = Fraction(t)
        out = np.full((d, d), Fraction(0), dtype=object)
        for i in range(d):
            for j in range(i, d):
                out[i, j] = tq ** (j - i) / factorial(j - i)
        return out
    out = np.zeros((d, d))
    for i in range(d):
        for j in range(i, d):
            out[i, j] = t ** (j - i) / factorial(j - i)
    return out


def impulse_response(sys: IntegratorSystem, s) -> np.ndarray:
    """e^(sA) b, the last column of the transition matrix.

    Entry i (0-indexed) is s^(d-1-i) / (d-1-i)!; at s = 0 this is e_d.
    """
    d = sys.d
    if is_exact_scalar(s):
        sq = Fraction(s)
        return np.array([sq ** (d - 1 - i) / factorial(d - 1 - i) for i in range(d)],
                        dtype=object)
    return np.array([s ** (d - 1 - i) / factorial(d - 1 - i) for i in range(d)])


def step_response(sys: IntegratorSystem, t) -> np.ndarray:
    """Integral of the impulse response over [0, t], entry i = t^(d-i)/(d-i)!.

    This is the state reached from the origin under constant unit control,
    and the componentwise derivative in t is impulse_response(sys, t).
    """
    d = sys.d
    if is_exact_scalar(t):
        tq = Fraction(t)
        return np.array([tq ** (d - i) / factorial(d - i) for i in range(d)],
                        dtype=object)
    return np.array([t ** (d - i) / factorial(d - i) for i in range(d)])


def propagate(sys: IntegratorSystem, x0, controls) -> np.ndarray:
    """Exact endpoint under a piecewise-constant control signal.

    controls is a sequence of (duration, u) segments applied in order;
    per segment x <- exp(tau A) x + u * step_response(tau).  Raises
    ControlBoundViolation if any |u| exceeds sys.mu; durations must be
    nonnegative.
    """
    x = np.asarray(x0)
    if x.shape != (sys.d,):
        raise DimensionMismatch(f"initial state has shape {x.shape}, expected ({sys.d},)")
    for tau, u in controls:
        if tau < 0:
            raise ValueError(f"segment duration must be nonnegative, got {tau!r}")
        if abs(u) > sys.mu:
            raise ControlBoundViolation(f"|u| = {abs(u)} exceeds bound {sys.mu}")
        x = state_transition(sys, tau) @ x + u * step_response(sys, tau)
    return x
