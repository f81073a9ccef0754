"""Univariate polynomial arithmetic, real-root isolation, and |p| integration.

Degrees stay tiny here (at most the chain dimension minus one), so root
isolation is done by recursive bisection: the real roots of p' split the
interval into monotone pieces, each holding at most one root of p.  That
gives completeness, including even-multiplicity touch points, without any
companion-matrix machinery.

Coefficients may be floats or exact scalars (int/Fraction); antiderivatives
and definite integrals stay exact for exact inputs.  Root locations are
always floats, bracketed to a requested width.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateZeroPolynomial
from ._util import exact_div


class Polynomial:
    """Univariate polynomial; coefficients ascending, trailing zeros stripped."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        coeffs = list(coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients = tuple(coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"Polynomial({list(self.coefficients)!r})"

    def __mul__(self, scalar):
        return Polynomial(c * scalar for c in self.coefficients)

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-c for c in self.coefficients)

    def __add__(self, other):
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Polynomial(out)

    def derivative(self) -> "Polynomial":
        return Polynomial(k * c for k, c in enumerate(self.coefficients) if k > 0)

    def antiderivative(self) -> "Polynomial":
        """Antiderivative with zero constant term; exact for exact coefficients."""
        out = [0]
        out.extend(exact_div(c, k + 1) for k, c in enumerate(self.coefficients))
        return Polynomial(out)


@dataclass(frozen=True)
class SignPartition:
    """Sign structure of a polynomial on (lo, hi).

    breakpoints are the interior roots in increasing order; signs[k] is the
    sign (+1 or -1) on the k-th open subinterval, so len(signs) equals
    len(breakpoints) + 1.
    """

    lo: float
    hi: float
    breakpoints: tuple
    signs: tuple


def _float_eval(coeffs, x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _bisect(coeffs, a: float, b: float, fa: float, tol: float) -> float:
    # fa and f(b) have strictly opposite signs on entry
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break  # float resolution reached
        fm = _float_eval(coeffs, m)
        if fm == 0.0:
            return m
        if (fa > 0) != (fm > 0):
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def roots_in_interval(p: Polynomial, lo, hi, tol: float | None = None) -> list:
    """All real roots of p in the open interval (lo, hi), each to width <= tol.

    Multiple roots are reported once.  The default tolerance is
    1e-12 * (hi - lo).  Raises DegenerateZeroPolynomial for p == 0.
    """
    if p.is_zero:
        raise DegenerateZeroPolynomial("cannot isolate roots of the zero polynomial")
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    if tol is None:
        tol = 1e-12 * (hi - lo)
    if tol <= 0:
        raise ValueError("tol must be positive")

    coeffs = [float(c) for c in p.coefficients]
    deg = len(coeffs) - 1
    if deg == 0:
        return []
    if deg == 1:
        r = -coeffs[0] / coeffs[1]
        return [r] if lo < r < hi else []

    # |p| scale on the interval bounds the "numerically zero" threshold
    bound = max(1.0, abs(lo), abs(hi))
    scale = sum(abs(c) * bound ** k for k, c in enumerate(coeffs))
    ztol = 1e-13 * scale

    crit = roots_in_interval(p.derivative(), lo, hi, tol)
    nodes = [lo] + crit + [hi]
    values = [_float_eval(coeffs, x) for x in nodes]

    roots = []
    for x, fx in zip(nodes[1:-1], values[1:-1]):
        if abs(fx) <= ztol:
            roots.append(x)  # even-multiplicity touch or exact hit at a critical point
    for (a, b), (fa, fb) in zip(zip(nodes, nodes[1:]), zip(values, values[1:])):
        if abs(fa) <= ztol or abs(fb) <= ztol:
            continue  # the zero endpoint already accounts for the crossing
        if (fa > 0) != (fb > 0):
            roots.append(_bisect(coeffs, a, b, fa, tol))

    roots.sort()
    merged = []
    for r in roots:
        if not merged or r - merged[-1] > tol:
            merged.append(r)
    return merged


def sign_partition(p: Polynomial, lo, hi, tol: float | None = None) -> SignPartition:
    """Split (lo, hi) at the roots of p and record the sign of each piece."""
    breakpoints = roots_in_interval(p, lo, hi, tol)
    nodes = [float(lo)] + breakpoints + [float(hi)]
    coeffs = [float(c) for c in p.coefficients]
    signs = []
    for a, b in zip(nodes, nodes[1:]):
        s = 0.0
        # probe inward from the midpoint in case it lands exactly on a root
        for frac in (0.5, 0.25, 0.75, 0.125):
            s = _float_eval(coeffs, a + frac * (b - a))
            if s != 0.0:
                break
        signs.append(1 if s >= 0 else -1)
    return SignPartition(float(lo), float(hi), tuple(breakpoints), tuple(signs))


def integrate_abs(p: Polynomial, t, tol: float | None = None):
    """Integral of |p(s)| over [0, t], splitting at the isolated roots.

    Each signed segment uses the exact polynomial antiderivative, so the
    only error source is root location; an identically-zero p integrates
    to 0.  Exact inputs with no interior sign change return exact values.
    """
    if p.is_zero:
        return 0
    if not t > 0:
        raise ValueError(f"horizon must be positive, got {t!r}")
    part = sign_partition(p, 0, t, tol)
    anti = p.antiderivative()
    nodes = [0, *part.breakpoints, t]
    total = 0
    for a, b, sgn in zip(nodes, nodes[1:], part.signs):
        total = total + sgn * (anti(b) - anti(a))
    return total


def definite_integral(p: Polynomial, lo, hi):
    """Antiderivative difference over [lo, hi]; exact for exact inputs."""
    anti = p.antiderivative()
    return anti(hi) - anti(lo)
