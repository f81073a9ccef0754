"""Forward reach set of the integrator chain: support function and geometry.

The reach set at horizon t from initial set X0 is the affine image
e^(tA) X0 Minkowski-summed with the set swept by the bounded control.
Its support in direction y splits into the X0 term plus
mu * integral over [0, t] of |<y, e^(sA) b>| ds, an |polynomial|
integral that polytools evaluates by splitting at sign changes.

Width, diameter (with its closed form 2 mu ||step_response(t)|| for a
point X0), and exporters for boundary points, tube slices, and width
profiles all derive from that support function.
"""

from __future__ import annotations

import json
from collections import namedtuple
from dataclasses import dataclass
from math import atan2, factorial, pi

import numpy as np

from .convexset import ConvexSet, Singleton, sphere_directions
from .errors import DimensionMismatch, UnsupportedInitialSet, ZeroDirection
from .lti_core import IntegratorSystem, state_transition, step_response
from .polytools import Polynomial, integrate_abs, sign_partition
from ._util import exact_div, map_ordered


@dataclass(frozen=True)
class ReachSpec:
    """Reach-set problem data: system, initial set, positive horizon."""

    sys: IntegratorSystem
    x0set: ConvexSet
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"horizon must be positive, got {self.t!r}")
        if self.x0set.dim != self.sys.d:
            raise DimensionMismatch(
                f"initial set dimension {self.x0set.dim} != system dimension {self.sys.d}")

    @property
    def is_singleton(self) -> bool:
        return isinstance(self.x0set, Singleton)


def direction_polynomial(sys: IntegratorSystem, y) -> Polynomial:
    """<y, e^(sA) b> as a polynomial in s: coefficient of s^k is y[d-1-k]/k!."""
    y = np.asarray(y)
    if y.shape != (sys.d,):
        raise DimensionMismatch(f"direction has shape {y.shape}, expected ({sys.d},)")
    return Polynomial([exact_div(y[sys.d - 1 - k], factorial(k)) for k in range(sys.d)])


def reach_support(spec: ReachSpec, y):
    """Support of the reach set: X0 term plus the control sweep integral."""
    y = np.asarray(y)
    if y.shape != (spec.sys.d,):
        raise DimensionMismatch(f"direction has shape {y.shape}, expected ({spec.sys.d},)")
    M = state_transition(spec.sys, spec.t)
    x0_term = spec.x0set.support(M.T @ y)
    p = direction_polynomial(spec.sys, y)
    if p.is_zero:
        return x0_term
    return x0_term + spec.sys.mu * integrate_abs(p, spec.t)


def width(spec: ReachSpec, eta) -> float:
    """Slab thickness of the reach set in direction eta (normalized if needed).

    For a point X0 the two support terms cancel and the width reduces to
    2 mu * integral of |<eta, e^(sA) b>|; general X0 uses two support calls.
    """
    eta = np.asarray(eta, dtype=float)
    nrm = float(np.linalg.norm(eta))
    if nrm == 0.0:
        raise ZeroDirection("width needs a nonzero direction")
    if abs(nrm - 1.0) > 1e-9:
        eta = eta / nrm
    if spec.is_singleton:
        p = direction_polynomial(spec.sys, eta)
        if p.is_zero:
            return 0.0
        return 2.0 * float(spec.sys.mu) * float(integrate_abs(p, spec.t))
    return float(reach_support(spec, eta)) + float(reach_support(spec, -eta))


DiameterResult = namedtuple("DiameterResult", ["value", "direction"])
SampledDiameter = namedtuple("SampledDiameter", ["value", "direction", "is_lower_bound"])


def diameter(spec: ReachSpec) -> DiameterResult:
    """Maximal width 2 mu ||step_response(t)||_2 and its maximizer direction.

    The closed form holds for a point X0 (the quantity is translation
    invariant); other initial sets raise UnsupportedInitialSet, see
    diameter_sampled for those.
    """
    if not spec.is_singleton:
        raise UnsupportedInitialSet(
            "closed-form diameter requires a singleton initial set")
    z = step_response(spec.sys, float(spec.t)).astype(float)
    nz = float(np.linalg.norm(z))
    return DiameterResult(2.0 * float(spec.sys.mu) * nz, z / nz)


def diameter_sampled(spec: ReachSpec, samples: int = 4096, seed: int = 0,
                     threads: int | None = None) -> SampledDiameter:
    """Sampled max-width lower bound for arbitrary initial sets."""
    z = step_response(spec.sys, float(spec.t)).astype(float)
    dirs = sphere_directions(spec.sys.d, samples, seed=seed, include=[z])
    widths = map_ordered(lambda e: width(spec, e), dirs, threads)
    k = int(np.argmax(widths))
    return SampledDiameter(float(widths[k]), dirs[k], True)


@dataclass(frozen=True)
class WidthProfile:
    """Widths over a direction grid, with the indices achieving the max.

    For d = 2 the directions come from the angle grid theta_k = 2 pi k/grid
    and thetas/analytic_max_thetas are populated; higher dimensions use the
    sphere sampler and leave them None.
    """

    directions: np.ndarray
    widths: np.ndarray
    maximizers: tuple
    thetas: np.ndarray | None = None
    analytic_max_thetas: tuple | None = None


def width_profile(spec: ReachSpec, grid: int, threads: int | None = None) -> WidthProfile:
    """Width of the reach set over a full direction grid.

    In the plane the profile is pi-periodic and, for a point X0, its
    maxima sit at theta = r pi + arctan(2/t); the grid maximum is checked
    to land within one grid cell of them.
    """
    if grid < 8:
        raise ValueError(f"need grid >= 8, got {grid}")
    d = spec.sys.d
    if d == 2:
        thetas = 2.0 * pi * np.arange(grid) / grid
        dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    else:
        thetas = None
        z = step_response(spec.sys, float(spec.t)).astype(float)
        dirs = sphere_directions(d, grid, include=[z])
    widths = np.array(map_ordered(lambda e: width(spec, e), dirs, threads))
    wmax = float(widths.max())
    maximizers = tuple(int(i) for i in np.nonzero(widths >= wmax * (1.0 - 1e-12))[0])
    analytic = None
    if d == 2 and spec.is_singleton:
        base = atan2(2.0, float(spec.t))
        analytic = (base, base + pi)
        cell = 2.0 * pi / grid
        for k in maximizers:
            gap = min(abs((float(thetas[k]) - target + pi) % (2.0 * pi) - pi)
                      for target in analytic)
            if gap > cell:
                raise RuntimeError(
                    f"grid maximizer theta={thetas[k]:.6f} misses every analytic "
                    f"maximizer by {gap:.3e} > one cell {cell:.3e}")
    return WidthProfile(dirs, widths, maximizers, thetas, analytic)


def extremal_control(spec: ReachSpec, eta) -> list:
    """Bang-bang control whose endpoint is the support point along eta.

    The optimal input at forward time tau is mu * sign(<eta, e^((t-tau)A) b>),
    so the sign partition of the direction polynomial, traversed in reverse,
    gives the (duration, u) segments.  Breakpoints carry no measure, so the
    open-interval signs are the whole story.
    """
    p = direction_polynomial(spec.sys, np.asarray(eta, dtype=float))
    if p.is_zero:
        return [(float(spec.t), 0.0)]
    part = sign_partition(p, 0.0, float(spec.t))
    nodes = [0.0, *part.breakpoints, float(spec.t)]
    mu = float(spec.sys.mu)
    segments = [(b - a, mu * s) for a, b, s in zip(nodes, nodes[1:], part.signs)]
    return [(dur, u) for dur, u in reversed(segments)]


def _extremal_point(spec: ReachSpec, eta) -> np.ndarray:
    sys, t = spec.sys, float(spec.t)
    p = direction_polynomial(sys, eta)
    base = state_transition(sys, t).astype(float) @ spec.x0set.point.astype(float)
    if p.is_zero:
        return base
    part = sign_partition(p, 0.0, t)
    nodes = [0.0, *part.breakpoints, t]
    acc = np.zeros(sys.d)
    for a, b, s in zip(nodes, nodes[1:], part.signs):
        acc += s * (step_response(sys, b) - step_response(sys, a))
    return base + float(sys.mu) * acc


def boundary_points(spec: ReachSpec, samples: int, threads: int | None = None) -> list:
    """(direction, extremal point) pairs tracing the reach-set boundary.

    Each point is the endpoint of the bang-bang extremal for its outward
    normal, so <eta, point> equals the support value along eta.  Requires a
    singleton X0 and at least 4 samples.
    """
    if not spec.is_singleton:
        raise UnsupportedInitialSet("boundary extremals require a singleton initial set")
    if samples < 4:
        raise ValueError(f"need samples >= 4, got {samples}")
    d = spec.sys.d
    if d == 2:
        thetas = 2.0 * pi * np.arange(samples) / samples
        dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    else:
        z = step_response(spec.sys, float(spec.t)).astype(float)
        dirs = sphere_directions(d, samples, include=[z])
    pts = map_ordered(lambda e: _extremal_point(spec, e), dirs, threads)
    return list(zip(list(dirs), pts))


def tube_slices(spec: ReachSpec, slices: int, samples: int,
                threads: int | None = None) -> list:
    """Boundary samples of the reach sets at tau_k = k t / slices, k = 1..slices.

    The tau = 0 slice degenerates to the initial point and is omitted; the
    final slice coincides with boundary_points at the full horizon.
    """
    if slices < 2:
        raise ValueError(f"need slices >= 2, got {slices}")
    out = []
    for k in range(1, slices + 1):
        tau = float(spec.t) * k / slices
        sub = ReachSpec(spec.sys, spec.x0set, tau)
        out.append((tau, boundary_points(sub, samples, threads)))
    return out


def _fmt(v: float) -> str:
    return f"{float(v):.10g}"


def width_profile_csv(profile: WidthProfile) -> str:
    """CSV text for a width profile: theta,width in the plane, else eta_i,width."""
    lines = []
    if profile.thetas is not None:
        lines.append("theta,width")
        for th, w in zip(profile.thetas, profile.widths):
            lines.append(f"{_fmt(th)},{_fmt(w)}")
    else:
        d = profile.directions.shape[1]
        lines.append(",".join(f"eta_{i+1}" for i in range(d)) + ",width")
        for eta, w in zip(profile.directions, profile.widths):
            lines.append(",".join(_fmt(v) for v in eta) + f",{_fmt(w)}")
    return "\n".join(lines) + "\n"


def width_profile_json(profile: WidthProfile) -> str:
    data = {
        "directions": [[float(_fmt(v)) for v in eta] for eta in profile.directions],
        "widths": [float(_fmt(w)) for w in profile.widths],
        "maximizers": list(profile.maximizers),
    }
    if profile.thetas is not None:
        data["thetas"] = [float(_fmt(v)) for v in profile.thetas]
        data["analytic_max_thetas"] = [float(_fmt(v)) for v in profile.analytic_max_thetas]
    return json.dumps(data, indent=2) + "\n"


def boundary_csv(slices) -> str:
    """CSV rows tau,x_1..x_d,eta_1..eta_d for slice data or a single slice.

    Accepts either the output of tube_slices or a (tau, points) pair.
    """
    if isinstance(slices, tuple):
        slices = [slices]
    d = len(slices[0][1][0][1])
    head = (["tau"] + [f"x_{i+1}" for i in range(d)] + [f"eta_{i+1}" for i in range(d)])
    lines = [",".join(head)]
    for tau, pairs in slices:
        for eta, pt in pairs:
            row = [_fmt(tau)] + [_fmt(v) for v in pt] + [_fmt(v) for v in eta]
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def boundary_json(slices) -> str:
    if isinstance(slices, tuple):
        slices = [slices]
    data = [{
        "tau": float(_fmt(tau)),
        "points": [[float(_fmt(v)) for v in pt] for _, pt in pairs],
        "directions": [[float(_fmt(v)) for v in eta] for eta, _ in pairs],
    } for tau, pairs in slices]
    return json.dumps(data, indent=2) + "\n"
