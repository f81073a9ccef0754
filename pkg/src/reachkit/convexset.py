"""Support-function algebra over a small family of compact convex sets.

Every set variant evaluates its support function h_K(y) = sup over K of
<y, x> in closed form, and produces a maximizer (support point) for any
nonzero direction.  Zonotopes additionally get an exact volume via the
determinant-sum formula, and a sampled Hausdorff distance between support
functions rounds out the toolkit.

Arrays with object dtype (Fraction entries) run the exact-rational path
where the operation admits one (zonotope support and volume, linear
images, Minkowski sums); ellipsoid support involves a square root and is
float-valued regardless.

The support function of an intersection is an infimal convolution with no
closed form at this level; it is deliberately not an operation here.
"""

from __future__ import annotations

import itertools
import json
from collections import namedtuple
from fractions import Fraction
from math import ceil, comb, sqrt

import numpy as np

from .errors import (
    CombinatorialBudgetExceeded,
    DimensionMismatch,
    TooFewGenerators,
)
from .lti_core import IntegratorSystem, impulse_response
from ._util import is_exact_scalar, map_ordered

DEFAULT_SUBSET_CAP = 5_000_000
_DET_CHUNK = 200_000


def _as_array(v, ndim: int):
    a = np.asarray(v)
    if a.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {a.shape}")
    if a.dtype == object:
        return a
    return a.astype(float)


def _sign_plus(x):
    # tie-broken sign with sign(0) := +1, elementwise
    return np.where(np.asarray(x) >= 0, 1, -1)


class ConvexSet:
    """Base of the tagged union; subclasses implement the closed forms."""

    dim: int

    def support(self, y):
        raise NotImplementedError

    def support_point(self, y) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _check_direction(self, y) -> np.ndarray:
        a = _as_array(y, 1)
        if a.shape[0] != self.dim:
            raise DimensionMismatch(
                f"direction has dimension {a.shape[0]}, set has dimension {self.dim}")
        return a


class Singleton(ConvexSet):
    """A single point."""

    def __init__(self, point):
        self.point = _as_array(point, 1)
        self.dim = self.point.shape[0]

    def support(self, y):
        y = self._check_direction(y)
        return y @ self.point

    def support_point(self, y):
        self._check_direction(y)
        return self.point.copy()

    def to_dict(self):
        return {"type": "singleton", "point": [float(v) for v in self.point]}


class Box(ConvexSet):
    """Axis-aligned box: center plus componentwise halfwidths >= 0."""

    def __init__(self, center, halfwidths):
        self.center = _as_array(center, 1)
        self.halfwidths = _as_array(halfwidths, 1)
        if self.center.shape != self.halfwidths.shape:
            raise DimensionMismatch("center and halfwidths must match in length")
        if any(w < 0 for w in self.halfwidths):
            raise ValueError("halfwidths must be nonnegative")
        self.dim = self.center.shape[0]

    def support(self, y):
        y = self._check_direction(y)
        return y @ self.center + self.halfwidths @ np.abs(y)

    def support_point(self, y):
        y = self._check_direction(y)
        return self.center + _sign_plus(y) * self.halfwidths

    def to_dict(self):
        return {"type": "box",
                "center": [float(v) for v in self.center],
                "halfwidths": [float(v) for v in self.halfwidths]}


class Ellipsoid(ConvexSet):
    """Ellipsoid {c + Q^(1/2) u : |u| <= 1} given by its PSD shape matrix Q."""

    def __init__(self, center, shape):
        self.center = _as_array(center, 1)
        self.shape_matrix = np.asarray(shape, dtype=float)
        d = self.center.shape[0]
        if self.shape_matrix.shape != (d, d):
            raise DimensionMismatch("shape matrix must be d x d")
        if not np.allclose(self.shape_matrix, self.shape_matrix.T, atol=1e-10):
            raise ValueError("shape matrix must be symmetric")
        w = np.linalg.eigvalsh(self.shape_matrix)
        if w.min() < -1e-9 * max(1.0, abs(w.max())):
            raise ValueError("shape matrix must be positive semidefinite")
        self.dim = d

    def support(self, y):
        y = self._check_direction(y).astype(float)
        q = float(y @ self.shape_matrix @ y)
        return float(y @ self.center) + sqrt(max(q, 0.0))

    def support_point(self, y):
        y = self._check_direction(y).astype(float)
        q = float(y @ self.shape_matrix @ y)
        if q <= 0.0:
            return self.center.astype(float).copy()
        return self.center.astype(float) + (self.shape_matrix @ y) / sqrt(q)

    def to_dict(self):
        return {"type": "ellipsoid",
                "center": [float(v) for v in self.center],
                "shape": [[float(v) for v in row] for row in self.shape_matrix]}


class Zonotope(ConvexSet):
    """Minkowski sum of line segments: center + sum_j gamma_j v_j, |gamma_j| <= 1.

    generators is the n-by-d array of segment vectors v_j.
    """

    def __init__(self, center, generators):
        self.center = _as_array(center, 1)
        g = np.asarray(generators)
        if g.size == 0:
            g = g.reshape(0, self.center.shape[0])
        if g.ndim != 2 or g.shape[1] != self.center.shape[0]:
            raise DimensionMismatch(
                f"generators must be n x {self.center.shape[0]}, got {g.shape}")
        self.generators = g if g.dtype == object else g.astype(float)
        self.dim = self.center.shape[0]

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    def support(self, y):
        y = self._check_direction(y)
        if self.n_generators == 0:
            return y @ self.center
        return y @ self.center + np.abs(self.generators @ y).sum()

    def support_many(self, directions) -> np.ndarray:
        """Support values for a stack of directions (rows), float path."""
        D = np.asarray(directions, dtype=float)
        G = self.generators.astype(float)
        c = self.center.astype(float)
        return D @ c + np.abs(D @ G.T).sum(axis=1)

    def support_point(self, y):
        y = self._check_direction(y)
        if self.n_generators == 0:
            return self.center.copy()
        signs = _sign_plus(self.generators @ y)
        return self.center + signs @ self.generators

    def to_dict(self):
        return {"type": "zonotope",
                "center": [float(v) for v in self.center],
                "generators": [[float(v) for v in row] for row in self.generators]}


class LinearImage(ConvexSet):
    """M K + m for a matrix M, inner set K, and offset vector m."""

    def __init__(self, matrix, inner: ConvexSet, offset):
        self.matrix = _as_array(matrix, 2)
        self.inner = inner
        self.offset = _as_array(offset, 1)
        if self.matrix.shape[1] != inner.dim:
            raise DimensionMismatch("matrix columns must match the inner dimension")
        if self.matrix.shape[0] != self.offset.shape[0]:
            raise DimensionMismatch("matrix rows must match the offset length")
        self.dim = self.offset.shape[0]

    def support(self, y):
        y = self._check_direction(y)
        return y @ self.offset + self.inner.support(self.matrix.T @ y)

    def support_point(self, y):
        y = self._check_direction(y)
        return self.offset + self.matrix @ self.inner.support_point(self.matrix.T @ y)

    def to_dict(self):
        return {"type": "linear_image",
                "matrix": [[float(v) for v in row] for row in self.matrix],
                "offset": [float(v) for v in self.offset],
                "inner": self.inner.to_dict()}


class MinkowskiSum(ConvexSet):
    """Minkowski sum of member sets; support functions add."""

    def __init__(self, members):
        self.members = tuple(members)
        if not self.members:
            raise ValueError("MinkowskiSum needs at least one member")
        dims = {m.dim for m in self.members}
        if len(dims) != 1:
            raise DimensionMismatch(f"member dimensions differ: {sorted(dims)}")
        self.dim = self.members[0].dim

    def support(self, y):
        y = self._check_direction(y)
        return sum(m.support(y) for m in self.members)

    def support_point(self, y):
        y = self._check_direction(y)
        pts = [m.support_point(y) for m in self.members]
        return np.sum(pts, axis=0)

    def to_dict(self):
        return {"type": "minkowski_sum",
                "members": [m.to_dict() for m in self.members]}


_VARIANTS = {
    "singleton": lambda d: Singleton(d["point"]),
    "box": lambda d: Box(d["center"], d["halfwidths"]),
    "ellipsoid": lambda d: Ellipsoid(d["center"], d["shape"]),
    "zonotope": lambda d: Zonotope(d["center"], d["generators"]),
    "linear_image": lambda d: LinearImage(d["matrix"], from_dict(d["inner"]), d["offset"]),
    "minkowski_sum": lambda d: MinkowskiSum([from_dict(m) for m in d["members"]]),
}


def from_dict(data: dict) -> ConvexSet:
    """Rebuild a set from its to_dict() form."""
    kind = data.get("type")
    if kind not in _VARIANTS:
        raise ValueError(f"unknown set type {kind!r}")
    return _VARIANTS[kind](data)


def to_json(s: ConvexSet) -> str:
    return json.dumps(s.to_dict())


def from_json(text: str) -> ConvexSet:
    return from_dict(json.loads(text))


def _det_exact(rows) -> Fraction:
    # Gaussian elimination in exact rationals; rows is a list of lists
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def zonotope_volume(z: Zonotope, cap: int = DEFAULT_SUBSET_CAP):
    """Volume 2^d * sum over d-subsets of |det(v_j1 | ... | v_jd)|.

    Exact (Fraction) for object-dtype generators, float otherwise; float
    summation is chunked with numpy's pairwise reduction in a fixed index
    order, so results do not depend on execution layout.  Raises
    TooFewGenerators when n < d and CombinatorialBudgetExceeded when the
    number of subsets C(n, d) exceeds cap.  Rank-deficient generator sets
    with n >= d legitimately return 0.
    """
    G = z.generators
    n, d = G.shape
    if n < d:
        raise TooFewGenerators(f"{n} generators cannot span dimension {d}")
    subsets = comb(n, d)
    if subsets > cap:
        raise CombinatorialBudgetExceeded(
            f"C({n},{d}) = {subsets} subsets exceeds cap {cap}")
    if G.dtype == object:
        total = Fraction(0)
        for idx in itertools.combinations(range(n), d):
            total += abs(_det_exact([G[i] for i in idx]))
        return 2 ** d * total
    Gf = G.astype(float)
    it = itertools.combinations(range(n), d)
    total = 0.0
    remaining = subsets
    while remaining:
        take = min(_DET_CHUNK, remaining)
        idx = np.fromiter(it, dtype=np.dtype((np.intp, d)), count=take)
        total += float(np.abs(np.linalg.det(Gf[idx])).sum())
        remaining -= take
    return 2.0 ** d * total


def discretize_reach(sys: IntegratorSystem, t, n: int) -> Zonotope:
    """Zonotope on the closed uniform grid: n+1 generators (mu t / n) e^(t_i A) b.

    The grid points are t_i = i t / n for i = 0..n, the center is the
    origin, and the support function converges uniformly to the reach-set
    support as n grows.  Exact generators for exact (mu, t).
    """
    if not t > 0:
        raise ValueError(f"horizon must be positive, got {t!r}")
    if n < 1:
        raise ValueError(f"need n >= 1 grid cells, got {n}")
    exact = is_exact_scalar(t) and is_exact_scalar(sys.mu)
    if exact:
        scale = Fraction(sys.mu) * Fraction(t) / n
        rows = [scale * impulse_response(sys, Fraction(t) * i / n) for i in range(n + 1)]
        gens = np.array([list(r) for r in rows], dtype=object)
        center = np.array([Fraction(0)] * sys.d, dtype=object)
    else:
        tf = float(t)
        scale = float(sys.mu) * tf / n
        gens = np.array([scale * impulse_response(sys, tf * i / n) for i in range(n + 1)])
        center = np.zeros(sys.d)
    return Zonotope(center, gens)


def sphere_directions(d: int, count: int, seed: int = 0, include=()) -> np.ndarray:
    """Deterministic, antipodally-closed unit directions on the (d-1)-sphere.

    Always contains +-e_i and the normalized +-v for every v in include;
    the rest come from a uniform angle grid (d = 2), a spiral lattice
    (d = 3), or seeded Philox normals (d > 3).  At least count directions
    are returned.
    """
    if d < 2:
        raise ValueError("need dimension >= 2")
    if count < 1:
        raise ValueError("need count >= 1")
    base = []
    eye = np.eye(d)
    for i in range(d):
        base.append(eye[i])
        base.append(-eye[i])
    for v in include:
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        if nv == 0:
            raise ValueError("include directions must be nonzero")
        base.append(v / nv)
        base.append(-v / nv)
    half = max(0, ceil((count - len(base)) / 2))
    gen = []
    if half and d == 2:
        # offset grid avoids duplicating the axes already present
        thetas = np.pi * (np.arange(half) + 0.5) / half
        gen = list(np.column_stack([np.cos(thetas), np.sin(thetas)]))
    elif half and d == 3:
        j = np.arange(half)
        zs = (j + 0.5) / half
        rs = np.sqrt(1.0 - zs ** 2)
        phis = j * np.pi * (3.0 - np.sqrt(5.0))
        gen = list(np.column_stack([rs * np.cos(phis), rs * np.sin(phis), zs]))
    elif half:
        rng = np.random.Generator(np.random.Philox(seed))
        X = rng.standard_normal((half, d))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        gen = list(X)
    dirs = base + [g for v in gen for g in (v, -v)]
    return np.asarray(dirs)


HausdorffEstimate = namedtuple("HausdorffEstimate", ["value", "direction"])


def hausdorff_distance(h1, h2, samples: int, d: int, include=(), seed: int = 0,
                       threads: int | None = None) -> HausdorffEstimate:
    """Sampled Hausdorff distance between two support functions.

    For compact convex sets the distance is the supremum of |h1 - h2| over
    the unit sphere; sampling over a deterministic antipodally-closed
    direction set yields a lower bound, reported with its maximizing
    direction.
    """
    if samples < 1:
        raise ValueError("need samples >= 1")
    dirs = sphere_directions(d, samples, seed=seed, include=include)
    gaps = map_ordered(lambda eta: abs(float(h1(eta)) - float(h2(eta))), dirs, threads)
    k = int(np.argmax(gaps))
    return HausdorffEstimate(float(gaps[k]), dirs[k])
