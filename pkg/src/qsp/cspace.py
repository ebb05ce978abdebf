"""Configuration spaces built as products of planar factors.

Configurations are flat float arrays in factor order.  Angles are stored in
[-pi, pi).  A quotient decomposition is a chain of product spaces where each
level's coordinates are a prefix of the next level's; projection drops the
fiber coordinates and lifting concatenates them back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidConfigurationError, InvalidLevelError, InvalidParameterError
from .geometry import TWO_PI, wrap_angle

BOUNDS_TOL = 1e-9


class Axis(NamedTuple):
    """One coordinate of a product space: an interval or a planar angle."""

    kind: str  # "interval" | "angle"
    lower: float
    upper: float
    weight: float = 1.0


@dataclass(frozen=True)
class EuclideanBox:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise InvalidParameterError("box bounds must be non-empty and of equal length")
        for a, b in zip(lo, hi):
            if not (math.isfinite(a) and math.isfinite(b) and a < b):
                raise InvalidParameterError(f"invalid box bounds [{a}, {b}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return len(self.lower)

    def axes(self, weight=1.0):
        return [Axis("interval", a, b, weight) for a, b in zip(self.lower, self.upper)]


@dataclass(frozen=True)
class Rotation2D:
    dim: int = field(default=1, init=False)

    def axes(self, weight=1.0):
        return [Axis("angle", -math.pi, math.pi, weight)]


@dataclass(frozen=True)
class RigidBody2D:
    """Planar rigid-body placement: a 2-D box of positions times a rotation."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        box = EuclideanBox(self.lower, self.upper)
        if box.dim != 2:
            raise InvalidParameterError("RigidBody2D needs 2-D position bounds")
        object.__setattr__(self, "lower", box.lower)
        object.__setattr__(self, "upper", box.upper)

    @property
    def dim(self):
        return 3

    def axes(self, weight=1.0):
        return EuclideanBox(self.lower, self.upper).axes(weight) + Rotation2D().axes(weight)


class ProductSpace:
    """Ordered product of factors with a weighted product metric.

    ``distance(a, b) = sqrt(sum_f w_f * d_f(a, b)^2)`` where ``d_f`` is the
    Euclidean distance on box factors and the geodesic angle on rotations.
    """

    def __init__(self, factors, weights=None):
        factors = tuple(factors)
        if weights is None:
            weights = (1.0,) * len(factors)
        weights = tuple(float(w) for w in weights)
        if len(weights) != len(factors):
            raise InvalidParameterError("one weight per factor required")
        if any(not (w > 0 and math.isfinite(w)) for w in weights):
            raise InvalidParameterError("metric weights must be positive")
        self.factors = factors
        self.weights = weights
        self.axes = tuple(ax for f, w in zip(factors, weights) for ax in f.axes(w))
        self.dim = len(self.axes)
        self.angle_mask = np.array([a.kind == "angle" for a in self.axes], dtype=bool)
        self.lower = np.array([a.lower for a in self.axes], dtype=float)
        self.upper = np.array([a.upper for a in self.axes], dtype=float)
        self.axis_weights = np.array([a.weight for a in self.axes], dtype=float)
        self._has_angles = bool(self.angle_mask.any())

    @classmethod
    def from_axes(cls, axes) -> ProductSpace:
        """Regroup axes into factors: runs of equally weighted intervals become boxes."""
        factors, weights = [], []
        run = []

        def flush():
            if run:
                factors.append(EuclideanBox([a.lower for a in run], [a.upper for a in run]))
                weights.append(run[0].weight)
                run.clear()

        for ax in axes:
            if ax.kind == "angle":
                flush()
                factors.append(Rotation2D())
                weights.append(ax.weight)
            else:
                if run and run[0].weight != ax.weight:
                    flush()
                run.append(ax)
        flush()
        return cls(factors, weights)

    def __eq__(self, other):
        return isinstance(other, ProductSpace) and self.axes == other.axes

    def __hash__(self):
        return hash(self.axes)

    def __repr__(self):
        return f"ProductSpace({list(self.factors)!r}, weights={list(self.weights)!r})"

    # -- points -----------------------------------------------------------------
    def normalize(self, q):
        q = np.array(q, dtype=float)
        if self._has_angles:
            q[..., self.angle_mask] = wrap_angle(q[..., self.angle_mask])
        return q

    def check(self, q):
        """Return ``q`` as a normalized array; raise if it is not in the space."""
        q = np.asarray(q, dtype=float)
        if q.shape != (self.dim,):
            raise InvalidConfigurationError(f"expected {self.dim} coordinates, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise InvalidConfigurationError("non-finite coordinate")
        q = self.normalize(q)
        lin = ~self.angle_mask
        if np.any(q[lin] < self.lower[lin] - BOUNDS_TOL) or np.any(q[lin] > self.upper[lin] + BOUNDS_TOL):
            raise InvalidConfigurationError("coordinate outside its bounds")
        return q

    def contains(self, q):
        try:
            self.check(q)
        except InvalidConfigurationError:
            return False
        return True

    def sample_uniform(self, rng, n=None):
        size = (self.dim,) if n is None else (n, self.dim)
        return self.lower + rng.random(size) * (self.upper - self.lower)

    def difference(self, a, b):
        """Tangent vector from ``a`` to ``b`` (shortest arc on angles)."""
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        if self._has_angles:
            d[..., self.angle_mask] = wrap_angle(d[..., self.angle_mask])
        return d

    def distance(self, a, b):
        """Metric distance; ``b`` may be an (n, dim) batch."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.shape[-1] != self.dim or b.shape[-1] != self.dim:
            raise InvalidConfigurationError("dimension mismatch")
        # |b - a| is bit-identical to |a - b|, so folding it keeps the metric exactly symmetric.
        d = np.abs(b - a)
        if self._has_angles:
            folded = np.mod(d[..., self.angle_mask], TWO_PI)
            d[..., self.angle_mask] = np.minimum(folded, TWO_PI - folded)
        r = np.sqrt((d * d * self.axis_weights).sum(axis=-1))
        return float(r) if np.ndim(r) == 0 else r

    def interpolate(self, a, b, t):
        """Geodesic interpolation; ``t`` scalar or 1-D array (then returns a batch)."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0.0) or np.any(t_arr > 1.0) or not np.all(np.isfinite(t_arr)):
            raise InvalidParameterError("interpolation parameter must lie in [0, 1]")
        a = np.asarray(a, dtype=float)
        d = self.difference(a, b)
        if t_arr.ndim == 0:
            if t_arr == 0.0:
                return a.copy()
            if t_arr == 1.0:
                return self.normalize(b)
            return self.normalize(a + float(t_arr) * d)
        out = self.normalize(a[None, :] + t_arr[:, None] * d[None, :])
        out[t_arr == 0.0] = a
        out[t_arr == 1.0] = self.normalize(b)
        return out

    def measure(self):
        m = 1.0
        for ax in self.axes:
            m *= TWO_PI if ax.kind == "angle" else ax.upper - ax.lower
        return m

    def unit_ball_offset(self, rng, radius):
        """Offset uniformly distributed in the metric ball of ``radius``."""
        u = rng.standard_normal(self.dim)
        u /= np.linalg.norm(u)
        r = radius * rng.random() ** (1.0 / self.dim)
        return r * u / np.sqrt(self.axis_weights)

    def clamp(self, q):
        q = self.normalize(q)
        lin = ~self.angle_mask
        q[lin] = np.clip(q[lin], self.lower[lin], self.upper[lin])
        return q

    @property
    def diagonal(self):
        return float(np.sqrt(((self.upper - self.lower) ** 2 * self.axis_weights).sum()))


EMPTY_SPACE_DIM = 0


class Violation(NamedTuple):
    level: int
    reason: str


def _same_axis(a: Axis, b: Axis):
    return a.kind == b.kind and a.lower == b.lower and a.upper == b.upper


def _signature(axes):
    """Compress axes into a pattern like [('R', 2), ('SO2', 1), ('R', 3)]."""
    sig = []
    for ax in axes:
        tag = "SO2" if ax.kind == "angle" else "R"
        if sig and sig[-1][0] == tag == "R":
            sig[-1] = ("R", sig[-1][1] + 1)
        else:
            sig.append((tag, 1))
    return sig


def classify_quotient(base_axes, fiber_axes):
    """Name the supported planar quotient pattern ``base = total / fiber``, or None."""
    base = _signature(base_axes)
    fiber = _signature(fiber_axes)
    all_r = lambda sig: bool(sig) and all(tag == "R" for tag, _ in sig)  # noqa: E731
    is_se2 = base[:2] == [("R", 2), ("SO2", 1)]
    if base == [("R", 2)] and fiber == [("SO2", 1)]:
        return "R2 = SE2/SO2"
    if all_r(base) and all_r(fiber):
        return "R^(n-m) = R^n/R^m"
    if base == [("R", 2)] and fiber[:1] == [("SO2", 1)] and all_r(fiber[1:]):
        return "R2 = (SE2 x R^n)/(SO2 x R^n)"
    if is_se2 and len(base) == 2 and all_r(fiber):
        return "SE2 = (SE2 x R^n)/R^n"
    if is_se2 and len(base) == 3 and base[2][0] == "R" and all_r(fiber):
        return "SE2 x R^(n-m) = (SE2 x R^n)/(SE2 x R^m)"
    return None


class QuotientDecomposition:
    """Nested spaces M_1 c ... c M_K with fibers C_k = M_k / M_{k-1}.

    Levels are numbered from 1.  ``M_0`` is the empty space, so ``C_1 = M_1``.
    """

    def __init__(self, levels):
        self.levels = tuple(levels)
        if not self.levels:
            raise InvalidLevelError("a decomposition needs at least one level")
        self._fibers = None

    @property
    def K(self):
        return len(self.levels)

    def space(self, k) -> ProductSpace:
        self._check_level(k, lowest=1)
        return self.levels[k - 1]

    def validate(self):
        """Return the first :class:`Violation`, or ``None`` if the chain is valid."""
        for k in range(2, self.K + 1):
            lo, hi = self.levels[k - 2].axes, self.levels[k - 1].axes
            if len(lo) >= len(hi):
                return Violation(k, f"level {k} must add coordinates to level {k - 1}")
            for i, (a, b) in enumerate(zip(lo, hi)):
                if not _same_axis(a, b):
                    return Violation(k, f"coordinate {i} of level {k - 1} does not match level {k}")
            if classify_quotient(lo, hi[len(lo):]) is None:
                return Violation(k, f"unsupported quotient pattern between levels {k - 1} and {k}")
        return None

    @property
    def fibers(self):
        if self._fibers is None:
            v = self.validate()
            if v is not None:
                raise InvalidLevelError(f"invalid decomposition at level {v.level}: {v.reason}")
            fibers = [self.levels[0]]
            for k in range(2, self.K + 1):
                n = self.levels[k - 2].dim
                fibers.append(ProductSpace.from_axes(self.levels[k - 1].axes[n:]))
            self._fibers = tuple(fibers)
        return self._fibers

    def fiber(self, k) -> ProductSpace:
        self._check_level(k, lowest=1)
        return self.fibers[k - 1]

    def base_dim(self, k):
        return 0 if k == 1 else self.levels[k - 2].dim

    def project(self, k, q):
        """Drop the fiber coordinates of ``q`` in M_k, giving a point of M_{k-1}."""
        self._check_level(k, lowest=2)
        q = np.asarray(q, dtype=float)
        if q.shape[-1] != self.levels[k - 1].dim:
            raise InvalidConfigurationError("configuration does not belong to level %d" % k)
        return q[..., : self.levels[k - 2].dim].copy()

    def project_to(self, k, q, target):
        """Iterated projection of ``q`` in M_k down to M_target."""
        self._check_level(k, lowest=1)
        self._check_level(target, lowest=1)
        if target > k:
            raise InvalidLevelError("cannot project upward")
        return np.asarray(q, dtype=float)[..., : self.levels[target - 1].dim].copy()

    def fiber_part(self, k, q):
        q = np.asarray(q, dtype=float)
        return q[..., self.base_dim(k):].copy()

    def lift(self, k, base, fiber):
        """Cartesian product ``base o fiber`` in M_k (``base`` empty for k=1)."""
        self._check_level(k, lowest=1)
        base = np.asarray(base, dtype=float).reshape(-1) if np.size(base) else np.zeros(0)
        fiber = np.asarray(fiber, dtype=float).reshape(-1)
        if base.size != self.base_dim(k) or base.size + fiber.size != self.levels[k - 1].dim:
            raise InvalidConfigurationError("operand dimensions do not match level %d" % k)
        return np.concatenate([base, fiber])

    def _check_level(self, k, lowest):
        if not isinstance(k, (int, np.integer)) or k < lowest or k > self.K:
            raise InvalidLevelError(f"level {k} outside [{lowest}, {self.K}]")


def validate_decomposition(d: QuotientDecomposition):
    return d.validate()
