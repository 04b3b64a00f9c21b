"""Convex gauges (Minkowski functionals) and hyperboxes.

A gauge is a convex, positively homogeneous phi: R^m -> R+ whose unit
sublevel set {phi(u) <= 1} is the control value set. Four closed-form
variants are supported: weighted l1, ellipsoidal, facet-form polytope,
and asymmetric box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MEMBERSHIP_TOL = 1e-12
MAX_BOX_ENUM_DIM = 24


class GaugeError(ValueError):
    """Contract violation in gauge construction or evaluation."""


class BoxEnumerationCapacityError(GaugeError):
    """Box vertex enumeration requested above the 2^m capacity guard."""


def _as_vector(v, name="vector"):
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise GaugeError(f"{name} must be a nonempty 1-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GaugeError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class Hyperbox:
    """Asymmetric box [-r1-, r1+] x ... x [-rm-, rm+].

    `lower` holds the magnitudes r_i^- (positive), `upper` the r_i^+,
    so the origin is always interior.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _as_vector(self.lower, "lower")
        hi = _as_vector(self.upper, "upper")
        if lo.shape != hi.shape:
            raise GaugeError(f"lower/upper length mismatch: {lo.size} vs {hi.size}")
        if np.any(lo <= 0) or np.any(hi <= 0):
            raise GaugeError("hyperbox bounds must be strictly positive magnitudes")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, u, tol: float = MEMBERSHIP_TOL) -> bool:
        u = _as_vector(u, "u")
        self._check_dim(u)
        return bool(np.all(u >= -self.lower - tol) and np.all(u <= self.upper + tol))

    def vertices(self) -> np.ndarray:
        """All 2^m corner points, guarded at m <= 24."""
        m = self.dim
        if m > MAX_BOX_ENUM_DIM:
            raise BoxEnumerationCapacityError(
                f"vertex enumeration needs 2^{m} points; capacity is m <= {MAX_BOX_ENUM_DIM}"
            )
        corners = np.empty((2**m, m))
        for i in range(m):
            pattern = np.tile(np.repeat([-self.lower[i], self.upper[i]], 2**i), 2 ** (m - i - 1))
            corners[:, i] = pattern
        return corners

    def _check_dim(self, u: np.ndarray):
        if u.size != self.dim:
            raise GaugeError(f"dimension mismatch: box is {self.dim}-d, point is {u.size}-d")


@dataclass(frozen=True)
class ConvexGauge:
    """Base for the gauge variants; subclasses implement `value`."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def value(self, u: np.ndarray) -> float:
        raise NotImplementedError

    def _coerce(self, u) -> np.ndarray:
        u = _as_vector(u, "u")
        if u.size != self.dim:
            raise GaugeError(f"dimension mismatch: gauge is {self.dim}-d, point is {u.size}-d")
        return u


@dataclass(frozen=True)
class WeightedL1(ConvexGauge):
    """phi(u) = sum_i l_i |u_i| with positive weights l_i."""

    weights: np.ndarray

    def __post_init__(self):
        w = _as_vector(self.weights, "weights")
        if np.any(w <= 0):
            raise GaugeError("weighted-l1 weights must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.weights.size

    def value(self, u) -> float:
        u = self._coerce(u)
        return float(self.weights @ np.abs(u))


@dataclass(frozen=True)
class Ellipsoid(ConvexGauge):
    """phi(u) = sqrt(u^T Q u) for symmetric positive-definite Q.

    The square root keeps degree-1 homogeneity while preserving the
    sublevel set {u^T Q u <= 1}.
    """

    Q: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise GaugeError(f"Q must be square, got shape {Q.shape}")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise GaugeError("Q must be symmetric")
        eigs = np.linalg.eigvalsh(Q)
        if np.min(eigs) <= 0:
            raise GaugeError("Q must be positive definite")
        object.__setattr__(self, "Q", Q)

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def value(self, u) -> float:
        u = self._coerce(u)
        return float(np.sqrt(max(u @ self.Q @ u, 0.0)))


@dataclass(frozen=True)
class PolytopeFacets(ConvexGauge):
    """phi(u) = max(0, max_i v_i . u) over facet normals v_i.

    The clamp keeps phi nonnegative; boundedness of the sublevel set
    requires the normals to positively span the space, checked on the
    +-e_j probe directions at construction.
    """

    normals: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.normals, dtype=float)
        if V.ndim != 2 or V.shape[0] == 0:
            raise GaugeError(f"normals must be a nonempty k x m array, got shape {V.shape}")
        if not np.all(np.isfinite(V)):
            raise GaugeError("normals have non-finite entries")
        if np.any(np.linalg.norm(V, axis=1) == 0):
            raise GaugeError("facet normals must be nonzero")
        for j in range(V.shape[1]):
            for sign in (+1.0, -1.0):
                if np.max(sign * V[:, j]) <= 0:
                    raise GaugeError(
                        f"normals do not positively span direction {'+-'[sign < 0]}e_{j}; "
                        "the sublevel set would be unbounded"
                    )
        object.__setattr__(self, "normals", V)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def value(self, u) -> float:
        u = self._coerce(u)
        return float(max(np.max(self.normals @ u), 0.0))


@dataclass(frozen=True)
class BoxGauge(ConvexGauge):
    """Gauge of a hyperbox: max_i |u_i| / (r_i^+ if u_i >= 0 else r_i^-)."""

    box: Hyperbox

    @property
    def dim(self) -> int:
        return self.box.dim

    def value(self, u) -> float:
        u = self._coerce(u)
        scale = np.where(u >= 0, self.box.upper, self.box.lower)
        return float(np.max(np.abs(u) / scale))


def evaluate(gauge: ConvexGauge, u) -> float:
    """phi(u)."""
    return gauge.value(u)


def is_member(gauge: ConvexGauge, u, tol: float = MEMBERSHIP_TOL) -> bool:
    """True iff u lies in the unit sublevel set (phi(u) <= 1 + tol)."""
    return gauge.value(u) <= 1.0 + tol


def normalize_into(gauge: ConvexGauge, u) -> np.ndarray:
    """Radially rescale u onto the unit sublevel set.

    Points with phi(u) <= 1 pass through; otherwise u/phi(u), which lands
    exactly on the boundary by positive homogeneity.
    """
    u = gauge._coerce(u)
    p = gauge.value(u)
    if p <= 1.0:
        return u.copy()
    return u / p


def max_over_box(gauge: ConvexGauge, box: Hyperbox) -> float:
    """M = max over the box of phi; attained at a box vertex by convexity."""
    if gauge.dim != box.dim:
        raise GaugeError(f"dimension mismatch: gauge {gauge.dim}-d, box {box.dim}-d")
    return float(max(gauge.value(v) for v in box.vertices()))


def triangle_gauge() -> PolytopeFacets:
    """Facet gauge of the triangle conv{(0,-2), (sqrt3,1), (-sqrt3,1)}."""
    s3 = np.sqrt(3.0)
    return PolytopeFacets(normals=np.array([
        [0.0, 1.0],
        [s3 / 2.0, -0.5],
        [-s3 / 2.0, -0.5],
    ]))


TRIANGLE_VERTICES = np.array([
    [0.0, -2.0],
    [np.sqrt(3.0), 1.0],
    [-np.sqrt(3.0), 1.0],
])


def bounding_box_of_vertices(vertices) -> Hyperbox:
    """Smallest axis-aligned hyperbox containing a vertex list (0 interior)."""
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[0] == 0:
        raise GaugeError(f"vertices must be a nonempty k x m array, got shape {V.shape}")
    lo = -np.min(V, axis=0)
    hi = np.max(V, axis=0)
    if np.any(lo <= 0) or np.any(hi <= 0):
        raise GaugeError("vertex hull must contain 0 in its interior per coordinate")
    return Hyperbox(lower=lo, upper=hi)


def gauge_within_box(gauge: ConvexGauge, box: Hyperbox, num_samples: int = 1000,
                     seed: int = 0, tol: float = 1e-9) -> bool:
    """Sampled check that the unit sublevel set sits inside the box.

    Scales random directions onto phi = 1 and tests box membership.
    """
    if gauge.dim != box.dim:
        raise GaugeError(f"dimension mismatch: gauge {gauge.dim}-d, box {box.dim}-d")
    rng = np.random.default_rng(seed)
    for _ in range(num_samples):
        d = rng.standard_normal(gauge.dim)
        p = gauge.value(d)
        if p <= 0:
            continue
        if not box.contains(d / p, tol=tol):
            return False
    return True


def from_spec(spec: dict) -> ConvexGauge:
    """Build a gauge from a config mapping: variant tag + numeric payload."""
    if not isinstance(spec, dict) or "variant" not in spec:
        raise GaugeError("gauge spec must be a mapping with a 'variant' key")
    variant = spec["variant"]
    try:
        if variant == "weighted_l1":
            return WeightedL1(weights=np.asarray(spec["weights"], dtype=float))
        if variant == "ellipsoid":
            return Ellipsoid(Q=np.asarray(spec["Q"], dtype=float))
        if variant == "polytope":
            return PolytopeFacets(normals=np.asarray(spec["normals"], dtype=float))
        if variant == "box":
            return BoxGauge(box=Hyperbox(lower=spec["lower"], upper=spec["upper"]))
        if variant == "triangle":
            return triangle_gauge()
    except KeyError as exc:
        raise GaugeError(f"gauge spec variant '{variant}' is missing field {exc}") from exc
    raise GaugeError(f"unknown gauge variant '{variant}'")


def to_spec(gauge: ConvexGauge) -> dict:
    """Inverse of from_spec (triangle round-trips as a polytope)."""
    if isinstance(gauge, WeightedL1):
        return {"variant": "weighted_l1", "weights": gauge.weights.tolist()}
    if isinstance(gauge, Ellipsoid):
        return {"variant": "ellipsoid", "Q": gauge.Q.tolist()}
    if isinstance(gauge, PolytopeFacets):
        return {"variant": "polytope", "normals": gauge.normals.tolist()}
    if isinstance(gauge, BoxGauge):
        return {"variant": "box", "lower": gauge.box.lower.tolist(),
                "upper": gauge.box.upper.tolist()}
    raise GaugeError(f"unknown gauge type {type(gauge).__name__}")
