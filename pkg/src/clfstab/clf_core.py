"""Plant, Lyapunov candidate, Lie-derivative data, and numeric verifiers.

The two Lie derivatives a(x) = gradV.f and beta_i(x) = gradV.g_i drive
every control formula downstream; the verifiers here check the CLF
decrease condition, the small-control property, and the normalized
tradeoff inequality on sample sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .gauge import ConvexGauge, Hyperbox, max_over_box

ORIGIN_DRIFT_TOL = 1e-12


class SystemError_(ValueError):
    """Contract violation in system or Lyapunov construction."""


class EvaluationError(ValueError):
    """Non-finite value produced while evaluating plant data."""


@dataclass(frozen=True)
class AffineSystem:
    """x' = f(x) + sum_i g_i(x) u_i with f(0) = 0."""

    n: int
    m: int
    f: Callable[[np.ndarray], np.ndarray]
    g: Sequence[Callable[[np.ndarray], np.ndarray]]

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise SystemError_(f"dimensions must be positive, got n={self.n}, m={self.m}")
        if len(self.g) != self.m:
            raise SystemError_(f"expected {self.m} input columns, got {len(self.g)}")
        f0 = np.asarray(self.f(np.zeros(self.n)), dtype=float)
        if np.max(np.abs(f0)) > ORIGIN_DRIFT_TOL:
            raise SystemError_(f"drift must vanish at the origin; |f(0)| = {np.max(np.abs(f0)):.3e}")

    def drift(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.f(x), dtype=float)

    def input_matrix(self, x: np.ndarray) -> np.ndarray:
        """G(x) as an (n, m) array of the columns g_i(x)."""
        return np.column_stack([np.asarray(gi(x), dtype=float) for gi in self.g])


@dataclass(frozen=True)
class LyapunovCandidate:
    """V with its analytic gradient; V(0) = 0 and V > 0 away from 0."""

    V: Callable[[np.ndarray], float]
    gradV: Callable[[np.ndarray], np.ndarray]

    def gradient_consistency(self, points: np.ndarray, h: float = 1e-5) -> float:
        """Worst relative error of gradV against central differences."""
        worst = 0.0
        for x in points:
            x = np.asarray(x, dtype=float)
            g = np.asarray(self.gradV(x), dtype=float)
            fd = np.empty_like(g)
            for i in range(x.size):
                e = np.zeros_like(x)
                e[i] = h
                fd[i] = (self.V(x + e) - self.V(x - e)) / (2.0 * h)
            denom = max(np.linalg.norm(g), 1.0)
            worst = max(worst, float(np.linalg.norm(g - fd) / denom))
        return worst


@dataclass(frozen=True)
class LieData:
    """a = L_f V(x) and beta_i = L_{g_i} V(x) at a single state."""

    a: float
    beta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        if not np.isfinite(self.a) or not np.all(np.isfinite(beta)):
            raise EvaluationError("Lie derivatives must be finite")
        object.__setattr__(self, "beta", beta)


def lie_derivatives(sys: AffineSystem, lyap: LyapunovCandidate, x) -> LieData:
    x = np.asarray(x, dtype=float)
    if x.size != sys.n:
        raise SystemError_(f"state dimension mismatch: expected {sys.n}, got {x.size}")
    grad = np.asarray(lyap.gradV(x), dtype=float)
    a = float(grad @ sys.drift(x))
    beta = grad @ sys.input_matrix(x)
    return LieData(a=a, beta=beta)


def descent_reach(box: Hyperbox, beta: np.ndarray) -> np.ndarray:
    """Per-coordinate reach r_i toward decrease of beta.u over the box.

    The minimizer of beta_i u_i on [-r_i^-, r_i^+] sits at -r_i^- for
    beta_i > 0 and at +r_i^+ otherwise, so the achievable decrease is
    -sum |beta_i| r_i with r_i = r_i^- when beta_i > 0, else r_i^+.
    """
    beta = np.asarray(beta, dtype=float)
    return np.where(beta > 0, box.lower, box.upper)


def best_decrease(lie: LieData, box: Hyperbox) -> float:
    """min over the box of a + beta.u = a - sum |beta_i| r_i."""
    r = descent_reach(box, lie.beta)
    return lie.a - float(np.abs(lie.beta) @ r)


@dataclass(frozen=True)
class ScaledSystem:
    """The base plant with drift divided by M >= 1; input columns unchanged."""

    base: AffineSystem
    M: float

    def __post_init__(self):
        if not np.isfinite(self.M) or self.M < 1.0:
            raise SystemError_(f"scale M must be >= 1, got {self.M}")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def m(self) -> int:
        return self.base.m

    def drift(self, x: np.ndarray) -> np.ndarray:
        return self.base.drift(x) / self.M

    def input_matrix(self, x: np.ndarray) -> np.ndarray:
        return self.base.input_matrix(x)


def scale_system(sys: AffineSystem, M: float) -> ScaledSystem:
    return ScaledSystem(base=sys, M=float(M))


@dataclass
class ClfReport:
    num_checked: int
    violations: list = field(default_factory=list)  # (x, best_decrease) pairs

    @property
    def passed(self) -> bool:
        return not self.violations


def verify_clf(sys: AffineSystem, lyap: LyapunovCandidate, box: Hyperbox,
               sample_set) -> ClfReport:
    """Check a(x) - sum |beta_i| r_i < 0 on every sample (all nonzero)."""
    report = ClfReport(num_checked=0)
    for x in sample_set:
        x = np.asarray(x, dtype=float)
        lie = lie_derivatives(sys, lyap, x)
        report.num_checked += 1
        margin = best_decrease(lie, box)
        if margin >= 0.0:
            report.violations.append((x.copy(), margin))
    return report


@dataclass
class ScpReport:
    radii: list
    ratios: list
    flagged_shells: list = field(default_factory=list)  # radii with beta = 0 but a > 0
    tolerance: float = 0.05

    @property
    def passed(self) -> bool:
        if self.flagged_shells:
            return False
        ok = all(s2 <= s1 + self.tolerance for s1, s2 in zip(self.ratios, self.ratios[1:]))
        return ok and self.ratios[-1] <= self.tolerance


def _shell_points(n: int, r: float, num_angles: int, seed: int = 0) -> np.ndarray:
    if n == 1:
        return np.array([[-r], [r]])
    if n == 2:
        theta = np.linspace(0.0, 2.0 * np.pi, num_angles, endpoint=False)
        return r * np.column_stack([np.cos(theta), np.sin(theta)])
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((num_angles, n))
    return r * d / np.linalg.norm(d, axis=1, keepdims=True)


def verify_scp(sys: AffineSystem, lyap: LyapunovCandidate, box: Hyperbox,
               radii, num_angles: int = 64, tolerance: float = 0.05) -> ScpReport:
    """Shell ratios s(r) = max (|a|+a) / (2 sum |beta_i| r_i) on ||x|| = r.

    The small-control property requires s(r) -> 0 as r -> 0; a shell
    where the denominator vanishes with a > 0 is flagged.
    """
    radii = list(radii)
    if any(r2 >= r1 for r1, r2 in zip(radii, radii[1:])) or radii[-1] <= 0:
        raise SystemError_("radii must be strictly decreasing and positive")
    report = ScpReport(radii=radii, ratios=[], tolerance=tolerance)
    for r in radii:
        worst = 0.0
        for x in _shell_points(sys.n, r, num_angles):
            lie = lie_derivatives(sys, lyap, x)
            denom = 2.0 * float(np.abs(lie.beta) @ descent_reach(box, lie.beta))
            num = abs(lie.a) + lie.a
            if denom == 0.0:
                if num > 0.0:
                    report.flagged_shells.append(r)
                continue
            worst = max(worst, num / denom)
        report.ratios.append(worst)
    return report


@dataclass
class TradeoffReport:
    num_checked: int
    margins: np.ndarray
    violations: list = field(default_factory=list)
    excluded: int = 0  # samples with beta = 0, where the feedback has no authority

    @property
    def passed(self) -> bool:
        return not self.violations

    def margin_histogram(self, bins: int = 10):
        return np.histogram(self.margins, bins=bins)


def verify_tradeoff(sys: AffineSystem, lyap: LyapunovCandidate, gauge: ConvexGauge,
                    box: Hyperbox, k: float, sample_set, params=None) -> TradeoffReport:
    """Check (1/k) a(x) + beta(x) . w(x) < 0 on nonzero samples, k >= M >= 1."""
    from .stabilizer import StabilizerParams, feedback_gauge

    M = max_over_box(gauge, box)
    if k < M:
        raise SystemError_(f"tradeoff constant k = {k} must be >= M = {M}")
    if params is None:
        params = StabilizerParams()
    margins = []
    report = TradeoffReport(num_checked=0, margins=np.empty(0))
    for x in sample_set:
        x = np.asarray(x, dtype=float)
        ev = feedback_gauge(sys, lyap, box, gauge, params, x)
        lie = lie_derivatives(sys, lyap, x)
        if np.all(lie.beta == 0.0):
            report.excluded += 1
            continue
        margin = lie.a / k + float(lie.beta @ ev.w)
        margins.append(margin)
        report.num_checked += 1
        if margin >= 0.0:
            report.violations.append((x.copy(), margin))
    report.margins = np.asarray(margins)
    return report
