"""Continuous bounded feedback laws.

The discontinuous optimal controls (box-corner omega_bar and
polytope-vertex omega) give the best Lyapunov decrease rate; the
epsilon-parameterized regulators rho_i damp omega_bar into a continuous
feedback u, and radial normalization maps u onto an arbitrary gauge
sublevel set contained in the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .clf_core import AffineSystem, LieData, LyapunovCandidate, lie_derivatives, descent_reach
from .gauge import ConvexGauge, Hyperbox, normalize_into


class StabilizerError(ValueError):
    """Contract violation in stabilizer parameters or preconditions."""


@dataclass(frozen=True)
class StabilizerParams:
    epsilon: float = 1.0
    lambda_floor: float = 1e-12  # guard for ln(lam)/lam as lam -> 0+

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise StabilizerError(f"epsilon must be positive, got {self.epsilon}")
        if not (0.0 < self.lambda_floor < 1.0):
            raise StabilizerError(f"lambda_floor must be in (0,1), got {self.lambda_floor}")


@dataclass
class FeedbackEval:
    """All intermediate quantities of one feedback evaluation."""

    omega_bar: np.ndarray
    rho: np.ndarray
    tau: np.ndarray
    lam: float
    u: np.ndarray
    beta_r: float
    w: Optional[np.ndarray] = None
    rho_complement: Optional[np.ndarray] = None  # exact 1 - rho_i, kept for limit studies
    clf_violation: bool = False


def omega_bar(lie: LieData, box: Hyperbox) -> np.ndarray:
    """Box corner minimizing beta.u: -r_i^- where beta_i > 0, +r_i^+ otherwise.

    The beta_i = 0 tie-break (+r_i^+) never matters downstream since the
    regulator zeroes that component.
    """
    if lie.beta.size != box.dim:
        raise StabilizerError(f"dimension mismatch: beta {lie.beta.size}-d, box {box.dim}-d")
    return np.where(lie.beta > 0, -box.lower, box.upper)


def omega_polytope(lie: LieData, vertices) -> np.ndarray:
    """Vertex minimizing beta.v; ties go to the lowest index."""
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[0] == 0:
        raise StabilizerError("vertex list must be a nonempty k x m array")
    scores = V @ lie.beta
    return V[int(np.argmin(scores))].copy()


def lambda_fn(lie: LieData, beta_r: float,
              params: StabilizerParams = StabilizerParams()) -> float:
    """lam = 1 - (|a|+a) / (2 beta_r), clamped below at the floor.

    Under the CLF condition the unclamped value lies in (0, 1]; hitting
    the clamp means the decrease condition fails at this state.
    """
    if beta_r < 0:
        raise StabilizerError(f"beta_r must be nonnegative, got {beta_r}")
    if beta_r == 0.0:
        return 1.0
    raw = 1.0 - (abs(lie.a) + lie.a) / (2.0 * beta_r)
    return max(raw, params.lambda_floor)


def tau_fn(lie: LieData, box: Hyperbox, beta_r: float, i: int,
           params: StabilizerParams = StabilizerParams()) -> float:
    """tau_i = m ln(lam)/lam - epsilon |beta_i| r_i (0 when beta_r = 0)."""
    if beta_r == 0.0:
        return 0.0
    m = box.dim
    lam = lambda_fn(lie, beta_r, params)
    r = descent_reach(box, lie.beta)
    return m * math.log(lam) / lam - params.epsilon * abs(lie.beta[i]) * r[i]


def rho_fn(lie: LieData, box: Hyperbox, beta_r: float, i: int,
           params: StabilizerParams = StabilizerParams()) -> float:
    """Regulator rho_i in [0, 1); zero when beta_i has no reach."""
    r = descent_reach(box, lie.beta)
    bi = abs(lie.beta[i]) * r[i]
    if bi == 0.0:
        return 0.0
    s = bi / beta_r
    inner = 1.0 - ((abs(lie.a) + lie.a) / (2.0 * beta_r)) * s
    tau = tau_fn(lie, box, beta_r, i, params)
    comp = inner * math.exp(tau * s)
    rho = 1.0 - comp
    return min(max(rho, 0.0), 1.0 - 1e-16)


def feedback_box(sys: AffineSystem, lyap: LyapunovCandidate, box: Hyperbox,
                 params: StabilizerParams, x) -> FeedbackEval:
    """Continuous feedback u_i = rho_i * omega_bar_i, valued in the box."""
    lie = lie_derivatives(sys, lyap, x)
    return feedback_box_from_lie(lie, box, params)


def feedback_box_from_lie(lie: LieData, box: Hyperbox,
                          params: StabilizerParams) -> FeedbackEval:
    m = box.dim
    r = descent_reach(box, lie.beta)
    per_coord = np.abs(lie.beta) * r
    beta_r = float(np.sum(per_coord))
    omb = omega_bar(lie, box)

    if beta_r == 0.0:
        zeros = np.zeros(m)
        return FeedbackEval(omega_bar=omb, rho=zeros.copy(), tau=zeros.copy(),
                            lam=1.0, u=zeros.copy(), beta_r=0.0,
                            rho_complement=np.ones(m),
                            clf_violation=lie.a > 0.0)

    q = (abs(lie.a) + lie.a) / (2.0 * beta_r)
    raw_lam = 1.0 - q
    violated = raw_lam <= 0.0
    lam = max(raw_lam, params.lambda_floor)
    log_term = m * math.log(lam) / lam

    rho = np.zeros(m)
    tau = np.zeros(m)
    comp = np.ones(m)
    for i in range(m):
        bi = per_coord[i]
        if bi == 0.0:
            continue
        s = bi / beta_r
        tau[i] = log_term - params.epsilon * bi
        inner = 1.0 - q * s
        if inner <= 0.0:
            violated = True
            inner = 0.0
        comp[i] = inner * math.exp(tau[i] * s)
        rho[i] = min(max(1.0 - comp[i], 0.0), 1.0 - 1e-16)
    u = rho * omb
    return FeedbackEval(omega_bar=omb, rho=rho, tau=tau, lam=lam, u=u,
                        beta_r=beta_r, rho_complement=comp, clf_violation=violated)


def feedback_gauge(sys: AffineSystem, lyap: LyapunovCandidate, box: Hyperbox,
                   gauge: ConvexGauge, params: StabilizerParams, x) -> FeedbackEval:
    """Gauge-admissible feedback w = u / max(phi(u), 1).

    Assumes the gauge sublevel set sits inside the box; see
    gauge.gauge_within_box for the sampled check.
    """
    ev = feedback_box(sys, lyap, box, params, x)
    ev.w = normalize_into(gauge, ev.u)
    return ev


@dataclass
class EpsilonLimitReport:
    epsilons: list
    distances: list
    precondition_ok: bool = True

    @property
    def non_increasing(self) -> bool:
        return all(d2 <= d1 for d1, d2 in zip(self.distances, self.distances[1:]))

    @property
    def strictly_decreasing(self) -> bool:
        return all(d2 < d1 for d1, d2 in zip(self.distances, self.distances[1:]))

    @property
    def passed(self) -> bool:
        return (self.precondition_ok and self.non_increasing
                and bool(self.distances) and self.distances[-1] <= 1e-3)


def epsilon_limit_check(sys: AffineSystem, lyap: LyapunovCandidate, box: Hyperbox,
                        params_list, x) -> EpsilonLimitReport:
    """Distances ||u_eps - omega_bar|| over an increasing epsilon schedule.

    Requires every beta_i(x) nonzero (the limit statement assumes it).
    Distances use the exact regulator complements 1 - rho_i so the decay
    stays resolved past the point where rho rounds to 1 in floating point.
    """
    lie = lie_derivatives(sys, lyap, x)
    report = EpsilonLimitReport(epsilons=[p.epsilon for p in params_list], distances=[])
    if np.any(lie.beta == 0.0):
        report.precondition_ok = False
        return report
    r = descent_reach(box, lie.beta)
    if np.any(np.abs(lie.beta) * r == 0.0):
        report.precondition_ok = False
        return report
    omb = omega_bar(lie, box)
    for p in params_list:
        ev = feedback_box_from_lie(lie, box, p)
        report.distances.append(float(np.linalg.norm(ev.rho_complement * omb)))
    return report
