"""Fixed-step RK4 closed-loop simulation and trajectory CSV export."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .clf_core import LyapunovCandidate, ScaledSystem

DIVERGENCE_NORM = 1e6


class SimulationError(ValueError):
    """Contract violation in simulation setup."""


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    t_max: float = 50.0
    converge_tol: float = 1e-3
    record_stride: int = 1

    def __post_init__(self):
        if not (0 < self.dt <= self.t_max):
            raise SimulationError(f"need 0 < dt <= t_max, got dt={self.dt}, t_max={self.t_max}")
        if self.converge_tol <= 0:
            raise SimulationError(f"converge_tol must be positive, got {self.converge_tol}")
        if self.record_stride < 1:
            raise SimulationError(f"record_stride must be >= 1, got {self.record_stride}")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray     # (k, n)
    controls: np.ndarray   # (k, m)
    lyapunov: np.ndarray
    converged: bool
    violation_count: int
    diverged: bool = False


def _closed_loop_rhs(scaled: ScaledSystem, controller, x):
    return scaled.drift(x) + scaled.input_matrix(x) @ controller(x)


def simulate(scaled: ScaledSystem, lyap: LyapunovCandidate,
             controller: Callable[[np.ndarray], np.ndarray],
             config: SimConfig, x0) -> Trajectory:
    """Integrate x' = f(x)/M + G(x) u(x) with classical RK4.

    The controller is re-evaluated at each of the four stages. Stops at
    t_max, on entry into the ||x|| < converge_tol ball, or on blow-up
    (non-finite or huge state, flagged as diverged). Counts steps whose
    Lyapunov increase exceeds a dt-coupled discretization allowance.
    """
    x = np.asarray(x0, dtype=float).copy()
    if x.size != scaled.n or not np.all(np.isfinite(x)):
        raise SimulationError(f"initial state must be a finite {scaled.n}-vector")

    dt = config.dt
    times = [0.0]
    states = [x.copy()]
    controls = [np.asarray(controller(x), dtype=float).copy()]
    lyapunov = [float(lyap.V(x))]
    converged = bool(np.linalg.norm(x) < config.converge_tol)
    diverged = False
    violations = 0

    if not converged:
        n_steps = int(round(config.t_max / dt))
        t = 0.0
        for k in range(1, n_steps + 1):
            k1 = _closed_loop_rhs(scaled, controller, x)
            k2 = _closed_loop_rhs(scaled, controller, x + 0.5 * dt * k1)
            k3 = _closed_loop_rhs(scaled, controller, x + 0.5 * dt * k2)
            k4 = _closed_loop_rhs(scaled, controller, x + dt * k3)
            x_new = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t = k * dt

            if not np.all(np.isfinite(x_new)) or np.linalg.norm(x_new) > DIVERGENCE_NORM:
                diverged = True
                break

            # allow O(dt) x roundoff-scale V wiggle from the discretization
            allowed = 10.0 * dt * 1e-9 * max(1.0, float(np.linalg.norm(k1)))
            if lyap.V(x_new) > lyap.V(x) + allowed:
                violations += 1

            x = x_new
            done = bool(np.linalg.norm(x) < config.converge_tol)
            if done or k % config.record_stride == 0 or k == n_steps:
                times.append(t)
                states.append(x.copy())
                controls.append(np.asarray(controller(x), dtype=float).copy())
                lyapunov.append(float(lyap.V(x)))
            if done:
                converged = True
                break

    return Trajectory(
        times=np.asarray(times),
        states=np.vstack(states),
        controls=np.vstack(controls),
        lyapunov=np.asarray(lyapunov),
        converged=converged,
        violation_count=violations,
        diverged=diverged,
    )


def phase_portrait(scaled: ScaledSystem, lyap: LyapunovCandidate, controller,
                   config: SimConfig, grid, jobs: int = 1) -> List[Trajectory]:
    """One trajectory per initial state, in input order.

    Divergence is per-trajectory data, never a global failure. The
    controller is pure, so concurrent evaluation is scheduling-safe.
    """
    grid = [np.asarray(x0, dtype=float) for x0 in grid]
    if not grid:
        raise SimulationError("initial-condition grid must be nonempty")
    run = lambda x0: simulate(scaled, lyap, controller, config, x0)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, grid))
    return [run(x0) for x0 in grid]


def csv_header(n: int, m: int) -> List[str]:
    return (["traj_id", "t"] + [f"x{i+1}" for i in range(n)]
            + [f"u{i+1}" for i in range(m)] + ["V"])


def write_csv(trajectories: List[Trajectory], path: str):
    """Trajectory export: traj_id, t, x1..xn, u1..um, V at 17 significant digits."""
    if not trajectories:
        raise SimulationError("nothing to export")
    n = trajectories[0].states.shape[1]
    m = trajectories[0].controls.shape[1]
    fmt = lambda v: format(float(v), ".17g")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(csv_header(n, m))
        for tid, traj in enumerate(trajectories):
            for j in range(traj.times.size):
                writer.writerow(
                    [tid, fmt(traj.times[j])]
                    + [fmt(v) for v in traj.states[j]]
                    + [fmt(v) for v in traj.controls[j]]
                    + [fmt(traj.lyapunov[j])]
                )
