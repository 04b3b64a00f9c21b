"""Command-line entry point.

Subcommands: gauge-eval, verify, simulate, portrait. A single JSON
config file wires the built-in example system, the gauge-defined CVS,
the enclosing box, the tuning parameter, and simulation/grid settings.
Exit codes: 0 success, 1 verification failure, 2 config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import clf_core, gauge as gauge_mod, simulator, stabilizer
from .examples import REGISTRY, get_example

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_IO = 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    example: str = "triangle-example"
    cvs: dict = field(default_factory=lambda: {"variant": "triangle"})
    box: dict = field(default_factory=lambda: {
        "lower": [np.sqrt(3.0), 2.0], "upper": [np.sqrt(3.0), 1.0]})
    epsilon: float = 1.0
    sim: dict = field(default_factory=lambda: {
        "dt": 0.01, "t_max": 50.0, "converge_tol": 1e-3, "record_stride": 1})
    grid: dict = field(default_factory=lambda: {
        "min": [-3.0, -3.0], "max": [3.0, 3.0], "counts": [4, 4]})
    output_path: str = "portrait.csv"

    @staticmethod
    def from_dict(data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        return RunConfig(**data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Problem:
    """Config resolved into live objects."""

    config: RunConfig
    example: object
    gauge: gauge_mod.ConvexGauge
    box: gauge_mod.Hyperbox
    params: stabilizer.StabilizerParams
    sim_config: simulator.SimConfig
    M: float


def resolve(config: RunConfig) -> Problem:
    """Validate a RunConfig and build the working objects, naming the
    offending field on failure."""
    try:
        example = get_example(config.example)
    except KeyError as exc:
        raise ConfigError(f"example: {exc.args[0]}") from exc
    try:
        g = gauge_mod.from_spec(config.cvs)
    except (gauge_mod.GaugeError, TypeError) as exc:
        raise ConfigError(f"cvs: {exc}") from exc
    try:
        box = gauge_mod.Hyperbox(lower=config.box["lower"], upper=config.box["upper"])
    except (gauge_mod.GaugeError, KeyError, TypeError) as exc:
        raise ConfigError(f"box: {exc}") from exc
    if g.dim != example.system.m:
        raise ConfigError(f"cvs: gauge dimension {g.dim} does not match "
                          f"system input dimension {example.system.m}")
    if box.dim != example.system.m:
        raise ConfigError(f"box: dimension {box.dim} does not match "
                          f"system input dimension {example.system.m}")
    try:
        params = stabilizer.StabilizerParams(epsilon=float(config.epsilon))
    except (stabilizer.StabilizerError, TypeError, ValueError) as exc:
        raise ConfigError(f"epsilon: {exc}") from exc
    try:
        sim_config = simulator.SimConfig(**config.sim)
    except (simulator.SimulationError, TypeError) as exc:
        raise ConfigError(f"sim: {exc}") from exc
    _validate_grid(config.grid, example.system.n)
    M = gauge_mod.max_over_box(g, box)
    return Problem(config=config, example=example, gauge=g, box=box,
                   params=params, sim_config=sim_config, M=M)


def _validate_grid(spec: dict, n: int):
    for key in ("min", "max", "counts"):
        if key not in spec:
            raise ConfigError(f"grid: missing field '{key}'")
        if len(spec[key]) != n:
            raise ConfigError(f"grid: field '{key}' must have length {n}")
    if any(int(c) < 1 for c in spec["counts"]):
        raise ConfigError("grid: counts must be >= 1")


def grid_points(spec: dict) -> list:
    axes = [np.linspace(lo, hi, int(c))
            for lo, hi, c in zip(spec["min"], spec["max"], spec["counts"])]
    mesh = np.meshgrid(*axes, indexing="ij")
    return [np.array(p) for p in zip(*(m.ravel() for m in mesh))]


def make_gauge_controller(problem: Problem):
    ex = problem.example

    def controller(x):
        return stabilizer.feedback_gauge(ex.system, ex.lyapunov, problem.box,
                                         problem.gauge, problem.params, x).w
    return controller


def _load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in '{path}': {exc}") from exc
    return RunConfig.from_dict(data)


def _emit(report: dict, as_json: bool):
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        for line in report["lines"]:
            print(line)


def cmd_gauge_eval(problem: Problem, u, as_json: bool) -> int:
    g = problem.gauge
    try:
        value = gauge_mod.evaluate(g, u)
        member = gauge_mod.is_member(g, u)
        normalized = gauge_mod.normalize_into(g, u)
    except gauge_mod.GaugeError as exc:
        print(f"error: u: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = {
        "phi": value,
        "member": member,
        "normalized": normalized.tolist(),
        "M": problem.M,
        "lines": [
            f"phi(u) = {value:.12g}",
            f"member = {member}",
            f"normalized = {np.array2string(normalized, precision=12)}",
            f"M = max over box of phi = {problem.M:.12g}",
        ],
    }
    _emit(report, as_json)
    return EXIT_OK


def cmd_verify(problem: Problem, as_json: bool) -> int:
    ex = problem.example
    samples = [x for x in grid_points(problem.config.grid)
               if np.linalg.norm(x) > 1e-9]

    clf = clf_core.verify_clf(ex.system, ex.lyapunov, problem.box, samples)
    scp = clf_core.verify_scp(ex.system, ex.lyapunov, problem.box,
                              radii=[1.0, 0.1, 0.01, 0.001])
    tradeoff = clf_core.verify_tradeoff(ex.system, ex.lyapunov, problem.gauge,
                                        problem.box, k=problem.M,
                                        sample_set=samples, params=problem.params)
    limit_states, limit_reports = [], []
    for x in samples:
        lie = clf_core.lie_derivatives(ex.system, ex.lyapunov, x)
        if np.all(lie.beta != 0.0):
            limit_states.append(x)
        if len(limit_states) == 10:
            break
    schedule = [stabilizer.StabilizerParams(epsilon=e) for e in (1.0, 10.0, 100.0, 1e4)]
    for x in limit_states:
        limit_reports.append(stabilizer.epsilon_limit_check(
            ex.system, ex.lyapunov, problem.box, schedule, x))
    limit_ok = all(r.passed for r in limit_reports)

    all_ok = clf.passed and scp.passed and tradeoff.passed and limit_ok
    lines = [
        f"CLF condition: {'pass' if clf.passed else 'FAIL'} "
        f"({clf.num_checked} samples, {len(clf.violations)} violations)",
        f"SCP shell ratios {['%.4g' % s for s in scp.ratios]}: "
        f"{'pass' if scp.passed else 'FAIL'}",
        f"tradeoff (1/k)a + beta.w < 0 with k = {problem.M:.6g}: "
        f"{'pass' if tradeoff.passed else 'FAIL'} "
        f"({tradeoff.num_checked} samples, {len(tradeoff.violations)} violations)",
        f"epsilon limit at {len(limit_reports)} states: "
        f"{'pass' if limit_ok else 'FAIL'}",
    ]
    for x, margin in clf.violations[:20]:
        lines.append(f"  CLF violation at x = {x.tolist()}: best decrease {margin:.6g}")
    for x, margin in tradeoff.violations[:20]:
        lines.append(f"  tradeoff violation at x = {x.tolist()}: margin {margin:.6g}")
    report = {
        "clf": {"passed": clf.passed, "checked": clf.num_checked,
                "violations": [x.tolist() for x, _ in clf.violations]},
        "scp": {"passed": scp.passed, "radii": scp.radii, "ratios": scp.ratios},
        "tradeoff": {"passed": tradeoff.passed, "checked": tradeoff.num_checked,
                     "violations": [x.tolist() for x, _ in tradeoff.violations]},
        "epsilon_limit": {"passed": limit_ok,
                          "distances": [r.distances for r in limit_reports]},
        "passed": all_ok,
        "lines": lines + [f"overall: {'pass' if all_ok else 'FAIL'}"],
    }
    _emit(report, as_json)
    return EXIT_OK if all_ok else EXIT_VERIFY_FAIL


def _write_trajectories(trajectories, path) -> int:
    try:
        simulator.write_csv(trajectories, path)
    except OSError as exc:
        print(f"error: cannot write '{path}': {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_simulate(problem: Problem, x0, out_path, as_json: bool) -> int:
    ex = problem.example
    x0 = np.asarray(x0, dtype=float)
    if x0.size != ex.system.n:
        print(f"error: x0: expected {ex.system.n} components, got {x0.size}",
              file=sys.stderr)
        return EXIT_CONFIG
    scaled = clf_core.scale_system(ex.system, problem.M)
    traj = simulator.simulate(scaled, ex.lyapunov, make_gauge_controller(problem),
                              problem.sim_config, x0)
    status = _write_trajectories([traj], out_path)
    if status != EXIT_OK:
        return status
    report = {
        "converged": traj.converged,
        "diverged": traj.diverged,
        "violations": traj.violation_count,
        "final_state": traj.states[-1].tolist(),
        "final_time": float(traj.times[-1]),
        "csv": str(out_path),
        "lines": [
            f"simulated to t = {traj.times[-1]:.6g}, "
            f"converged = {traj.converged}, diverged = {traj.diverged}, "
            f"Lyapunov violations = {traj.violation_count}",
            f"wrote {out_path}",
        ],
    }
    _emit(report, as_json)
    return EXIT_OK


def cmd_portrait(problem: Problem, out_path, jobs: int, as_json: bool) -> int:
    ex = problem.example
    scaled = clf_core.scale_system(ex.system, problem.M)
    grid = grid_points(problem.config.grid)
    trajs = simulator.phase_portrait(scaled, ex.lyapunov, make_gauge_controller(problem),
                                     problem.sim_config, grid, jobs=jobs)
    status = _write_trajectories(trajs, out_path)
    if status != EXIT_OK:
        return status
    converged = sum(t.converged for t in trajs)
    max_viol = max(t.violation_count for t in trajs)
    report = {
        "trajectories": len(trajs),
        "converged": converged,
        "max_violations": max_viol,
        "csv": str(out_path),
        "lines": [
            f"{len(trajs)} trajectories, {converged} converged, "
            f"max Lyapunov violations = {max_viol}",
            f"wrote {out_path}",
        ],
    }
    _emit(report, as_json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clfstab",
        description="bounded-control stabilization on gauge-defined control sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (defaults to the built-in "
                       "triangle example)")
        p.add_argument("--epsilon", type=float, help="override the tuning parameter")
        p.add_argument("--dump-config", metavar="PATH",
                       help="write the resolved config as JSON and exit")
        p.add_argument("--json", action="store_true", help="emit a JSON summary")

    p = sub.add_parser("gauge-eval", help="evaluate the configured gauge at a point")
    common(p)
    p.add_argument("-u", type=float, nargs="+", required=False, default=[0.0, 0.0],
                   help="control-space point")

    p = sub.add_parser("verify", help="run CLF, SCP, tradeoff, and limit checks")
    common(p)

    p = sub.add_parser("simulate", help="closed-loop run from one initial state")
    common(p)
    p.add_argument("--x0", type=float, nargs="+", required=True)
    p.add_argument("--out", help="output CSV path (defaults to config output_path)")

    p = sub.add_parser("portrait", help="closed-loop runs over the config grid")
    common(p)
    p.add_argument("--out", help="output CSV path (defaults to config output_path)")
    p.add_argument("--jobs", type=int, default=1, help="concurrent trajectories")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.epsilon is not None:
            config = dataclasses.replace(config, epsilon=args.epsilon)
        problem = resolve(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.dump_config:
        try:
            with open(args.dump_config, "w") as fh:
                json.dump(problem.config.to_dict(), fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            print(f"error: cannot write '{args.dump_config}': {exc}", file=sys.stderr)
            return EXIT_IO
        return EXIT_OK

    if args.command == "gauge-eval":
        return cmd_gauge_eval(problem, args.u, args.json)
    if args.command == "verify":
        return cmd_verify(problem, args.json)
    if args.command == "simulate":
        out = args.out or problem.config.output_path
        return cmd_simulate(problem, args.x0, out, args.json)
    if args.command == "portrait":
        out = args.out or problem.config.output_path
        return cmd_portrait(problem, out, args.jobs, args.json)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
