"""Built-in example systems.

The headline example is the planar plant with the triangular control
value set, quadratic V = (x1^2 + x2^2)/2, and enclosing box
[-sqrt3, sqrt3] x [-2, 1]. Its source defines the drift's second
component two inconsistent ways (x1^2 vs x2^2 in the last term); both
are provided, and the variant consistent with the displayed a(x) is the
default since every control formula consumes a(x).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clf_core import AffineSystem, LyapunovCandidate
from .gauge import ConvexGauge, Hyperbox, triangle_gauge


@dataclass(frozen=True)
class ExampleSystem:
    name: str
    system: AffineSystem
    lyapunov: LyapunovCandidate
    default_box: Hyperbox
    default_gauge: Optional[ConvexGauge] = None
    description: str = ""


def _quadratic_lyapunov() -> LyapunovCandidate:
    return LyapunovCandidate(
        V=lambda x: 0.5 * float(x @ x),
        gradV=lambda x: np.asarray(x, dtype=float).copy(),
    )


def _triangle_drift_vdot(x):
    x1, x2 = x
    return np.array([
        np.sqrt(3.0) * x2 / (1.0 + x2 * x2),
        x1 / (1.0 + x1 * x1) + x2 * x2 / (1.0 + x2 * x2),
    ])


def _triangle_drift_f(x):
    x1, x2 = x
    return np.array([
        np.sqrt(3.0) * x2 / (1.0 + x2 * x2),
        x1 / (1.0 + x1 * x1) + x1 * x1 / (1.0 + x2 * x2),
    ])


def _unit_column(n, i):
    def g(x, _col=np.eye(n)[:, i]):
        return _col.copy()
    return g


def _triangle_example(name: str, drift) -> ExampleSystem:
    sys = AffineSystem(n=2, m=2, f=drift, g=[_unit_column(2, 0), _unit_column(2, 1)])
    return ExampleSystem(
        name=name,
        system=sys,
        lyapunov=_quadratic_lyapunov(),
        default_box=Hyperbox(lower=[np.sqrt(3.0), 2.0], upper=[np.sqrt(3.0), 1.0]),
        default_gauge=triangle_gauge(),
        description="planar plant with triangular CVS and quadratic V",
    )


def _scalar_linear() -> ExampleSystem:
    sys = AffineSystem(n=1, m=1, f=lambda x: np.array([x[0]]),
                       g=[lambda x: np.array([1.0])])
    return ExampleSystem(
        name="scalar-linear",
        system=sys,
        lyapunov=LyapunovCandidate(V=lambda x: 0.5 * float(x[0] ** 2),
                                   gradV=lambda x: np.array([x[0]])),
        default_box=Hyperbox(lower=[1.0], upper=[1.0]),
        description="x' = x + u; stabilizable only on |x| < 1 with |u| <= 1",
    )


def _scalar_integrator() -> ExampleSystem:
    sys = AffineSystem(n=1, m=1, f=lambda x: np.array([0.0]),
                       g=[lambda x: np.array([1.0])])
    return ExampleSystem(
        name="scalar-integrator",
        system=sys,
        lyapunov=LyapunovCandidate(V=lambda x: 0.5 * float(x[0] ** 2),
                                   gradV=lambda x: np.array([x[0]])),
        default_box=Hyperbox(lower=[1.0], upper=[1.0]),
        description="x' = u; driftless benchmark (a = 0 everywhere)",
    )


def _build_registry():
    vdot = _triangle_example("triangle-example-vdot", _triangle_drift_vdot)
    reg = {
        "triangle-example-vdot": vdot,
        "triangle-example-f": _triangle_example("triangle-example-f", _triangle_drift_f),
        "scalar-linear": _scalar_linear(),
        "scalar-integrator": _scalar_integrator(),
    }
    reg["triangle-example"] = ExampleSystem(
        name="triangle-example",
        system=vdot.system,
        lyapunov=vdot.lyapunov,
        default_box=vdot.default_box,
        default_gauge=vdot.default_gauge,
        description=vdot.description + " (alias of triangle-example-vdot)",
    )
    return reg


REGISTRY = _build_registry()


def get_example(name: str) -> ExampleSystem:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown example '{name}'; built-ins: {known}") from None
