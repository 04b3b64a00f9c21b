"""Continuous bounded-control stabilization on gauge-defined convex control sets."""

from .gauge import (
    BoxGauge,
    ConvexGauge,
    Ellipsoid,
    GaugeError,
    Hyperbox,
    PolytopeFacets,
    WeightedL1,
    evaluate,
    is_member,
    max_over_box,
    normalize_into,
    triangle_gauge,
)
from .clf_core import (
    AffineSystem,
    LieData,
    LyapunovCandidate,
    ScaledSystem,
    lie_derivatives,
    scale_system,
    verify_clf,
    verify_scp,
    verify_tradeoff,
)
from .stabilizer import (
    FeedbackEval,
    StabilizerParams,
    epsilon_limit_check,
    feedback_box,
    feedback_gauge,
    omega_bar,
    omega_polytope,
)
from .simulator import SimConfig, Trajectory, phase_portrait, simulate, write_csv

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
