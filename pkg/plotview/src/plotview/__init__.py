"""Render phase portraits and control-set scatter plots from trajectory CSVs.

Reads only the CSV contract (traj_id, t, x1..xn, u1..um, V) and an
optional gauge-spec JSON; never imports the simulation package.
"""

from .render import PlotSpec, SchemaError, load_trajectories, render_control_set, render_portrait

__all__ = ["PlotSpec", "SchemaError", "load_trajectories",
           "render_control_set", "render_portrait"]
__version__ = "0.1.0"
