"""Force-based quasicontinuum solvers for a 1D next-nearest-neighbor chain."""

from .chain import ChainGeometry, Load, aggregate_loads, tension_load
from .conjugate import psi_e, psi_f, psi_f_hat, psi_g_hat
from .models import ModelKind, force, energy
from .potential import CriticalRadii, LennardJones, critical_radii, lennard_jones
from .solvers import SolverConfig, SolveReport, ghost_force_iteration, homotopy_solve, newton_solve

__version__ = "0.1.0"

__all__ = [
    "ChainGeometry", "Load", "aggregate_loads", "tension_load",
    "psi_e", "psi_f", "psi_f_hat", "psi_g_hat",
    "ModelKind", "force", "energy",
    "CriticalRadii", "LennardJones", "critical_radii", "lennard_jones",
    "SolverConfig", "SolveReport", "ghost_force_iteration", "homotopy_solve", "newton_solve",
]
