"""Adaptive meshes by equidistributing the per-cell flux indicator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fvm import assemble, cell_flux_indicator
from .linalg import SolverError, cg_solve
from .mesh import Mesh, build_uniform, refine_cells


@dataclass(frozen=True)
class AdaptRound:
    dof: int
    marked: int
    max_indicator: float
    mean_indicator: float


@dataclass
class AdaptTrace:
    rounds: list[AdaptRound] = field(default_factory=list)
    final_mesh: Mesh | None = None
    stop_reason: str = ""
    meshes: list[Mesh] = field(default_factory=list)  # mesh solved in each round


def flux_ratio(mesh: Mesh, problem, tol: float = 1e-10) -> float:
    """max/mean of the flux indicator for the discrete solution on ``mesh``."""
    system = assemble(mesh, problem)
    mu = cell_flux_indicator(mesh, system, cg_solve(system, tol).solution)
    return float(mu.max() / mu.mean())


def adapt_loop(problem, budget: int = 1024, alpha: float = 1.0, n0: int = 8,
               tol: float = 1e-10, max_rounds: int = 50) -> AdaptTrace:
    """Refine cells with indicator above ``alpha * mean`` until the dof budget.

    A round is rejected (and the loop stops) when its refined mesh would
    exceed ``1.25 * budget`` cells.
    """
    if budget < n0 * n0:
        raise ValueError(f"budget {budget} below root grid size {n0 * n0}")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    mesh = build_uniform(n0)
    trace = AdaptTrace()
    for _ in range(max_rounds):
        system = assemble(mesh, problem)
        report = cg_solve(system, tol)
        if not report.converged:
            raise SolverError(f"CG did not converge on {mesh.n_cells} cells "
                              f"(residual {report.residuals[-1]:.3e})")
        mu = cell_flux_indicator(mesh, system, report.solution)
        marked = np.flatnonzero(mu > alpha * mu.mean())
        trace.rounds.append(AdaptRound(mesh.n_cells, len(marked), float(mu.max()), float(mu.mean())))
        trace.meshes.append(mesh)
        if len(marked) == 0:
            trace.stop_reason = "no cells marked"
            break
        refined = refine_cells(mesh, marked, family="adaptive")
        if refined.n_cells > 1.25 * budget:
            trace.stop_reason = "budget"
            break
        mesh = refined
    else:
        trace.stop_reason = "max rounds"
    params = {"budget": budget, "alpha": alpha, "n0": n0}
    trace.final_mesh = Mesh(mesh.cells, mesh.faces, "adaptive", params)
    return trace
