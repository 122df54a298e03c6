"""Two-point flux approximation (TPFA) of -div(K grad p) = f.

The matrix is kept in flux-balance scaling: row ``i`` is the sum of face
fluxes out of cell ``i``, never divided by the cell area. Boundary faces
carry Dirichlet data taken from the problem's exact pressure at the face
midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import BOUNDARY, Face, Mesh
from .problem import DomainError
from .vtkio import atomic_write_text


@dataclass(frozen=True)
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    trans: np.ndarray  # one transmissibility per mesh face
    dirichlet: np.ndarray  # boundary value per face (nan on interior faces)

    @property
    def dof(self) -> int:
        return self.matrix.shape[0]

    def scaled(self, c: float) -> SparseSystem:
        return SparseSystem((c * self.matrix).tocsr(), c * self.rhs, c * self.trans, self.dirichlet)


def face_transmissibility(face: Face, k_left: float, k_right: float | None = None) -> float:
    """Distance-weighted harmonic transmissibility of one face."""
    if k_left <= 0 or (face.right != BOUNDARY and (k_right is None or k_right <= 0)):
        raise DomainError("permeability must be positive")
    if face.right == BOUNDARY:
        return face.area / (face.dl / k_left)
    return face.area / (face.dl / k_left + face.dr / k_right)


def cell_permeabilities(mesh: Mesh, problem) -> np.ndarray:
    return np.array([problem.permeability(*c.center) for c in mesh.cells], dtype=float)


def assemble(mesh: Mesh, problem) -> SparseSystem:
    n = mesh.n_cells
    kc = cell_permeabilities(mesh, problem)
    nf = len(mesh.faces)
    trans = np.empty(nf)
    pd = np.full(nf, np.nan)
    diag = np.zeros(n)
    rhs = np.array([problem.source(*c.center) * c.area for c in mesh.cells], dtype=float)
    rows, cols, vals = [], [], []
    for k, f in enumerate(mesh.faces):
        if f.right == BOUNDARY:
            t = face_transmissibility(f, kc[f.left])
            pd[k] = problem.exact_pressure(*f.midpoint)
            diag[f.left] += t
            rhs[f.left] += t * pd[k]
        else:
            t = face_transmissibility(f, kc[f.left], kc[f.right])
            diag[f.left] += t
            diag[f.right] += t
            rows += [f.left, f.right]
            cols += [f.right, f.left]
            vals += [-t, -t]
        trans[k] = t
    rows += range(n)
    cols += range(n)
    vals += list(diag)
    a = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    a.sort_indices()
    return SparseSystem(a, rhs, trans, pd)


def face_drops(mesh: Mesh, system: SparseSystem, solution) -> np.ndarray:
    """Pressure drop across every face (boundary faces use the Dirichlet value)."""
    p = np.asarray(solution, dtype=float)
    if p.shape != (system.dof,):
        raise ValueError(f"solution has shape {p.shape}, expected ({system.dof},)")
    left = np.array([f.left for f in mesh.faces])
    right = np.array([f.right for f in mesh.faces])
    bnd = right == BOUNDARY
    other = np.where(bnd, system.dirichlet, p[np.where(bnd, 0, right)])
    return p[left] - other


def cell_flux_indicator(mesh: Mesh, system: SparseSystem, solution) -> np.ndarray:
    """Per-cell sum of absolute face fluxes |T_f * dp_f|."""
    flux = np.abs(system.trans * face_drops(mesh, system, solution))
    left = np.array([f.left for f in mesh.faces])
    right = np.array([f.right for f in mesh.faces])
    mu = np.bincount(left, weights=flux, minlength=mesh.n_cells)
    inner = right != BOUNDARY
    mu += np.bincount(right[inner], weights=flux[inner], minlength=mesh.n_cells)
    return mu


def boundary_flux_balance(mesh: Mesh, system: SparseSystem, solution) -> float:
    """Net flux into the domain through the Dirichlet boundary."""
    bnd = np.array([f.right == BOUNDARY for f in mesh.faces])
    return float(np.sum(-system.trans[bnd] * face_drops(mesh, system, solution)[bnd]))


def exact_interpolant(mesh: Mesh, problem) -> np.ndarray:
    return np.array([problem.exact_pressure(*c.center) for c in mesh.cells])


def discrete_l2_error(mesh: Mesh, solution, problem) -> float:
    p = np.asarray(solution, dtype=float)
    if p.shape != (mesh.n_cells,):
        raise ValueError(f"solution has shape {p.shape}, expected ({mesh.n_cells},)")
    err = p - exact_interpolant(mesh, problem)
    return float(np.sqrt(np.sum(mesh.areas * err**2)))


def check_system(system: SparseSystem, mesh: Mesh | None = None, rtol: float = 1e-12) -> list[str]:
    """Symmetry, M-matrix sign pattern and diagonal dominance checks."""
    a = system.matrix.tocsr()
    problems = []
    if (a != a.T).nnz:
        problems.append("matrix is not bit-symmetric")
    d = a.diagonal()
    if np.any(d <= 0):
        problems.append("non-positive diagonal entry")
    off = a - sp.diags(d)
    if off.data.size and off.data.max() > 0:
        problems.append("positive off-diagonal entry")
    offsum = np.asarray(abs(off).sum(axis=1)).ravel()
    if np.any(d < offsum * (1 - rtol)):
        problems.append("row not diagonally dominant")
    if mesh is not None:
        bsum = np.zeros(system.dof)
        for k, f in enumerate(mesh.faces):
            if f.right == BOUNDARY:
                bsum[f.left] += system.trans[k]
        if np.any(np.abs(d - offsum - bsum) > rtol * d):
            problems.append("diagonal != off-diagonal sum + boundary transmissibility")
    return problems


def write_coo(system: SparseSystem, path) -> None:
    """Write ``row col value`` triples, 0-based, 17 significant digits."""
    coo = system.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    text = "".join(f"{r} {c} {v:.17g}\n"
                   for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]))
    atomic_write_text(path, text)
