"""Legacy ASCII VTK (version 2.0) unstructured-grid export of quad meshes.

Each cell is written as a VTK_QUAD through its own four corners, so hanging
nodes show up as unshared points on the coarse side. Layout::

    # vtk DataFile Version 2.0
    meshcond <family> mesh
    ASCII
    DATASET UNSTRUCTURED_GRID
    POINTS <npoints> double
    CELLS <ncells> <5*ncells>
    CELL_TYPES <ncells>
    CELL_DATA <ncells>
    SCALARS level int 1
    SCALARS permeability double 1
    SCALARS pressure double 1      (only when a solution is given)
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

VTK_QUAD = 9


def _points(mesh):
    index = {}
    pts = []
    conn = []
    for c in mesh.cells:
        x0, x1, y0, y1 = c.box
        ids = []
        for p in ((x0, y0), (x1, y0), (x1, y1), (x0, y1)):
            key = (round(p[0], 12), round(p[1], 12))
            if key not in index:
                index[key] = len(pts)
                pts.append(p)
            ids.append(index[key])
        conn.append(ids)
    return pts, conn


def vtk_lines(mesh, permeability=None, pressure=None) -> list[str]:
    pts, conn = _points(mesh)
    n = mesh.n_cells
    lines = ["# vtk DataFile Version 2.0", f"meshcond {mesh.family} mesh", "ASCII",
             "DATASET UNSTRUCTURED_GRID", f"POINTS {len(pts)} double"]
    lines += [f"{x:.17g} {y:.17g} 0" for x, y in pts]
    lines.append(f"CELLS {n} {5 * n}")
    lines += ["4 " + " ".join(map(str, ids)) for ids in conn]
    lines.append(f"CELL_TYPES {n}")
    lines += [str(VTK_QUAD)] * n
    lines += [f"CELL_DATA {n}", "SCALARS level int 1", "LOOKUP_TABLE default"]
    lines += [str(c.level) for c in mesh.cells]
    for name, values in (("permeability", permeability), ("pressure", pressure)):
        if values is None:
            continue
        values = np.asarray(values, dtype=float)
        if values.shape != (n,):
            raise ValueError(f"{name} needs one value per cell")
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [f"{v:.17g}" for v in values]
    return lines


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_vtk(mesh, path, permeability=None, pressure=None) -> None:
    atomic_write_text(path, "\n".join(vtk_lines(mesh, permeability, pressure)) + "\n")
