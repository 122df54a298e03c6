"""Quadtree meshes on [-1, 1]^2 with hanging nodes.

All four mesh families share one representation: a list of axis-aligned
boxes with a refinement level. Tensor-product grids (uniform and graded)
are the unrefined, level-0 case. Faces are found geometrically, so a
coarse cell next to two refined neighbours sees two faces on that side.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .problem import quadrant

BOUNDARY = -1
FAMILIES = ("uniform", "graded", "locally_refined", "adaptive")
_KEY_DIGITS = 12


class MeshError(RuntimeError):
    """Cell boxes overlap, leave gaps, or break a mesh invariant."""


@dataclass(frozen=True)
class Cell:
    id: int
    center: tuple[float, float]
    halfwidth: tuple[float, float]
    level: int
    box: tuple[float, float, float, float]  # x0, x1, y0, y1

    @property
    def quadrant(self) -> int:
        return quadrant(*self.center)

    @property
    def area(self) -> float:
        x0, x1, y0, y1 = self.box
        return (x1 - x0) * (y1 - y0)


@dataclass(frozen=True)
class Face:
    kind: str  # "interior" or "boundary"
    left: int
    right: int  # neighbour id, or BOUNDARY
    area: float
    dl: float
    dr: float
    normal: str  # "+x", "-x", "+y", "-y"; outward from ``left`` on the boundary
    midpoint: tuple[float, float]

    @property
    def axis(self) -> int:
        return 0 if self.normal[1] == "x" else 1


@dataclass(frozen=True)
class Mesh:
    cells: tuple[Cell, ...]
    faces: tuple[Face, ...]
    family: str
    params: dict = field(default_factory=dict, compare=False)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def boxes(self) -> np.ndarray:
        return np.array([c.box for c in self.cells])

    @property
    def levels(self) -> np.ndarray:
        return np.array([c.level for c in self.cells], dtype=int)

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.cells])

    @property
    def areas(self) -> np.ndarray:
        return np.array([c.area for c in self.cells])


def _key(v: float) -> float:
    return round(v, _KEY_DIGITS)


def _overlaps(lo, hi, tol):
    """Intersect two sorted interval lists covering the same segment."""
    out = []
    i = j = 0
    while i < len(lo) and j < len(hi):
        a0, a1, ca = lo[i]
        b0, b1, cb = hi[j]
        s0, s1 = max(a0, b0), min(a1, b1)
        if s1 - s0 > tol:
            out.append((s0, s1, ca, cb))
        if a1 < b1 - tol:
            i += 1
        elif b1 < a1 - tol:
            j += 1
        else:
            i += 1
            j += 1
    return out


def enumerate_faces(cells) -> list[Face]:
    """Faces of a box partition, sorted by (axis, line position, along-line).

    Interior faces run from the lower cell (``left``) to the upper one;
    boundary faces carry ``right=BOUNDARY`` and the outward normal.
    """
    boxes = np.array([c.box for c in cells])
    xmin, xmax = boxes[:, 0].min(), boxes[:, 1].max()
    ymin, ymax = boxes[:, 2].min(), boxes[:, 3].max()
    tol = 1e-13 * max(xmax - xmin, ymax - ymin)
    faces = []
    for axis in (0, 1):
        lo_edges = defaultdict(list)  # cells whose upper edge sits on the line
        hi_edges = defaultdict(list)
        coord = {}
        for c in cells:
            x0, x1, y0, y1 = c.box
            a0, a1, t0, t1 = (x0, x1, y0, y1) if axis == 0 else (y0, y1, x0, x1)
            lo_edges[_key(a1)].append((t0, t1, c))
            hi_edges[_key(a0)].append((t0, t1, c))
            coord.setdefault(_key(a1), a1)
            coord.setdefault(_key(a0), a0)
        amin, amax = (xmin, xmax) if axis == 0 else (ymin, ymax)
        name = "x" if axis == 0 else "y"
        for k in sorted(coord):
            pos = coord[k]
            lo = sorted(lo_edges.get(k, []), key=lambda e: e[0])
            hi = sorted(hi_edges.get(k, []), key=lambda e: e[0])
            if k == _key(amin) or k == _key(amax):
                if (k == _key(amin) and lo) or (k == _key(amax) and hi):
                    raise MeshError(f"cell outside the domain at {name}={pos}")
                side, sign = (hi, "-") if k == _key(amin) else (lo, "+")
                for t0, t1, c in side:
                    mid = 0.5 * (t0 + t1)
                    faces.append(Face("boundary", c.id, BOUNDARY, t1 - t0,
                                      c.halfwidth[axis], 0.0, sign + name,
                                      (pos, mid) if axis == 0 else (mid, pos)))
                continue
            segs = _overlaps(lo, hi, tol)
            covered = sum(s1 - s0 for s0, s1, _, _ in segs)
            lo_len = sum(t1 - t0 for t0, t1, _ in lo)
            hi_len = sum(t1 - t0 for t0, t1, _ in hi)
            if abs(covered - lo_len) > 1e3 * tol or abs(covered - hi_len) > 1e3 * tol:
                raise MeshError(f"overlapping or gapping cells along {name}={pos}")
            for s0, s1, ca, cb in segs:
                mid = 0.5 * (s0 + s1)
                faces.append(Face("interior", ca.id, cb.id, s1 - s0,
                                  ca.halfwidth[axis], cb.halfwidth[axis], "+" + name,
                                  (pos, mid) if axis == 0 else (mid, pos)))
    return faces


def _from_boxes(boxes, levels, family, params=None) -> Mesh:
    # lexicographic renumbering: center y, then center x
    order = sorted(range(len(boxes)),
                   key=lambda i: (0.5 * (boxes[i][2] + boxes[i][3]), 0.5 * (boxes[i][0] + boxes[i][1])))
    cells = []
    for new_id, i in enumerate(order):
        x0, x1, y0, y1 = boxes[i]
        cells.append(Cell(new_id, (0.5 * (x0 + x1), 0.5 * (y0 + y1)),
                          (0.5 * (x1 - x0), 0.5 * (y1 - y0)), int(levels[i]),
                          (float(x0), float(x1), float(y0), float(y1))))
    for c in cells:
        x0, x1, y0, y1 = c.box
        if x0 < 0.0 < x1 or y0 < 0.0 < y1:
            raise MeshError(f"cell {c.id} straddles a coordinate axis")
    return Mesh(tuple(cells), tuple(enumerate_faces(cells)), family, dict(params or {}))


def _tensor_boxes(xs):
    return [(xs[i], xs[i + 1], xs[j], xs[j + 1])
            for j in range(len(xs) - 1) for i in range(len(xs) - 1)]


def build_uniform(n: int) -> Mesh:
    """``n x n`` congruent squares; ``n`` must be even so 0 is a grid line."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    xs = [(2.0 * j - n) / n for j in range(n + 1)]
    boxes = _tensor_boxes(xs)
    return _from_boxes(boxes, [0] * len(boxes), "uniform", {"n": n})


def graded_points(n: int, beta: float) -> list[float]:
    m = n // 2
    pos = [(j / m) ** beta for j in range(m + 1)]
    return [-p for p in reversed(pos[1:])] + pos


def build_graded(n: int, beta: float = 2.0) -> Mesh:
    """Tensor grid with points ``+-(j/(n/2))**beta`` clustering at the origin."""
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")
    if beta < 1.0:
        raise ValueError(f"beta must be >= 1, got {beta}")
    boxes = _tensor_boxes(graded_points(n, beta))
    return _from_boxes(boxes, [0] * len(boxes), "graded", {"n": n, "beta": beta})


def _split(box):
    x0, x1, y0, y1 = box
    xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    return [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]


def _unbalanced(cells, faces):
    lv = [c.level for c in cells]
    bad = set()
    for f in faces:
        if f.right != BOUNDARY and abs(lv[f.left] - lv[f.right]) > 1:
            bad.add(f.left if lv[f.left] < lv[f.right] else f.right)
    return bad


def refine_cells(mesh: Mesh, marked, family: str | None = None) -> Mesh:
    """Split each marked cell into four, then split more until 2:1 balanced."""
    marked = set(int(i) for i in marked)
    if any(i < 0 or i >= mesh.n_cells for i in marked):
        raise IndexError("marked cell id out of range")
    family = family or mesh.family
    cells = list(mesh.cells)
    while marked:
        boxes, levels = [], []
        for c in cells:
            if c.id in marked:
                boxes.extend(_split(c.box))
                levels.extend([c.level + 1] * 4)
            else:
                boxes.append(c.box)
                levels.append(c.level)
        new = _from_boxes(boxes, levels, family, mesh.params)
        cells = list(new.cells)
        marked = _unbalanced(new.cells, new.faces)
    if len(cells) == mesh.n_cells and family == mesh.family:
        return mesh
    return new


def build_locally_refined(n0: int = 16, levels: int = 4) -> Mesh:
    """Uniform root grid refined in nested squares ``(-2**-k, 2**-k)**2``."""
    mesh = build_uniform(n0)
    for k in range(1, levels + 1):
        s = 2.0**-k
        marked = [c.id for c in mesh.cells
                  if c.box[0] < s and c.box[1] > -s and c.box[2] < s and c.box[3] > -s]
        mesh = refine_cells(mesh, marked, family="locally_refined")
    params = {"n0": n0, "levels": levels}
    return Mesh(mesh.cells, mesh.faces, "locally_refined", params)


@dataclass(frozen=True)
class MeshStats:
    cells: int
    faces: int
    min_side: float
    max_side: float
    max_level: int


def mesh_stats(mesh: Mesh) -> MeshStats:
    hw = np.array([c.halfwidth for c in mesh.cells])
    return MeshStats(mesh.n_cells, len(mesh.faces), float(2 * hw.min()),
                     float(2 * hw.max()), int(mesh.levels.max()))


def check_invariants(mesh: Mesh, tol: float = 1e-12) -> list[str]:
    """Return a list of violated mesh invariants (empty when valid)."""
    problems = []
    if abs(mesh.areas.sum() - 4.0) > tol:
        problems.append(f"cell areas sum to {mesh.areas.sum()!r}, not 4")
    perim = sum(f.area for f in mesh.faces if f.right == BOUNDARY)
    if abs(perim - 8.0) > tol:
        problems.append(f"boundary faces sum to {perim!r}, not 8")
    lv = mesh.levels
    cover = np.zeros((mesh.n_cells, 2, 2))  # cell, axis, side (low/high)
    for f in mesh.faces:
        if f.area <= 0 or f.dl <= 0 or (f.right != BOUNDARY and f.dr <= 0):
            problems.append(f"degenerate face {f}")
        a = f.axis
        if f.right == BOUNDARY:
            cover[f.left, a, 0 if f.normal[0] == "-" else 1] += f.area
        else:
            cover[f.left, a, 1] += f.area
            cover[f.right, a, 0] += f.area
            if abs(lv[f.left] - lv[f.right]) > 1:
                problems.append(f"2:1 balance broken between {f.left} and {f.right}")
    for c in mesh.cells:
        for a in (0, 1):
            side = 2 * c.halfwidth[1 - a]
            for s in (0, 1):
                if abs(cover[c.id, a, s] - side) > tol:
                    problems.append(f"cell {c.id} face covering {cover[c.id, a, s]!r} != {side!r}")
        if c.center[0] == 0.0 or c.center[1] == 0.0:
            problems.append(f"cell {c.id} centred on an axis")
        x0, x1, y0, y1 = c.box
        if x0 < 0.0 < x1 or y0 < 0.0 < y1:
            problems.append(f"cell {c.id} straddles an axis")
    return problems
