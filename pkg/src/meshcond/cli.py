"""Command-line driver for the mesh conditioning experiment.

    meshcond table     eigenvalues, condition numbers and CG iterations per mesh
    meshcond converge  CG residual history for one mesh family
    meshcond export    VTK mesh + solution (+ matrix triples) for one family
    meshcond error     discrete L2 error per mesh family
    meshcond stats     mesh statistics per family

Settings come from defaults, then an optional ``key=value`` config file,
then command-line flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
from dataclasses import dataclass

from . import fvm, linalg, mesh as meshmod
from .adapt import adapt_loop
from .problem import KELLOGG_GAMMA_01, AffineProblem
from .vtkio import atomic_write_text, write_vtk

log = logging.getLogger("meshcond")

TABLE_ORDER = ("adaptive", "graded", "uniform", "locally_refined")
PROBLEMS = {"kellogg": KELLOGG_GAMMA_01, "smooth": AffineProblem(0.0, 1.0, 0.5, 1.0)}


@dataclass
class ExperimentConfig:
    problem: str = "kellogg"
    dof_target: int = 1024
    alpha: float = 1.0
    beta: float = 1.2
    adapt_n0: int = 8
    lr_n0: int = 0  # 0: pick from dof_target and lr_levels
    lr_levels: int = 1
    tol: float = 1e-8
    maxit: int = 0  # 0: 10 * dof
    eig_tol: float = 1e-8
    out: str = "out"
    inject_exact: bool = False

    @property
    def spec(self):
        return PROBLEMS[self.problem]

    def grid_n(self) -> int:
        n = int(round(math.sqrt(self.dof_target) / 2.0)) * 2
        return max(n, 2)

    def lr_root(self) -> int:
        if self.lr_n0:
            return self.lr_n0
        # each nested level adds about 3/4 of the root cell count
        n = math.sqrt(self.dof_target / (1.0 + 0.75 * self.lr_levels))
        return max(2, int(round(n / 2.0)) * 2)


def _coerce(field: dataclasses.Field, raw: str):
    kind = field.type if isinstance(field.type, str) else field.type.__name__
    if kind == "bool":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw.strip()


def read_config_file(path) -> dict:
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, raw = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in fields:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _coerce(fields[key], raw)
    return values


class Experiment:
    """Builds meshes and systems lazily, once per family."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self._meshes = {}
        self._systems = {}
        self.adapt_trace = None

    def mesh(self, family: str) -> meshmod.Mesh:
        if family not in self._meshes:
            c = self.config
            if family == "uniform":
                m = meshmod.build_uniform(c.grid_n())
            elif family == "graded":
                m = meshmod.build_graded(c.grid_n(), c.beta)
            elif family == "locally_refined":
                m = meshmod.build_locally_refined(c.lr_root(), c.lr_levels)
            elif family == "adaptive":
                self.adapt_trace = adapt_loop(c.spec, c.dof_target, c.alpha, c.adapt_n0)
                m = self.adapt_trace.final_mesh
            else:
                raise ValueError(f"unknown mesh family {family!r}")
            log.info("%s mesh: %d cells", family, m.n_cells)
            self._meshes[family] = m
        return self._meshes[family]

    def system(self, family: str) -> fvm.SparseSystem:
        if family not in self._systems:
            self._systems[family] = fvm.assemble(self.mesh(family), self.config.spec)
        return self._systems[family]

    def solve(self, family: str) -> linalg.SolveReport:
        s = self.system(family)
        maxit = self.config.maxit or 10 * s.dof
        return linalg.cg_solve(s, self.config.tol, maxit)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(config, name, text, echo=True) -> str:
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, name)
    atomic_write_text(path, text)
    if echo:
        sys.stdout.write(text)
    log.info("wrote %s", path)
    return path


def _write_adapt_trace(exp: Experiment) -> None:
    if exp.adapt_trace is None:
        return
    rows = [(i, r.dof, r.marked, r.max_indicator, r.mean_indicator)
            for i, r in enumerate(exp.adapt_trace.rounds)]
    _emit(exp.config, "adapt_trace.csv",
          _csv(("round", "dof", "marked", "max_indicator", "mean_indicator"), rows), echo=False)


def table_rows(exp: Experiment):
    rows = []
    for fam in TABLE_ORDER:
        s = exp.system(fam)
        spec = linalg.condition_number(s, exp.config.eig_tol)
        rep = exp.solve(fam)
        if not rep.converged:
            raise linalg.SolverError(f"CG did not reach tol on the {fam} mesh")
        rows.append((fam, s.dof, spec.lambda_min, spec.lambda_max, spec.cond, rep.iterations))
    return rows


def cmd_table(exp: Experiment) -> str:
    rows = table_rows(exp)
    _write_adapt_trace(exp)
    return _emit(exp.config, "table.csv",
                 _csv(("mesh", "dof", "lambda_min", "lambda_max", "cond", "cg_iters"), rows))


def converge_rows(exp: Experiment, family: str):
    rep = exp.solve(family)
    return [(i, float(r)) for i, r in enumerate(rep.residuals)]


def cmd_converge(exp: Experiment, family: str) -> str:
    rows = converge_rows(exp, family)
    _write_adapt_trace(exp)
    return _emit(exp.config, f"converge_{family}.csv",
                 _csv(("iteration", "relative_residual"), rows), echo=False)


def cmd_export(exp: Experiment, family: str) -> str:
    m = exp.mesh(family)
    s = exp.system(family)
    p = exp.solve(family).solution
    perm = fvm.cell_permeabilities(m, exp.config.spec)
    os.makedirs(exp.config.out, exist_ok=True)
    path = os.path.join(exp.config.out, f"mesh_{family}.vtk")
    write_vtk(m, path, permeability=perm, pressure=p)
    fvm.write_coo(s, os.path.join(exp.config.out, f"matrix_{family}.txt"))
    _write_adapt_trace(exp)
    return path


def error_rows(exp: Experiment):
    rows = []
    for fam in TABLE_ORDER:
        m = exp.mesh(fam)
        if exp.config.inject_exact:
            p = fvm.exact_interpolant(m, exp.config.spec)
        else:
            p = exp.solve(fam).solution
        rows.append((fam, m.n_cells, fvm.discrete_l2_error(m, p, exp.config.spec)))
    return rows


def cmd_error(exp: Experiment) -> str:
    rows = error_rows(exp)
    _write_adapt_trace(exp)
    return _emit(exp.config, "error.csv", _csv(("mesh", "dof", "l2_error"), rows))


def cmd_stats(exp: Experiment) -> str:
    rows = []
    for fam in TABLE_ORDER:
        st = meshmod.mesh_stats(exp.mesh(fam))
        rows.append((fam, st.cells, st.faces, st.min_side, st.max_side, st.max_level))
    return _emit(exp.config, "stats.csv",
                 _csv(("mesh", "cells", "faces", "min_side", "max_side", "max_level"), rows))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value settings file (flags override it)")
    common.add_argument("--problem", choices=sorted(PROBLEMS))
    common.add_argument("--dof-target", type=int, dest="dof_target")
    common.add_argument("--alpha", type=float, help="adaptive marking factor")
    common.add_argument("--beta", type=float, help="grading exponent of the graded mesh")
    common.add_argument("--adapt-n0", type=int, dest="adapt_n0")
    common.add_argument("--lr-n0", type=int, dest="lr_n0")
    common.add_argument("--lr-levels", type=int, dest="lr_levels")
    common.add_argument("--tol", type=float, help="CG relative residual tolerance")
    common.add_argument("--maxit", type=int)
    common.add_argument("--eig-tol", type=float, dest="eig_tol")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="meshcond", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("table", parents=[common])
    for name in ("converge", "export"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--family", required=True, choices=TABLE_ORDER)
    p = sub.add_parser("error", parents=[common])
    p.add_argument("--inject-exact", action="store_true", dest="inject_exact", default=None,
                   help="score the exact cell-centre interpolant instead of the solve")
    sub.add_parser("stats", parents=[common])
    return parser


def resolve_config(args) -> ExperimentConfig:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for f in dataclasses.fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return ExperimentConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        exp = Experiment(config)
        if args.command == "table":
            cmd_table(exp)
        elif args.command == "converge":
            cmd_converge(exp, args.family)
        elif args.command == "export":
            cmd_export(exp, args.family)
        elif args.command == "error":
            cmd_error(exp)
        else:
            cmd_stats(exp)
    except Exception as exc:  # any failed step -> nonzero exit
        print(f"meshcond {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
