"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--n 32] [--repeat 5]

Each backend runs in a fresh interpreter because the backend is chosen
once, at import time, from ``MESHCOND_PURE``.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, timeit
import numpy as np
from meshcond import _kernels as kr
from meshcond.fvm import assemble
from meshcond.linalg import condition_number
from meshcond.mesh import build_uniform
from meshcond.problem import KELLOGG_GAMMA_01

n, repeat = int(sys.argv[1]), int(sys.argv[2])
s = assemble(build_uniform(n), KELLOGG_GAMMA_01)
a = s.matrix
x = np.linspace(-1.0, 1.0, s.dof)
small = assemble(build_uniform(8), KELLOGG_GAMMA_01).matrix.toarray()
cases = {
    "matvec": lambda: kr.csr_matvec(a.indptr, a.indices, a.data, x),
    "cg": lambda: kr.cg(a.indptr, a.indices, a.data, s.rhs, 1e-8, 10 * s.dof),
    "jacobi_64": lambda: kr.jacobi_eigenvalues(small, 1e-14, 50),
    "condition_number": lambda: condition_number(s),
}
out = {"backend": kr.BACKEND}
for name, fn in cases.items():
    number = 200 if name == "matvec" else 1
    out[name] = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
print(json.dumps(out))
"""


def run(pure: bool, n: int, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("MESHCOND_PURE", None)
    if pure:
        env["MESHCOND_PURE"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=32, help="uniform grid is n x n")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    fast, slow = run(False, args.n, args.repeat), run(True, args.n, args.repeat)
    if fast["backend"] == slow["backend"]:
        print("compiled extension not available; only the numpy backend ran")
    print(f"{'kernel':<18}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for key in ("matvec", "cg", "jacobi_64", "condition_number"):
        print(f"{key:<18}{fast[key]:>11.2e}s{slow[key]:>11.2e}s{slow[key] / fast[key]:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
