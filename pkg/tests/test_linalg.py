import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from meshcond.fvm import SparseSystem, assemble
from meshcond.linalg import (
    SolverError,
    cg_solve,
    condition_number,
    dense_condition,
    dense_spectrum,
    largest_eigenvalue,
    lcg_vector,
    smallest_eigenvalue,
)
from meshcond.mesh import build_graded, build_locally_refined, build_uniform, refine_cells
from meshcond.problem import KELLOGG_GAMMA_01, AffineProblem


def system(a, b=None):
    a = sp.csr_matrix(np.asarray(a, dtype=float))
    n = a.shape[0]
    return SparseSystem(a, np.ones(n) if b is None else np.asarray(b, float), np.zeros(0), np.zeros(0))


DIAG123 = system(np.diag([1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])


def test_cg_identity():
    b = np.array([3.0, -1.0, 2.0, 0.5])
    rep = cg_solve(system(np.eye(4), b), 1e-12)
    assert rep.iterations == 1 and rep.converged
    np.testing.assert_allclose(rep.solution, b, rtol=1e-15)


def test_cg_diagonal():
    rep = cg_solve(DIAG123, 1e-12)
    assert rep.iterations <= 3
    np.testing.assert_allclose(rep.solution, 1.0, rtol=1e-12)


def test_cg_zero_rhs():
    rep = cg_solve(system(np.eye(3), np.zeros(3)))
    assert rep.iterations == 0 and rep.converged
    np.testing.assert_array_equal(rep.solution, 0.0)


def test_cg_detects_indefinite():
    with pytest.raises(SolverError, match="iteration 1"):
        cg_solve(system(np.diag([1.0, -2.0]), [1.0, 1.0]))


def test_cg_rejects_bad_tol():
    with pytest.raises(ValueError):
        cg_solve(DIAG123, 0.0)


def test_cg_maxit_not_converged():
    s = assemble(build_uniform(16), KELLOGG_GAMMA_01)
    rep = cg_solve(s, 1e-8, maxit=5)
    assert rep.iterations == 5 and not rep.converged


SMALL = {
    "uniform8": lambda: build_uniform(8),
    "graded8": lambda: build_graded(8, 2.0),
    "refined": lambda: build_locally_refined(4, 2),
    "mixed": lambda: refine_cells(build_uniform(6), [3, 10]),
    "uniform12": lambda: build_uniform(12),
}


@pytest.mark.parametrize("name", SMALL)
def test_cg_matches_direct_and_a_norm_monotone(name):
    s = assemble(SMALL[name](), KELLOGG_GAMMA_01)
    a = s.matrix.toarray()
    exact = np.linalg.solve(a, s.rhs)
    rep = cg_solve(s, 1e-10)
    assert rep.converged
    assert rep.iterations <= s.dof + 5
    assert np.all(np.isfinite(rep.residuals)) and np.all(rep.residuals > 0)
    assert rep.residuals[-1] <= 1e-10
    assert np.max(np.abs(rep.solution - exact)) <= 1e-8
    # A-norm error must not increase from one step to the next
    errs = []
    for k in range(1, rep.iterations + 1):
        e = cg_solve(s, 1e-300, maxit=k).solution - exact
        errs.append(e @ a @ e)
    assert np.all(np.diff(errs) <= 1e-12 * errs[0])


def test_eigen_diagonal():
    assert largest_eigenvalue(DIAG123) == pytest.approx(3.0, abs=1e-10)
    assert smallest_eigenvalue(DIAG123) == pytest.approx(1.0, abs=1e-10)
    assert largest_eigenvalue(DIAG123, block=1) == pytest.approx(3.0, abs=1e-7)
    assert smallest_eigenvalue(DIAG123, block=1) == pytest.approx(1.0, abs=1e-7)


def test_condition_identity():
    rep = condition_number(system(np.eye(5)))
    assert rep.cond == pytest.approx(1.0, abs=1e-12)


def test_dense_small():
    np.testing.assert_allclose(dense_spectrum(DIAG123), [1, 2, 3], atol=1e-14)
    np.testing.assert_allclose(dense_spectrum(system([[2, -1], [-1, 2]])), [1, 3], atol=1e-14)


def test_dense_two_by_two_cells():
    # hand-assembled 6I - C4 adjacency: 6 - {2, 0, 0, -2}
    s = assemble(build_uniform(2), AffineProblem(0, 0, 0, 1.0))
    np.testing.assert_allclose(dense_spectrum(s), [4, 6, 6, 8], atol=1e-13)


def test_dense_guard():
    with pytest.raises(ValueError):
        dense_spectrum(assemble(build_uniform(22), KELLOGG_GAMMA_01))


@pytest.mark.parametrize("name", SMALL)
def test_iterative_matches_dense(name):
    s = assemble(SMALL[name](), KELLOGG_GAMMA_01)
    it, de = condition_number(s), dense_condition(s)
    ref = np.linalg.eigvalsh(s.matrix.toarray())
    assert de.lambda_min == pytest.approx(ref[0], rel=1e-12)
    assert de.lambda_max == pytest.approx(ref[-1], rel=1e-12)
    assert abs(it.lambda_min / de.lambda_min - 1) <= 1e-6
    assert abs(it.lambda_max / de.lambda_max - 1) <= 1e-6
    assert abs(it.cond / de.cond - 1) <= 1e-6


def test_uniform32_lambda_max(family_systems):
    assert largest_eigenvalue(family_systems["uniform"]) == pytest.approx(1.28e3, rel=0.10)


def test_scaling_invariance():
    s = assemble(build_locally_refined(8, 2), KELLOGG_GAMMA_01)
    r1, r10 = condition_number(s), condition_number(s.scaled(10.0))
    assert r10.lambda_max == pytest.approx(10 * r1.lambda_max, rel=1e-8)
    assert r10.lambda_min == pytest.approx(10 * r1.lambda_min, rel=1e-8)
    assert r10.cond == pytest.approx(r1.cond, rel=1e-8)


def test_deterministic_start():
    np.testing.assert_array_equal(lcg_vector(50), lcg_vector(50))
    v = lcg_vector(1000)
    assert v.min() > 0.5 and v.max() < 1.5


def test_maxit_error_carries_estimate():
    s = assemble(build_uniform(12), KELLOGG_GAMMA_01)
    with pytest.raises(SolverError) as info:
        largest_eigenvalue(s, tol=1e-14, maxit=3)
    assert info.value.estimate > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.integers(0, 10_000))
def test_random_spd_cg_and_spectrum(n, seed):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    lam = rng.uniform(0.5, 20.0, n)
    a = (q * lam) @ q.T
    a = 0.5 * (a + a.T)
    s = system(a, rng.normal(size=n))
    np.testing.assert_allclose(dense_spectrum(s), np.sort(lam), rtol=1e-10)
    rep = cg_solve(s, 1e-10)
    assert rep.converged and rep.iterations <= n + 5
    np.testing.assert_allclose(rep.solution, np.linalg.solve(a, s.rhs), atol=1e-7)
