import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshcond.problem import (
    KELLOGG_GAMMA_01,
    DomainError,
    ProblemSpec,
    eta,
    eta_branch,
    eta_prime,
    eta_prime_branch,
    eta_second,
    exact_pressure,
    permeability,
    source,
)

SPEC = KELLOGG_GAMMA_01
ENDS = [math.pi / 2, math.pi, 1.5 * math.pi]


def test_paper_parameters():
    assert (SPEC.gamma, SPEC.R, SPEC.rho, SPEC.sigma) == (0.1, 161.4476, 0.7854, -14.9225)


@pytest.mark.parametrize("bad", [dict(gamma=0.0), dict(gamma=1.0), dict(R=-1.0)])
def test_spec_rejects_bad_parameters(bad):
    with pytest.raises(DomainError):
        ProblemSpec(**bad)


def test_eta_at_half_pi_both_branches():
    g, rho, sigma = SPEC.gamma, SPEC.rho, SPEC.sigma
    expected = math.cos(rho * g) * math.cos((math.pi / 2 - sigma) * g)
    assert eta_branch(math.pi / 2, 0, SPEC) == pytest.approx(expected, abs=1e-15)
    assert eta_branch(math.pi / 2, 1, SPEC) == pytest.approx(expected, abs=1e-15)


def test_eta_golden_value_at_zero():
    # mpmath, 40 digits, branch-1 formula evaluated directly
    assert eta(0.0) == pytest.approx(-0.078210763271045642, abs=1e-12)


@pytest.mark.parametrize("theta", ENDS)
def test_eta_continuity(theta):
    b = ENDS.index(theta)
    assert abs(eta_branch(theta, b, SPEC) - eta_branch(theta, b + 1, SPEC)) <= 1e-14


def test_eta_wraparound():
    assert abs(eta(0.0) - eta(2 * math.pi)) <= 1e-14


@pytest.mark.parametrize("theta", [-1e-9, 2 * math.pi + 1e-9, 7.0])
def test_eta_domain_error(theta):
    with pytest.raises(DomainError):
        eta(theta)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 2 * math.pi - 0.01))
def test_eta_prime_matches_central_difference(theta):
    h = 1e-6
    # stay inside one branch so the difference quotient is smooth
    if any(abs(theta - e) < 2 * h for e in ENDS):
        return
    fd = (eta(theta + h) - eta(theta - h)) / (2 * h)
    d = eta_prime(theta)
    assert abs(fd - d) <= 1e-6 * max(abs(d), 1e-3)


@pytest.mark.parametrize("branch", range(4))
def test_ode_property(branch):
    rng = np.random.default_rng(branch)
    lo = branch * math.pi / 2
    for theta in rng.uniform(lo, lo + math.pi / 2, 100):
        assert abs(eta_second(theta) + SPEC.gamma**2 * eta(theta)) <= 1e-8


@pytest.mark.parametrize("i", range(4))
def test_transmission_condition(i):
    k = SPEC.quadrant_permeability
    theta = (i + 1) * math.pi / 2
    left = k.of_quadrant(i + 1) * eta_prime_branch(theta, i, SPEC)
    right = k.of_quadrant((i + 1) % 4 + 1) * eta_prime_branch(theta % (2 * math.pi), (i + 1) % 4, SPEC)
    assert abs(left - right) / abs(left) <= 1e-3


def test_one_sided_derivatives():
    k = SPEC.quadrant_permeability
    left = k.k1 * eta_prime(math.pi / 2, side="left")
    right = k.k2 * eta_prime(math.pi / 2, side="right")
    assert abs(left - right) / abs(left) <= 1e-3
    assert eta_prime(0.0, side="left") == eta_prime_branch(2 * math.pi, 3, SPEC)


def test_eta_prime_vanishes_with_gamma():
    tiny = ProblemSpec(gamma=1e-12)
    assert abs(eta_prime(1.0, tiny)) < 1e-10


def test_exact_pressure_values():
    assert exact_pressure(0.0, 0.0) == 0.0
    for t in np.linspace(0.1, 6.2, 13):
        assert exact_pressure(math.cos(t), math.sin(t)) == pytest.approx(eta(t), abs=1e-14)
    assert exact_pressure(1.0, 1.0) == pytest.approx(-0.081219230493083111, abs=1e-12)


def test_exact_pressure_on_axes_is_continuous():
    for x, y in [(0.5, 0.0), (0.0, 0.5), (-0.5, 0.0), (0.0, -0.5)]:
        eps = 1e-9
        near = exact_pressure(x + eps * (y != 0) * 1, y + eps * (x != 0))
        assert exact_pressure(x, y) == pytest.approx(near, abs=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 2 * math.pi - 1e-9))
def test_monotone_along_rays(theta):
    rs = np.linspace(0.01, 1.0, 25)
    vals = np.array([exact_pressure(r * math.cos(theta), r * math.sin(theta)) for r in rs])
    d = np.diff(vals)
    assert np.all(d >= -1e-15) or np.all(d <= 1e-15)


def test_permeability_quadrants():
    assert permeability(0.5, 0.5) == 161.4476
    assert permeability(-0.5, 0.5) == 1.0
    assert permeability(-0.5, -0.5) == 161.4476
    assert permeability(0.5, -0.5) == 1.0
    with pytest.raises(DomainError):
        permeability(0.0, 0.3)


def _weighted_laplacian(x, y, h=1e-4):
    p = exact_pressure
    lap = (p(x + h, y) + p(x - h, y) + p(x, y + h) + p(x, y - h) - 4 * p(x, y)) / h**2
    return permeability(x, y) * lap


def test_source_is_zero_and_solution_harmonic():
    assert source(0.3, 0.4) == 0.0
    assert abs(_weighted_laplacian(0.3, 0.4)) <= 1e-4
    assert abs(_weighted_laplacian(-0.3, 0.4)) <= 1e-4
